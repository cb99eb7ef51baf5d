// Wire types mirrored from the analytics service JSON schemas.

export type ValueKind =
  | 'scalar'
  | 'text'
  | 'boolean'
  | 'series'
  | 'table'
  | 'geo_series'
  | 'forecast'
  | 'anomaly_report';

export interface TableColumn {
  name: string;
  semantic_type: string;
  unit: string | null;
}

export interface Value {
  kind: ValueKind;
  value?: number | null;
  unit?: string | null;
  text?: string | null;
  flag?: boolean | null;
  points?: Array<[string | number, number]>;
  label_kind?: string | null;
  name?: string | null;
  schema?: TableColumn[];
  rows?: Array<Array<string | number>>;
  history?: Value | null;
  predicted?: Array<[number, number, number]>;
  series?: Value | null;
  flagged?: number[];
  threshold?: number | null;
}

export interface RankingEntry {
  viz_type: string;
  votes: number;
}

export interface VizSpec {
  viz_type: string;
  binding: Record<string, unknown>;
  title: string;
  ranking: RankingEntry[];
  diagnostics: string[];
  stacked?: VizSpec[];
}

export interface GraphNode {
  id: string;
  function: string;
  params: Record<string, unknown>;
  score: number;
}

export interface GraphEdge {
  from: string;
  to: string;
  slot: number;
}

export interface GraphDocument {
  nodes: GraphNode[];
  edges: GraphEdge[];
  sink: string;
  depth: number;
  relevance: number;
  complete: boolean;
}

export interface QueryResponse {
  answer: Value;
  viz_spec: VizSpec;
  graph: GraphDocument;
  graph_id: string;
  session_id: string;
  diagnostics: string[];
}

export interface ExploreResponse {
  node_id: string;
  value: Value;
  viz_spec: VizSpec;
}

export interface ErrorResponse {
  error: string;
  diagnostics?: Record<string, unknown>;
  node_id?: string;
}
