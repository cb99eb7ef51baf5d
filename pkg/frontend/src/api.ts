// Thin typed client over the analytics service endpoints. The fetch
// implementation is injected so controllers are testable offline.

import { ExploreResponse, QueryResponse } from './types.js';

export type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, public status: number, public detail?: unknown) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail: unknown;
  try {
    detail = await response.json();
  } catch {
    detail = undefined;
  }
  const body = detail as { error?: string; detail?: string } | undefined;
  const message = body?.error ?? body?.detail ?? `request failed (${response.status})`;
  return new ApiError(message, response.status, detail);
}

export async function postQuery(
  fetchFn: FetchFn,
  text: string,
  sessionId: string | null,
): Promise<QueryResponse> {
  const response = await fetchFn('/api/query', {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(sessionId ? { text, session_id: sessionId } : { text }),
  });
  if (!response.ok) throw await parseError(response);
  return (await response.json()) as QueryResponse;
}

export async function postExplore(
  fetchFn: FetchFn,
  graphId: string,
  steps: number,
): Promise<ExploreResponse> {
  const response = await fetchFn('/api/explore', {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify({ graph_id: graphId, steps }),
  });
  if (!response.ok) throw await parseError(response);
  return (await response.json()) as ExploreResponse;
}
