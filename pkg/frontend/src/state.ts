// Application state as a pure projection of server responses plus user
// selections. Every transition is a pure function, so a state can be
// replayed from a log of events.

import { ExploreResponse, QueryResponse } from './types.js';

export interface ChatEntry {
  request: string;
  response: QueryResponse | null;
  error: string | null;
  selectedViz: number; // index into response.viz_spec.ranking
  exploreStack: ExploreResponse[];
  exploreExhausted: boolean;
  graphOpen: boolean;
}

export interface AppState {
  entries: ChatEntry[];
  sessionId: string | null;
  pending: boolean;
}

export type AppEvent =
  | { type: 'query_sent'; request: string }
  | { type: 'query_ok'; response: QueryResponse }
  | { type: 'query_failed'; error: string }
  | { type: 'viz_selected'; entry: number; viz: number }
  | { type: 'explore_pushed'; entry: number; response: ExploreResponse }
  | { type: 'explore_popped'; entry: number }
  | { type: 'explore_exhausted'; entry: number }
  | { type: 'graph_toggled'; entry: number };

export function initialState(): AppState {
  return { entries: [], sessionId: null, pending: false };
}

function updateEntry(
  state: AppState,
  index: number,
  patch: (entry: ChatEntry) => Partial<ChatEntry>,
): AppState {
  if (index < 0 || index >= state.entries.length) return state;
  const entries = state.entries.map((entry, i) =>
    i === index ? { ...entry, ...patch(entry) } : entry,
  );
  return { ...state, entries };
}

export function reduce(state: AppState, event: AppEvent): AppState {
  switch (event.type) {
    case 'query_sent':
      return {
        ...state,
        pending: true,
        entries: state.entries.concat([{
          request: event.request,
          response: null,
          error: null,
          selectedViz: 0,
          exploreStack: [],
          exploreExhausted: false,
          graphOpen: false,
        }]),
      };
    case 'query_ok': {
      const index = state.entries.length - 1;
      const next = updateEntry(state, index, () => ({ response: event.response }));
      return { ...next, pending: false, sessionId: event.response.session_id };
    }
    case 'query_failed': {
      const index = state.entries.length - 1;
      const next = updateEntry(state, index, () => ({ error: event.error }));
      return { ...next, pending: false };
    }
    case 'viz_selected':
      return updateEntry(state, event.entry, (entry) => {
        const limit = entry.response?.viz_spec.ranking.length ?? 0;
        if (event.viz < 0 || event.viz >= limit) return {};
        return { selectedViz: event.viz };
      });
    case 'explore_pushed':
      return updateEntry(state, event.entry, (entry) => ({
        exploreStack: entry.exploreStack.concat([event.response]),
      }));
    case 'explore_popped':
      return updateEntry(state, event.entry, (entry) => ({
        exploreStack: entry.exploreStack.slice(0, -1),
        exploreExhausted: false,
      }));
    case 'explore_exhausted':
      return updateEntry(state, event.entry, () => ({ exploreExhausted: true }));
    case 'graph_toggled':
      return updateEntry(state, event.entry, (entry) => ({ graphOpen: !entry.graphOpen }));
    default:
      return state;
  }
}

export function replay(events: AppEvent[]): AppState {
  return events.reduce(reduce, initialState());
}
