// Orchestration between the API and the state reducers. Only these
// functions talk to the network; tab switching and graph inspection are
// pure state transitions and never fetch.

import { ApiError, FetchFn, postExplore, postQuery } from './api.js';
import { AppState, reduce } from './state.js';

export async function resolveQuery(
  sentState: AppState,
  text: string,
  fetchFn: FetchFn,
): Promise<AppState> {
  try {
    const response = await postQuery(fetchFn, text, sentState.sessionId);
    return reduce(sentState, { type: 'query_ok', response });
  } catch (error) {
    const message = error instanceof Error ? error.message : String(error);
    return reduce(sentState, { type: 'query_failed', error: message });
  }
}

export async function submitQuery(
  state: AppState,
  text: string,
  fetchFn: FetchFn,
): Promise<AppState> {
  const trimmed = text.trim();
  if (!trimmed || state.pending) return state;
  const sent = reduce(state, { type: 'query_sent', request: trimmed });
  return resolveQuery(sent, trimmed, fetchFn);
}

export async function stepBack(
  state: AppState,
  entryIndex: number,
  fetchFn: FetchFn,
): Promise<AppState> {
  const entry = state.entries[entryIndex];
  if (!entry?.response || entry.exploreExhausted) return state;
  const steps = entry.exploreStack.length + 1;
  try {
    const response = await postExplore(fetchFn, entry.response.graph_id, steps);
    return reduce(state, { type: 'explore_pushed', entry: entryIndex, response });
  } catch (error) {
    if (error instanceof ApiError && error.status === 416) {
      // walked past the start of the chain: disable the control
      return reduce(state, { type: 'explore_exhausted', entry: entryIndex });
    }
    throw error;
  }
}

export function stepForward(state: AppState, entryIndex: number): AppState {
  const entry = state.entries[entryIndex];
  if (!entry || entry.exploreStack.length === 0) return state; // pop on empty: no-op
  return reduce(state, { type: 'explore_popped', entry: entryIndex });
}

export function selectViz(state: AppState, entryIndex: number, vizIndex: number): AppState {
  return reduce(state, { type: 'viz_selected', entry: entryIndex, viz: vizIndex });
}

export function toggleGraph(state: AppState, entryIndex: number): AppState {
  return reduce(state, { type: 'graph_toggled', entry: entryIndex });
}
