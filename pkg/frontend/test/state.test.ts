// State transitions are pure and replayable; tab switching is purely
// client-side.

import { describe, expect, it } from 'vitest';
import { readFileSync } from 'node:fs';
import { fileURLToPath } from 'node:url';
import { dirname, join } from 'node:path';

import { selectViz, toggleGraph } from '../src/controller.js';
import { renderApp, renderEntry } from '../src/page.js';
import { AppEvent, initialState, reduce, replay } from '../src/state.js';
import { QueryResponse } from '../src/types.js';

const here = dirname(fileURLToPath(import.meta.url));
const fixtures = JSON.parse(readFileSync(join(here, 'fixtures', 'fixtures.json'), 'utf-8'));
const QUERY: QueryResponse = fixtures['query_response'];
const GEO_QUERY: QueryResponse = fixtures['query_response_geo'];

function answeredState() {
  let state = initialState();
  state = reduce(state, { type: 'query_sent', request: 'price in Alabama in 2010' });
  state = reduce(state, { type: 'query_ok', response: QUERY });
  return state;
}

describe('state transitions', () => {
  it('query lifecycle fills the last entry', () => {
    const state = answeredState();
    expect(state.pending).toBe(false);
    expect(state.entries).toHaveLength(1);
    expect(state.entries[0].response?.answer.kind).toBe('scalar');
    expect(state.sessionId).toBe(QUERY.session_id);
  });

  it('selecting a tab changes only the selection index', () => {
    const before = answeredState();
    const after = selectViz(before, 0, 1);
    expect(after.entries[0].selectedViz).toBe(1);
    expect(after.entries[0].response).toBe(before.entries[0].response);
    // original state untouched (purity)
    expect(before.entries[0].selectedViz).toBe(0);
  });

  it('out-of-range tab selection is ignored', () => {
    const state = answeredState();
    const limit = QUERY.viz_spec.ranking.length;
    expect(selectViz(state, 0, limit).entries[0].selectedViz).toBe(0);
    expect(selectViz(state, 0, -1).entries[0].selectedViz).toBe(0);
  });

  it('replaying an event log reproduces the state', () => {
    const events: AppEvent[] = [
      { type: 'query_sent', request: 'a' },
      { type: 'query_ok', response: QUERY },
      { type: 'viz_selected', entry: 0, viz: 1 },
      { type: 'query_sent', request: 'b' },
      { type: 'query_ok', response: GEO_QUERY },
      { type: 'graph_toggled', entry: 1 },
    ];
    const once = replay(events);
    const twice = replay(events);
    expect(JSON.stringify(once)).toBe(JSON.stringify(twice));
    expect(renderApp(once)).toBe(renderApp(twice));
    expect(once.entries[0].selectedViz).toBe(1);
    expect(once.entries[1].graphOpen).toBe(true);
  });

  it('failed queries record the error on the entry', () => {
    let state = initialState();
    state = reduce(state, { type: 'query_sent', request: 'asdf' });
    state = reduce(state, { type: 'query_failed', error: 'could not understand' });
    expect(state.pending).toBe(false);
    expect(state.entries[0].error).toContain('understand');
    expect(renderEntry(state.entries[0], 0)).toContain('could not understand');
  });
});

describe('rendering from state', () => {
  it('tab switching re-renders the stored value under the chosen form', () => {
    let state = initialState();
    state = reduce(state, { type: 'query_sent', request: 'per state' });
    state = reduce(state, { type: 'query_ok', response: GEO_QUERY });
    const first = renderEntry(state.entries[0], 0);
    expect(first).toContain('state-tile'); // geo heatmap by default
    const second = renderEntry(selectViz(state, 0, 1).entries[0], 0);
    expect(second).not.toBe(first);
  });

  it('graph inspector shows node and edge counts from the document', () => {
    const state = toggleGraph(answeredState(), 0);
    const html = renderEntry(state.entries[0], 0);
    const doc = QUERY.graph;
    expect(html).toContain(`${doc.nodes.length} nodes, ${doc.edges.length} edges`);
    for (const node of doc.nodes) {
      expect(html).toContain(node.id);
    }
  });

  it('active tab is highlighted', () => {
    const html = renderEntry(answeredState().entries[0], 0);
    expect(html).toContain('tab active');
  });
});
