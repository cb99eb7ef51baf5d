// Page-level HTML projection: chat entries with viz tabs, diagnostics,
// the graph inspector, and step-back exploration controls.

import { escapeHtml, renderViz } from './render.js';
import { AppState, ChatEntry } from './state.js';
import { GraphDocument, QueryResponse } from './types.js';

function renderTabs(entryIndex: number, entry: ChatEntry): string {
  const ranking = entry.response?.viz_spec.ranking ?? [];
  return ranking
    .map((r, i) => {
      const active = i === entry.selectedViz ? ' active' : '';
      return `<button class="tab${active}" data-action="select-viz" data-entry="${entryIndex}" data-viz="${i}">` +
        `${escapeHtml(r.viz_type)} <span class="votes">${r.votes}</span></button>`;
    })
    .join('');
}

function renderGraphInspector(graph: GraphDocument): string {
  const nodes = graph.nodes
    .map((n) => {
      const params = Object.entries(n.params)
        .map(([k, v]) => `${escapeHtml(k)}=${escapeHtml(JSON.stringify(v))}`)
        .join(' ');
      const sink = n.id === graph.sink ? ' (sink)' : '';
      return `<li><code>${escapeHtml(n.id)}</code>${sink} ${params}</li>`;
    })
    .join('');
  const edges = graph.edges
    .map((e) => `<li><code>${escapeHtml(e.from)} -&gt; ${escapeHtml(e.to)}</code> slot ${e.slot}</li>`)
    .join('');
  return `<div class="graph-inspector">` +
    `<p class="graph-stats">${graph.nodes.length} nodes, ${graph.edges.length} edges, ` +
    `depth ${graph.depth}, relevance ${graph.relevance.toFixed(3)}, ` +
    `${graph.complete ? 'complete' : 'partial'}</p>` +
    `<ul class="graph-nodes">${nodes}</ul><ul class="graph-edges">${edges}</ul></div>`;
}

function renderSelectedViz(entry: ChatEntry): string {
  const response = entry.response as QueryResponse;
  const ranking = response.viz_spec.ranking;
  const chosen = ranking[entry.selectedViz] ?? ranking[0];
  // re-render the stored value client-side under the selected form
  const spec = { ...response.viz_spec, viz_type: chosen.viz_type };
  return renderViz(spec, response.answer);
}

function renderExplorePanel(entryIndex: number, entry: ChatEntry): string {
  const top = entry.exploreStack[entry.exploreStack.length - 1];
  const backDisabled = entry.exploreExhausted ? ' disabled' : '';
  const fwdDisabled = entry.exploreStack.length === 0 ? ' disabled' : '';
  const panel = top
    ? `<div class="explore-view"><p class="muted">step ${entry.exploreStack.length} back ` +
      `(<code>${escapeHtml(top.node_id)}</code>)</p>${renderViz(top.viz_spec, top.value)}</div>`
    : '';
  return `<div class="explore-controls">` +
    `<button data-action="step-back" data-entry="${entryIndex}"${backDisabled}>&larr; step back</button>` +
    `<button data-action="step-forward" data-entry="${entryIndex}"${fwdDisabled}>step forward &rarr;</button>` +
    `<button data-action="toggle-graph" data-entry="${entryIndex}">` +
    `${entry.graphOpen ? 'hide' : 'show'} graph</button>` +
    `</div>${panel}`;
}

export function renderEntry(entry: ChatEntry, entryIndex: number): string {
  const head = `<p class="request">&gt; ${escapeHtml(entry.request)}</p>`;
  if (entry.error) {
    return `<section class="entry error">${head}<p class="error-text">${escapeHtml(entry.error)}</p></section>`;
  }
  if (!entry.response) {
    return `<section class="entry pending">${head}<p class="muted">thinking…</p></section>`;
  }
  const diagnostics = entry.response.diagnostics
    .map((d) => `<p class="diagnostic">${escapeHtml(d)}</p>`)
    .join('');
  const graph = entry.graphOpen ? renderGraphInspector(entry.response.graph) : '';
  return `<section class="entry" data-entry="${entryIndex}">` +
    head +
    `<div class="tabs">${renderTabs(entryIndex, entry)}</div>` +
    `<div class="viz">${renderSelectedViz(entry)}</div>` +
    diagnostics +
    renderExplorePanel(entryIndex, entry) +
    graph +
    `</section>`;
}

export function renderApp(state: AppState): string {
  const entries = state.entries.map((entry, i) => renderEntry(entry, i)).join('');
  return entries || `<p class="muted">Ask something about the table, e.g. ` +
    `<em>What was the price of honey in Alabama in 2010?</em></p>`;
}
