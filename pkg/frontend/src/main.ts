// DOM wiring: one input box, one log element, event delegation onto the
// pure controllers. The page is re-projected from state after every
// transition.

import { resolveQuery, selectViz, stepBack, stepForward, toggleGraph } from './controller.js';
import { renderApp } from './page.js';
import { AppState, initialState, reduce } from './state.js';

let state: AppState = initialState();

const log = document.getElementById('log') as HTMLElement;
const form = document.getElementById('ask-form') as HTMLFormElement;
const input = document.getElementById('ask-input') as HTMLInputElement;
const send = document.getElementById('ask-send') as HTMLButtonElement;

function project(next: AppState): void {
  state = next;
  log.innerHTML = renderApp(state);
  // one in-flight query at a time
  input.disabled = state.pending;
  send.disabled = state.pending;
  log.scrollTop = log.scrollHeight;
}

form.addEventListener('submit', (event) => {
  event.preventDefault();
  const text = input.value.trim();
  if (!text || state.pending) return;
  input.value = '';
  project(reduce(state, { type: 'query_sent', request: text }));
  void resolveQuery(state, text, fetch.bind(window)).then(project);
});

log.addEventListener('click', (event) => {
  const target = (event.target as HTMLElement).closest('[data-action]') as HTMLElement | null;
  if (!target) return;
  const action = target.dataset.action;
  const entry = Number(target.dataset.entry ?? '-1');
  if (action === 'select-viz') {
    project(selectViz(state, entry, Number(target.dataset.viz ?? '0')));
  } else if (action === 'step-back') {
    void stepBack(state, entry, fetch.bind(window)).then(project);
  } else if (action === 'step-forward') {
    project(stepForward(state, entry));
  } else if (action === 'toggle-graph') {
    project(toggleGraph(state, entry));
  }
});

project(state);
