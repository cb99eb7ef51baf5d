// Pure string renderers: (viz spec, value) -> HTML/SVG. No DOM access,
// so every form is testable without a browser and the page is a plain
// innerHTML projection of state.

import { GRID_COLUMNS, GRID_ROWS, STATE_TILES } from './usstates.js';
import { Value, VizSpec } from './types.js';

export function escapeHtml(raw: unknown): string {
  return String(raw)
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

export function fmt(n: number): string {
  if (!Number.isFinite(n)) return String(n);
  if (Number.isInteger(n) && Math.abs(n) < 1e15) return n.toLocaleString('en-US');
  return n.toLocaleString('en-US', { maximumSignificantDigits: 5 });
}

function heat(t: number): string {
  // light -> saturated blue ramp
  const clamped = Math.max(0, Math.min(1, t));
  const light = 92 - clamped * 52;
  return `hsl(214, 75%, ${light.toFixed(0)}%)`;
}

const W = 520;
const H = 230;
const PAD = { left: 56, right: 16, top: 14, bottom: 34 };

interface Scale {
  x: (i: number) => number;
  y: (v: number) => number;
  min: number;
  max: number;
}

function makeScale(xCount: number, values: number[], extra: number[] = []): Scale {
  const all = values.concat(extra);
  let min = Math.min(0, ...all);
  let max = Math.max(...all);
  if (min === max) {
    max = min + 1;
  }
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  return {
    x: (i) => PAD.left + (xCount <= 1 ? innerW / 2 : (i / (xCount - 1)) * innerW),
    y: (v) => PAD.top + innerH - ((v - min) / (max - min)) * innerH,
    min,
    max,
  };
}

function axis(scale: Scale, labels: (string | number)[]): string {
  const parts: string[] = [];
  const innerBottom = H - PAD.bottom;
  parts.push(
    `<line x1="${PAD.left}" y1="${innerBottom}" x2="${W - PAD.right}" y2="${innerBottom}" class="axis"/>`,
    `<line x1="${PAD.left}" y1="${PAD.top}" x2="${PAD.left}" y2="${innerBottom}" class="axis"/>`,
    `<text x="${PAD.left - 6}" y="${scale.y(scale.max) + 4}" class="tick" text-anchor="end">${escapeHtml(fmt(scale.max))}</text>`,
    `<text x="${PAD.left - 6}" y="${scale.y(scale.min) + 4}" class="tick" text-anchor="end">${escapeHtml(fmt(scale.min))}</text>`,
  );
  const step = Math.max(1, Math.ceil(labels.length / 8));
  labels.forEach((label, i) => {
    if (i % step !== 0 && i !== labels.length - 1) return;
    parts.push(
      `<text x="${scale.x(i)}" y="${H - PAD.bottom + 16}" class="tick" text-anchor="middle">${escapeHtml(label)}</text>`,
    );
  });
  return parts.join('');
}

function svg(body: string): string {
  return `<svg viewBox="0 0 ${W} ${H}" class="chart" role="img">${body}</svg>`;
}

// ---------------------------------------------------------------- forms

function renderTextAnswer(value: Value): string {
  const content =
    value.kind === 'text' ? value.text :
    value.kind === 'scalar' ? `${fmt(value.value ?? 0)}${value.unit ? ' ' + value.unit : ''}` :
    value.kind === 'boolean' ? (value.flag ? 'yes' : 'no') :
    JSON.stringify(value);
  return `<p class="text-answer">${escapeHtml(content)}</p>`;
}

function renderKpiCard(value: Value): string {
  const main = value.kind === 'scalar' ? fmt(value.value ?? 0) :
    value.kind === 'boolean' ? (value.flag ? 'yes' : 'no') : '?';
  const unit = value.unit ? `<span class="kpi-unit">${escapeHtml(value.unit)}</span>` : '';
  return `<div class="kpi-card"><span class="kpi-value">${escapeHtml(main)}</span>${unit}</div>`;
}

const MAX_TABLE_ROWS = 25;

function tableFromValue(value: Value): { headers: string[]; rows: (string | number)[][] } {
  if (value.kind === 'table') {
    return {
      headers: (value.schema ?? []).map((c) => c.name + (c.unit ? ` (${c.unit})` : '')),
      rows: value.rows ?? [],
    };
  }
  if (value.kind === 'series' || value.kind === 'geo_series') {
    const label = value.kind === 'geo_series' ? 'state' : value.label_kind ?? 'label';
    const header = (value.name ?? 'value') + (value.unit ? ` (${value.unit})` : '');
    return { headers: [label, header], rows: (value.points ?? []).map((p) => [p[0], p[1]]) };
  }
  if (value.kind === 'forecast') {
    const rows: (string | number)[][] = (value.history?.points ?? []).map((p) => [p[0], p[1], '']);
    for (const [label, predicted, stderr] of value.predicted ?? []) {
      rows.push([label, predicted, `predicted +/- ${fmt(stderr)}`]);
    }
    return { headers: ['label', 'value', 'note'], rows };
  }
  if (value.kind === 'anomaly_report') {
    const flagged = new Set(value.flagged ?? []);
    return {
      headers: ['label', 'value', 'flag'],
      rows: (value.series?.points ?? []).map((p, i) => [p[0], p[1], flagged.has(i) ? 'anomaly' : '']),
    };
  }
  if (value.kind === 'scalar') {
    return { headers: ['value', 'unit'], rows: [[value.value ?? '', value.unit ?? '']] };
  }
  if (value.kind === 'text') {
    return { headers: ['answer'], rows: [[value.text ?? '']] };
  }
  return { headers: ['answer'], rows: [[value.flag ? 'yes' : 'no']] };
}

function renderTableView(value: Value): string {
  const { headers, rows } = tableFromValue(value);
  const head = headers.map((h) => `<th>${escapeHtml(h)}</th>`).join('');
  const body = rows
    .slice(0, MAX_TABLE_ROWS)
    .map((row) => `<tr>${row.map((c) => `<td>${escapeHtml(typeof c === 'number' ? fmt(c) : c)}</td>`).join('')}</tr>`)
    .join('');
  const more = rows.length > MAX_TABLE_ROWS
    ? `<p class="muted">… ${rows.length - MAX_TABLE_ROWS} more rows</p>` : '';
  return `<table class="data-table"><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>${more}`;
}

function seriesPoints(value: Value): Array<[string | number, number]> {
  if (value.kind === 'series' || value.kind === 'geo_series') return value.points ?? [];
  if (value.kind === 'anomaly_report') return value.series?.points ?? [];
  if (value.kind === 'forecast') return value.history?.points ?? [];
  return [];
}

function renderBarChart(value: Value, spec: VizSpec): string {
  const points = seriesPoints(value);
  if (!points.length) return `<p class="muted">(empty series)</p>`;
  const values = points.map((p) => p[1]);
  const reference = typeof spec.binding['reference_line'] === 'number'
    ? [spec.binding['reference_line'] as number] : [];
  const scale = makeScale(points.length, values, reference);
  const innerW = W - PAD.left - PAD.right;
  const barW = Math.min(42, (innerW / points.length) * 0.72);
  const zero = scale.y(Math.max(0, scale.min));
  const bars = points
    .map((p, i) => {
      const top = Math.min(scale.y(p[1]), zero);
      const height = Math.max(1, Math.abs(scale.y(p[1]) - zero));
      return `<rect x="${scale.x(i) - barW / 2}" y="${top}" width="${barW}" height="${height}" class="bar"><title>${escapeHtml(p[0])}: ${escapeHtml(fmt(p[1]))}</title></rect>`;
    })
    .join('');
  return svg(bars + referenceLine(scale, spec) + axis(scale, points.map((p) => p[0])));
}

function polyline(points: Array<[string | number, number]>, scale: Scale, cls: string, offset = 0): string {
  const coords = points.map((p, i) => `${scale.x(i + offset)},${scale.y(p[1])}`).join(' ');
  return `<polyline points="${coords}" class="${cls}" fill="none"/>`;
}

function referenceLine(scale: Scale, spec: VizSpec): string {
  const reference = spec.binding['reference_line'];
  if (typeof reference !== 'number') return '';
  const y = scale.y(reference);
  return `<line x1="${PAD.left}" y1="${y}" x2="${W - PAD.right}" y2="${y}" class="reference"/>` +
    `<text x="${W - PAD.right}" y="${y - 4}" class="tick reference-label" text-anchor="end">${escapeHtml(fmt(reference))}</text>`;
}

function renderLineChart(value: Value, spec: VizSpec): string {
  const history = seriesPoints(value);
  const predicted: Array<[number, number, number]> =
    value.kind === 'forecast'
      ? value.predicted ?? []
      : ((spec.binding['predicted'] as Array<[number, number, number]>) ?? []);
  const overlay = spec.binding['overlay_series'] as
    | { name: string; points: Array<[string | number, number]> }
    | undefined;
  if (!history.length) return `<p class="muted">(empty series)</p>`;

  const labels: (string | number)[] = history.map((p) => p[0]).concat(predicted.map((p) => p[0]));
  const values = history.map((p) => p[1]).concat(predicted.map((p) => p[1]));
  const extra = (overlay?.points ?? []).map((p) => p[1]);
  const reference = typeof spec.binding['reference_line'] === 'number'
    ? [spec.binding['reference_line'] as number] : [];
  const scale = makeScale(labels.length, values, extra.concat(reference));

  const parts = [polyline(history, scale, 'line-history')];
  if (predicted.length) {
    const bridge: Array<[string | number, number]> = [history[history.length - 1]];
    for (const p of predicted) bridge.push([p[0], p[1]]);
    parts.push(polyline(bridge, scale, 'line-predicted', history.length - 1));
    predicted.forEach((p, i) => {
      parts.push(
        `<circle cx="${scale.x(history.length + i)}" cy="${scale.y(p[1])}" r="3.5" class="dot-predicted"><title>${escapeHtml(p[0])}: ${escapeHtml(fmt(p[1]))} predicted</title></circle>`,
      );
    });
  }
  if (overlay) {
    parts.push(polyline(overlay.points, scale, 'line-overlay'));
  }
  if (value.kind === 'anomaly_report') {
    const flagged = new Set(value.flagged ?? []);
    history.forEach((p, i) => {
      if (flagged.has(i)) {
        parts.push(`<circle cx="${scale.x(i)}" cy="${scale.y(p[1])}" r="4.5" class="dot-anomaly"/>`);
      }
    });
  }
  parts.push(referenceLine(scale, spec));
  parts.push(axis(scale, labels));
  return svg(parts.join(''));
}

function renderScatterPlot(value: Value, spec: VizSpec): string {
  const points = seriesPoints(value);
  if (!points.length) return `<p class="muted">(empty series)</p>`;
  const flagged = new Set(value.kind === 'anomaly_report' ? value.flagged ?? [] : []);
  const reference = typeof spec.binding['reference_line'] === 'number'
    ? [spec.binding['reference_line'] as number] : [];
  const scale = makeScale(points.length, points.map((p) => p[1]), reference);
  const dots = points
    .map((p, i) =>
      `<circle cx="${scale.x(i)}" cy="${scale.y(p[1])}" r="4" class="${flagged.has(i) ? 'dot-anomaly' : 'dot'}"><title>${escapeHtml(p[0])}: ${escapeHtml(fmt(p[1]))}</title></circle>`)
    .join('');
  return svg(dots + referenceLine(scale, spec) + axis(scale, points.map((p) => p[0])));
}

function renderPieChart(value: Value): string {
  const points = seriesPoints(value).filter((p) => p[1] > 0);
  if (!points.length) return `<p class="muted">(nothing to chart)</p>`;
  const total = points.reduce((acc, p) => acc + p[1], 0);
  const cx = 130;
  const cy = H / 2;
  const r = 88;
  let angle = -Math.PI / 2;
  const slices: string[] = [];
  const legend: string[] = [];
  points.forEach((p, i) => {
    const share = p[1] / total;
    const next = angle + share * 2 * Math.PI;
    const x1 = cx + r * Math.cos(angle);
    const y1 = cy + r * Math.sin(angle);
    const x2 = cx + r * Math.cos(next);
    const y2 = cy + r * Math.sin(next);
    const large = share > 0.5 ? 1 : 0;
    const color = heat(0.25 + 0.75 * (i / Math.max(1, points.length - 1)));
    slices.push(
      `<path d="M ${cx} ${cy} L ${x1} ${y1} A ${r} ${r} 0 ${large} 1 ${x2} ${y2} Z" fill="${color}" class="slice"><title>${escapeHtml(p[0])}: ${escapeHtml(fmt(p[1]))} (${(share * 100).toFixed(1)}%)</title></path>`,
    );
    legend.push(
      `<rect x="260" y="${26 + i * 20}" width="12" height="12" fill="${color}"/>` +
      `<text x="278" y="${37 + i * 20}" class="tick">${escapeHtml(p[0])} (${(share * 100).toFixed(1)}%)</text>`,
    );
    angle = next;
  });
  return svg(slices.join('') + legend.slice(0, 9).join(''));
}

function renderGeoHeatmap(value: Value): string {
  let points: Array<[string | number, number]>;
  if (value.kind === 'geo_series') {
    points = value.points ?? [];
  } else if (value.kind === 'table') {
    const schema = value.schema ?? [];
    const locIndex = schema.findIndex((c) => c.semantic_type === 'location');
    const numIndex = schema.findIndex((c) => c.semantic_type === 'numerical');
    points = (value.rows ?? []).map((row) => [row[locIndex], Number(row[numIndex])]);
  } else {
    return fallbackPanel(value, 'geo_heatmap expects regional data');
  }
  const byCode = new Map(points.map((p) => [String(p[0]).toUpperCase(), p[1]]));
  const numbers = points.map((p) => p[1]);
  const min = Math.min(...numbers);
  const max = Math.max(...numbers);
  const cell = 40;
  const gap = 3;
  const width = GRID_COLUMNS * (cell + gap) + gap;
  const height = GRID_ROWS * (cell + gap) + gap;
  const tiles = Object.entries(STATE_TILES)
    .map(([code, [col, row]]) => {
      const x = gap + col * (cell + gap);
      const y = gap + row * (cell + gap);
      const v = byCode.get(code);
      const fill = v === undefined ? '#e8e8e8'
        : heat(max === min ? 0.7 : (v - min) / (max - min));
      const title = v === undefined ? `${code}: no data` : `${code}: ${fmt(v)}`;
      return `<g class="state-tile" data-state="${code}">` +
        `<rect x="${x}" y="${y}" width="${cell}" height="${cell}" rx="4" fill="${fill}"><title>${escapeHtml(title)}</title></rect>` +
        `<text x="${x + cell / 2}" y="${y + cell / 2 + 4}" text-anchor="middle" class="state-code">${code}</text></g>`;
    })
    .join('');
  return `<svg viewBox="0 0 ${width} ${height}" class="chart geo" role="img">${tiles}</svg>`;
}

function renderMatrixHeatmap(value: Value): string {
  if (value.kind !== 'table') return fallbackPanel(value, 'matrix_heatmap expects a table');
  const schema = value.schema ?? [];
  const rows = value.rows ?? [];
  const numericIdx = schema
    .map((c, i) => ({ c, i }))
    .filter(({ c }) => c.semantic_type === 'numerical')
    .map(({ i }) => i);
  const labelIdx = schema.findIndex((c) => c.semantic_type !== 'numerical');
  const ranges = numericIdx.map((ci) => {
    const vs = rows.map((r) => Number(r[ci]));
    return [Math.min(...vs), Math.max(...vs)] as const;
  });
  const head = ['', ...numericIdx.map((ci) => schema[ci].name)]
    .map((h) => `<th>${escapeHtml(h)}</th>`).join('');
  const body = rows
    .slice(0, MAX_TABLE_ROWS)
    .map((row) => {
      const label = labelIdx >= 0 ? row[labelIdx] : '';
      const cells = numericIdx
        .map((ci, j) => {
          const v = Number(row[ci]);
          const [lo, hi] = ranges[j];
          const t = hi === lo ? 0.5 : (v - lo) / (hi - lo);
          return `<td class="matrix-cell" style="background:${heat(t)}">${escapeHtml(fmt(v))}</td>`;
        })
        .join('');
      return `<tr><th>${escapeHtml(label)}</th>${cells}</tr>`;
    })
    .join('');
  return `<table class="data-table matrix"><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>`;
}

export function fallbackPanel(value: Value, note = 'no renderer for this form'): string {
  return `<div class="fallback"><p class="muted">${escapeHtml(note)}; raw payload:</p>` +
    `<pre>${escapeHtml(JSON.stringify(value, null, 2))}</pre></div>`;
}

const RENDERERS: Record<string, (value: Value, spec: VizSpec) => string> = {
  text_answer: (v) => renderTextAnswer(v),
  kpi_card: (v) => renderKpiCard(v),
  table_view: (v) => renderTableView(v),
  bar_chart: renderBarChart,
  line_chart: renderLineChart,
  scatter_plot: renderScatterPlot,
  pie_chart: (v) => renderPieChart(v),
  geo_heatmap: (v) => renderGeoHeatmap(v),
  matrix_heatmap: (v) => renderMatrixHeatmap(v),
};

export function renderViz(spec: VizSpec, value: Value): string {
  const renderer = RENDERERS[spec.viz_type];
  const body = renderer ? renderer(value, spec) : fallbackPanel(value, `unknown form ${spec.viz_type}`);
  // stacked children describe additional panels bound to the final
  // answer; their own bindings carry the data they need
  const extra = (spec.stacked ?? []).length ? renderStacked(spec) : '';
  return body + extra;
}

function renderStacked(spec: VizSpec): string {
  return (spec.stacked ?? [])
    .map((child) => {
      if (child.viz_type === 'kpi_card' && typeof child.binding['value'] === 'number') {
        const unit = child.binding['unit'];
        return `<div class="stacked"><div class="kpi-card"><span class="kpi-value">${escapeHtml(fmt(child.binding['value'] as number))}</span>${unit ? `<span class="kpi-unit">${escapeHtml(String(unit))}</span>` : ''}</div></div>`;
      }
      return `<div class="stacked muted">${escapeHtml(child.title)} (${escapeHtml(child.viz_type)})</div>`;
    })
    .join('');
}
