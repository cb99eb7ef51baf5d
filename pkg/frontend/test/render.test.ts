// Golden-fixture rendering: every visualization form must render its
// wire-format payload without throwing, producing the expected markers.

import { describe, expect, it } from 'vitest';
import { readFileSync } from 'node:fs';
import { fileURLToPath } from 'node:url';
import { dirname, join } from 'node:path';

import { fallbackPanel, renderViz } from '../src/render.js';
import { Value, VizSpec } from '../src/types.js';

const here = dirname(fileURLToPath(import.meta.url));
const fixtures = JSON.parse(readFileSync(join(here, 'fixtures', 'fixtures.json'), 'utf-8'));

function fixture(name: string): { value: Value; viz_spec: VizSpec } {
  const entry = fixtures[name];
  expect(entry, `fixture ${name}`).toBeTruthy();
  return entry;
}

const NINE_FORMS = [
  'text_answer',
  'kpi_card',
  'table_view',
  'bar_chart',
  'line_chart',
  'scatter_plot',
  'pie_chart',
  'geo_heatmap',
  'matrix_heatmap',
];

describe('all nine visualization forms render from golden fixtures', () => {
  for (const form of NINE_FORMS) {
    it(`renders ${form}`, () => {
      const { value, viz_spec } = fixture(form);
      expect(viz_spec.viz_type).toBe(form);
      const html = renderViz(viz_spec, value);
      expect(html.length).toBeGreaterThan(20);
      expect(html).not.toContain('undefined');
    });
  }

  it('kpi card shows the number and unit', () => {
    const { value, viz_spec } = fixture('kpi_card');
    const html = renderViz(viz_spec, value);
    expect(html).toContain('2.4');
    expect(html).toContain('USD/lb');
  });

  it('table view renders header cells and rows', () => {
    const { value, viz_spec } = fixture('table_view');
    const html = renderViz(viz_spec, value);
    expect(html).toContain('<table');
    expect(html).toContain('Alabama');
    expect(html).toContain('priceperlb');
  });

  it('bar chart draws one bar per point', () => {
    const { value, viz_spec } = fixture('bar_chart');
    const html = renderViz(viz_spec, value);
    const bars = html.match(/<rect[^>]*class="bar"/g) ?? [];
    expect(bars.length).toBe(value.points!.length);
  });

  it('line chart draws the history polyline', () => {
    const { value, viz_spec } = fixture('line_chart');
    const html = renderViz(viz_spec, value);
    expect(html).toContain('line-history');
  });

  it('forecast renders a dashed predicted segment', () => {
    const { value, viz_spec } = fixture('forecast_line');
    expect(value.kind).toBe('forecast');
    const html = renderViz(viz_spec, value);
    expect(html).toContain('line-predicted');
    expect(html).toContain('dot-predicted');
  });

  it('scatter plot marks flagged anomalies', () => {
    const { value, viz_spec } = fixture('scatter_plot');
    const html = renderViz(viz_spec, value);
    const anomalies = html.match(/dot-anomaly/g) ?? [];
    expect(anomalies.length).toBe(value.flagged!.length);
  });

  it('pie chart draws one slice per point with shares', () => {
    const { value, viz_spec } = fixture('pie_chart');
    const html = renderViz(viz_spec, value);
    const slices = html.match(/class="slice"/g) ?? [];
    expect(slices.length).toBe(value.points!.length);
    expect(html).toContain('%');
  });

  it('geo heatmap shades the named states', () => {
    const { value, viz_spec } = fixture('geo_heatmap');
    const html = renderViz(viz_spec, value);
    for (const [code] of value.points!) {
      expect(html).toContain(`data-state="${code}"`);
    }
    // unshaded states still appear as gray tiles
    expect(html).toContain('data-state="WY"');
    const tiles = html.match(/state-tile/g) ?? [];
    expect(tiles.length).toBe(50);
  });

  it('matrix heatmap colors numeric cells', () => {
    const { value, viz_spec } = fixture('matrix_heatmap');
    const html = renderViz(viz_spec, value);
    const cells = html.match(/matrix-cell/g) ?? [];
    expect(cells.length).toBe(value.rows!.length * 2);
  });
});

describe('overlays and fallbacks', () => {
  it('mean overlay draws a reference line at the answer', () => {
    const { value, viz_spec } = fixture('mean_overlay_explore');
    const html = renderViz(viz_spec, value);
    expect(html).toContain('class="reference"');
    expect(viz_spec.binding['reference_line']).toBeTypeOf('number');
  });

  it('stacked overlay renders the extra panel', () => {
    const { value, viz_spec } = fixture('stacked_overlay');
    const html = renderViz(viz_spec, value);
    expect(html).toContain('stacked');
  });

  it('unknown form falls back to the raw JSON panel', () => {
    const { value } = fixture('kpi_card');
    const spec: VizSpec = {
      viz_type: 'hologram',
      binding: {},
      title: 't',
      ranking: [],
      diagnostics: [],
    };
    const html = renderViz(spec, value);
    expect(html).toContain('fallback');
    expect(html).toContain('&quot;kind&quot;');
  });

  it('fallback panel escapes content', () => {
    const html = fallbackPanel({ kind: 'text', text: '<script>alert(1)</script>' } as Value);
    expect(html).not.toContain('<script>');
  });

  it('labels are escaped in charts', () => {
    const value: Value = {
      kind: 'series',
      points: [['<img onerror=x>', 1.0], ['b', 2.0]],
      label_kind: 'categorical',
    };
    const spec: VizSpec = {
      viz_type: 'bar_chart', binding: {}, title: 't', ranking: [], diagnostics: [],
    };
    expect(renderViz(spec, value)).not.toContain('<img');
  });
});
