import { describe, expect, it } from 'vitest';

import { project, renderMap, visibleFeatureIds } from '../src/mapview.js';
import { dateKey, featureVisible, temporalBounds } from '../src/timeline.js';
import type { MapDocument, MapFeature } from '../src/types.js';

function feature(id: string, lon: number, lat: number, temporal: MapFeature['properties']['temporal'] = null): MapFeature {
  return {
    type: 'Feature',
    id,
    geometry: { type: 'Point', coordinates: [lon, lat] },
    properties: {
      entity: id,
      label: id,
      kind: 'event',
      temporal,
      symbolizers: [],
      primary_symbolizer: null,
    },
  };
}

const instant = (iso: string, year: number) => ({
  kind: 'instant' as const,
  instant: { iso, year, month: null, day: null, precision: 9 },
});

describe('projection', () => {
  it('maps the origin to the viewport center', () => {
    expect(project(0, 0, { width: 960, height: 480 })).toEqual([480, 240]);
  });
  it('maps corners to corners', () => {
    expect(project(-180, 90, { width: 960, height: 480 })).toEqual([0, 0]);
    expect(project(180, -90, { width: 960, height: 480 })).toEqual([960, 480]);
  });
});

describe('date keys and windows', () => {
  it('orders truncated dates correctly', () => {
    expect(dateKey('1939')).toBeLessThan(dateKey('1939-09-01'));
    expect(dateKey('1939', true)).toBeGreaterThan(dateKey('1939-09-01'));
    expect(dateKey('-0044-03-15')).toBeLessThan(dateKey('1939'));
  });

  it('interval bounds use both ends', () => {
    const bounds = temporalBounds({
      kind: 'interval',
      start: { iso: '1939-09-01', year: 1939, month: 9, day: 1, precision: 11 },
      end: { iso: '1945-09-02', year: 1945, month: 9, day: 2, precision: 11 },
    });
    expect(bounds).toEqual([19390901, 19450902]);
  });

  it('features without temporal data are always visible', () => {
    const f = feature('x', 0, 0, null);
    expect(featureVisible(f, { from: '2100-01-01', to: '2100-12-31' })).toBe(true);
  });

  it('year-precision instants intersect touching windows', () => {
    const f = feature('x', 0, 0, instant('1939', 1939));
    expect(featureVisible(f, { from: '1939-12-31', to: '1950-01-01' })).toBe(true);
    expect(featureVisible(f, { from: '1940-01-01', to: null })).toBe(false);
  });
});

describe('renderMap', () => {
  const doc: MapDocument = {
    layers: [
      {
        iri: 'https://layer/1',
        label: 'Events',
        features: [
          feature('a', -5.9866, 37.3886, instant('1940', 1940)),
          feature('b', 10, 50, instant('1930', 1930)),
        ],
      },
    ],
    symbolizers: {
      s0: {
        iri: 's0',
        geometry: 'point',
        marker_shape: 'square',
        marker_size: 10,
        fill: { color: '#d62728', opacity: 0.9 },
      },
    },
    legend: { iri: null, items: [{ label: 'rule', symbolizer: 's0' }] },
    timeline: { start: '1930', end: '1940', items: [] },
  };

  it('renders visible features only', () => {
    const all = renderMap(doc, { from: null, to: null });
    expect(all.match(/class="feature"/g)?.length).toBe(2);
    const windowed = renderMap(doc, { from: '1935-01-01', to: null });
    expect(windowed.match(/class="feature"/g)?.length).toBe(1);
    expect(visibleFeatureIds(doc, { from: '1935-01-01', to: null })).toEqual(['a']);
  });

  it('applies the primary symbolizer 1:1', () => {
    const styled: MapDocument = JSON.parse(JSON.stringify(doc));
    styled.layers[0].features[0].properties.primary_symbolizer = 's0';
    const svg = renderMap(styled, { from: null, to: null });
    expect(svg).toContain('<rect');
    expect(svg).toContain('fill="#d62728"');
    expect(svg).toContain('fill-opacity="0.9"');
  });

  it('escapes labels in titles', () => {
    const hostile: MapDocument = JSON.parse(JSON.stringify(doc));
    hostile.layers[0].features[0].properties.label = '<script>"x"</script>';
    const svg = renderMap(hostile, { from: null, to: null });
    expect(svg).not.toContain('<script>');
    expect(svg).toContain('&lt;script&gt;');
  });
});
