/** GeoJSON -> SVG rendering with symbolizer styling.
 *
 * The map is a plain equirectangular projection; each feature's primary
 * symbolizer maps 1:1 onto marker/stroke/fill attributes. Pure string
 * output, so rendering is testable without a browser.
 */

import { featureVisible, TimeWindow } from './timeline.js';
import type { MapDocument, MapFeature, SymbolizerJson } from './types.js';

export interface Viewport {
  width: number;
  height: number;
}

const DEFAULT_VIEWPORT: Viewport = { width: 960, height: 480 };

export function project(lon: number, lat: number, view: Viewport): [number, number] {
  const x = ((lon + 180) / 360) * view.width;
  const y = ((90 - lat) / 180) * view.height;
  return [round2(x), round2(y)];
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function markerShape(
  shape: string,
  x: number,
  y: number,
  size: number,
  fill: string,
  opacity: number,
): string {
  const half = size / 2;
  const style = `fill="${fill}" fill-opacity="${opacity}"`;
  switch (shape) {
    case 'square':
      return `<rect x="${round2(x - half)}" y="${round2(y - half)}" width="${size}" height="${size}" ${style}/>`;
    case 'diamond': {
      const points = `${x},${round2(y - half)} ${round2(x + half)},${y} ${x},${round2(y + half)} ${round2(x - half)},${y}`;
      return `<polygon points="${points}" ${style}/>`;
    }
    case 'triangle': {
      const points = `${x},${round2(y - half)} ${round2(x + half)},${round2(y + half)} ${round2(x - half)},${round2(y + half)}`;
      return `<polygon points="${points}" ${style}/>`;
    }
    default:
      return `<circle cx="${x}" cy="${y}" r="${half}" ${style}/>`;
  }
}

function featureMarkup(
  feature: MapFeature,
  symbolizers: Record<string, SymbolizerJson>,
  view: Viewport,
): string {
  if (!feature.geometry) {
    return '';
  }
  const symbolizer = feature.properties.primary_symbolizer
    ? symbolizers[feature.properties.primary_symbolizer]
    : undefined;
  const title = `<title>${escapeXml(feature.properties.label || feature.id)}</title>`;
  if (feature.geometry.type === 'Point') {
    const [lon, lat] = feature.geometry.coordinates as [number, number];
    const [x, y] = project(lon, lat, view);
    const shape = symbolizer?.marker_shape ?? 'circle';
    const size = symbolizer?.marker_size ?? 6;
    const fill = symbolizer?.fill?.color ?? '#555555';
    const opacity = symbolizer?.fill?.opacity ?? 0.8;
    return (
      `<g class="feature" data-id="${escapeXml(feature.id)}" data-entity="${escapeXml(feature.properties.entity)}">` +
      title +
      markerShape(shape, x, y, size, fill, opacity) +
      `</g>`
    );
  }
  if (feature.geometry.type === 'LineString') {
    const coords = feature.geometry.coordinates as [number, number][];
    const points = coords.map(([lon, lat]) => project(lon, lat, view).join(',')).join(' ');
    const stroke = symbolizer?.stroke;
    return (
      `<g class="feature" data-id="${escapeXml(feature.id)}">` +
      title +
      `<polyline points="${points}" fill="none" stroke="${stroke?.color ?? '#333333'}"` +
      ` stroke-width="${stroke?.width ?? 1.5}" stroke-opacity="${stroke?.opacity ?? 1}"/>` +
      `</g>`
    );
  }
  const rings = feature.geometry.coordinates as [number, number][][];
  const path = rings
    .map(
      (ring) =>
        'M' + ring.map(([lon, lat]) => project(lon, lat, view).join(' ')).join(' L') + ' Z',
    )
    .join(' ');
  return (
    `<g class="feature" data-id="${escapeXml(feature.id)}">` +
    title +
    `<path d="${path}" fill="${symbolizer?.fill?.color ?? '#cccccc'}"` +
    ` fill-opacity="${symbolizer?.fill?.opacity ?? 0.5}" stroke="${symbolizer?.stroke?.color ?? '#333333'}"/>` +
    `</g>`
  );
}

/** Render the visible features of every layer into one SVG document. */
export function renderMap(
  document: MapDocument,
  window: TimeWindow,
  view: Viewport = DEFAULT_VIEWPORT,
): string {
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${view.width} ${view.height}"` +
      ` width="${view.width}" height="${view.height}">`,
    `<rect width="${view.width}" height="${view.height}" fill="#eef6fb"/>`,
  ];
  for (const layer of document.layers) {
    parts.push(`<g class="layer" data-layer="${escapeXml(layer.iri)}">`);
    for (const feature of layer.features) {
      if (featureVisible(feature, window)) {
        parts.push(featureMarkup(feature, document.symbolizers, view));
      }
    }
    parts.push('</g>');
  }
  parts.push('</svg>');
  return parts.join('\n');
}

/** Feature ids visible under a window, for tests and hit-testing. */
export function visibleFeatureIds(document: MapDocument, window: TimeWindow): string[] {
  const ids: string[] = [];
  for (const layer of document.layers) {
    for (const feature of layer.features) {
      if (featureVisible(feature, window)) {
        ids.push(feature.id);
      }
    }
  }
  return ids.sort();
}
