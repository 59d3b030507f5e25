/** Timeline window logic.
 *
 * Filtering is purely presentational: the feature set never changes on
 * the server, the view just hides features whose temporal extent does
 * not intersect the selected window.
 */

import type { InstantJson, MapFeature, TemporalJson, TimelineJson } from './types.js';

export interface TimeWindow {
  from: string | null; // ISO date, inclusive
  to: string | null;
}

/** Parse an ISO date (possibly year- or month-truncated, BCE-safe). */
export function dateKey(iso: string, roundUp = false): number {
  const match = /^(-?\d{1,6})(?:-(\d{2}))?(?:-(\d{2}))?/.exec(iso);
  if (!match) {
    return Number.NaN;
  }
  const year = parseInt(match[1], 10);
  const month = match[2] ? parseInt(match[2], 10) : roundUp ? 12 : 1;
  const day = match[3] ? parseInt(match[3], 10) : roundUp ? 31 : 1;
  return year * 10000 + month * 100 + day;
}

function instantBounds(instant: InstantJson): [number, number] {
  return [dateKey(instant.iso), dateKey(instant.iso, true)];
}

export function temporalBounds(temporal: TemporalJson): [number, number] | null {
  if (!temporal) {
    return null;
  }
  if (temporal.kind === 'instant') {
    return instantBounds(temporal.instant);
  }
  const start = temporal.start ? instantBounds(temporal.start) : null;
  const end = temporal.end ? instantBounds(temporal.end) : null;
  if (!start && !end) {
    return null;
  }
  return [(start ?? end)![0], (end ?? start)![1]];
}

/** Closed-interval intersection; features without temporal data are
 * always visible (background layers must not vanish under the slider). */
export function featureVisible(feature: MapFeature, window: TimeWindow): boolean {
  const bounds = temporalBounds(feature.properties.temporal);
  if (!bounds) {
    return true;
  }
  const [lo, hi] = bounds;
  if (window.from !== null && hi < dateKey(window.from)) {
    return false;
  }
  if (window.to !== null && lo > dateKey(window.to, true)) {
    return false;
  }
  return true;
}

export function fullWindow(timeline: TimelineJson): TimeWindow {
  return { from: timeline.start, to: timeline.end };
}

/** Map a slider position in [0, 1] onto a date between the extent ends. */
export function sliderDate(timeline: TimelineJson, position: number): string | null {
  if (!timeline.start || !timeline.end) {
    return null;
  }
  const lo = Date.parse(timeline.start);
  const hi = Date.parse(timeline.end);
  const t = new Date(lo + (hi - lo) * Math.min(1, Math.max(0, position)));
  return t.toISOString().slice(0, 10);
}
