/** Payload types of the narramap service API. */

export interface SearchCandidate {
  iri: string;
  label: string;
  description: string;
}

export interface PropertyRow {
  property: string;
  label: string;
  count: number;
}

export interface LayerState {
  iri: string;
  label: string;
  kind: 'event' | 'object';
  feature_count: number;
}

export interface SessionState {
  session: string;
  start_nodes: string[];
  hops: { direction: Direction; property: string }[];
  layers: LayerState[];
  styled: boolean;
}

export type Direction = 'forward' | 'backward';

export interface InstantJson {
  iso: string;
  year: number;
  month: number | null;
  day: number | null;
  precision: number;
}

export type TemporalJson =
  | { kind: 'instant'; instant: InstantJson }
  | { kind: 'interval'; start: InstantJson | null; end: InstantJson | null }
  | null;

export interface FeatureProperties {
  entity: string;
  label: string;
  kind: 'event' | 'object';
  temporal: TemporalJson;
  symbolizers: string[];
  primary_symbolizer: string | null;
}

export interface GeometryJson {
  type: 'Point' | 'LineString' | 'Polygon';
  coordinates: unknown;
}

export interface MapFeature {
  type: 'Feature';
  id: string;
  geometry: GeometryJson | null;
  properties: FeatureProperties;
}

export interface MapLayer {
  iri: string;
  label: string;
  features: MapFeature[];
}

export interface SymbolizerJson {
  iri: string;
  geometry: 'point' | 'line' | 'polygon';
  marker_shape?: string;
  marker_size?: number;
  fill?: { color: string; opacity: number };
  stroke?: { color: string; width: number; opacity: number; dash?: number[] };
}

export interface LegendItemJson {
  label: string;
  symbolizer: string;
}

export interface TimelineJson {
  start: string | null;
  end: string | null;
  items: { item: string; label: string; start: string; end: string }[];
}

export interface MapDocument {
  layers: MapLayer[];
  symbolizers: Record<string, SymbolizerJson>;
  legend: { iri: string | null; items: LegendItemJson[] };
  timeline: TimelineJson;
}

export interface ConditionTrace {
  condition: string;
  satisfied: boolean | null;
  detail: string;
}

export interface RuleTrace {
  rule: string;
  satisfied: boolean;
  skipped: string | null;
  conditions: ConditionTrace[];
}

export interface ExplainResponse {
  item: string;
  traces: RuleTrace[];
}

export interface StyleReport {
  rules: Record<string, number>;
  style: string;
}

export interface EnrichReport {
  layer: string;
  items_updated: number;
  observations: Record<string, number>;
}
