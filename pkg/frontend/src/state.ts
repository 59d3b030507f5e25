/** Client-side exploration state and the controller driving it.
 *
 * The controller mirrors the server session: a breadcrumb of chosen
 * hops (always the same length as the server-side path), the current
 * ranked property list, layers, the active time window, and the
 * legend-bearing map document. At most one mutating request is in
 * flight at a time; `busy` is true while it runs so views can disable
 * controls.
 */

import { ServiceClient } from './api.js';
import { fullWindow, TimeWindow } from './timeline.js';
import type {
  Direction,
  MapDocument,
  PropertyRow,
  RuleTrace,
  SearchCandidate,
} from './types.js';

export interface Breadcrumb {
  direction: Direction;
  property: string;
  label: string;
}

export interface ExplorationState {
  session: string | null;
  profile: string | null;
  startNode: SearchCandidate | null;
  candidates: SearchCandidate[];
  direction: Direction;
  properties: PropertyRow[];
  breadcrumb: Breadcrumb[];
  layers: { iri: string; label: string; featureCount: number }[];
  enrichLayer: string | null;
  enrichable: PropertyRow[];
  document: MapDocument | null;
  window: TimeWindow;
  busy: boolean;
  error: string | null;
}

export type Listener = (state: ExplorationState) => void;

export class ExplorationController {
  readonly state: ExplorationState = {
    session: null,
    profile: null,
    startNode: null,
    candidates: [],
    direction: 'forward',
    properties: [],
    breadcrumb: [],
    layers: [],
    enrichLayer: null,
    enrichable: [],
    document: null,
    window: { from: null, to: null },
    busy: false,
    error: null,
  };

  private listeners: Listener[] = [];

  constructor(private client: ServiceClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Runs one mutating call; rejects re-entry while a call is pending. */
  private async mutate<T>(action: () => Promise<T>): Promise<T | undefined> {
    if (this.state.busy) {
      return undefined;
    }
    this.state.busy = true;
    this.state.error = null;
    this.notify();
    try {
      return await action();
    } catch (error) {
      this.state.error = error instanceof Error ? error.message : String(error);
      return undefined;
    } finally {
      this.state.busy = false;
      this.notify();
    }
  }

  async start(profile: string): Promise<void> {
    await this.mutate(async () => {
      this.state.session = await this.client.createSession(profile);
      this.state.profile = profile;
      this.state.breadcrumb = [];
      this.state.layers = [];
      this.state.document = null;
    });
  }

  private get session(): string {
    if (!this.state.session) {
      throw new Error('no session started');
    }
    return this.state.session;
  }

  async search(text: string): Promise<void> {
    if (!text.trim()) {
      this.state.candidates = [];
      this.notify();
      return;
    }
    await this.mutate(async () => {
      this.state.candidates = await this.client.search(this.session, text);
    });
  }

  async pickStartNode(candidate: SearchCandidate): Promise<void> {
    await this.mutate(async () => {
      await this.client.setStartNodes(this.session, [candidate.iri]);
      this.state.startNode = candidate;
      this.state.candidates = [];
      this.state.breadcrumb = [];
      await this.refreshProperties();
    });
  }

  async setDirection(direction: Direction): Promise<void> {
    this.state.direction = direction;
    await this.mutate(() => this.refreshProperties());
  }

  private async refreshProperties(): Promise<void> {
    this.state.properties = await this.client.properties(this.session, this.state.direction);
  }

  /** Add one hop; the next-degree property list refreshes immediately. */
  async addHop(row: PropertyRow): Promise<void> {
    await this.mutate(async () => {
      const result = await this.client.addHop(this.session, this.state.direction, row.property);
      this.state.breadcrumb.push({
        direction: this.state.direction,
        property: row.property,
        label: row.label,
      });
      if (result.degree !== this.state.breadcrumb.length) {
        throw new Error(
          `path length mismatch: server ${result.degree}, client ${this.state.breadcrumb.length}`,
        );
      }
      await this.refreshProperties();
    });
  }

  async resetPath(): Promise<void> {
    await this.mutate(async () => {
      await this.client.resetPath(this.session);
      this.state.breadcrumb = [];
      await this.refreshProperties();
    });
  }

  async retrieve(): Promise<void> {
    await this.mutate(async () => {
      const layer = await this.client.retrieve(this.session);
      this.upsertLayer(layer.layer, layer.label, layer.feature_count);
      await this.refreshDocument();
    });
  }

  async closure(root: string, down: string, up?: string, maxDepth?: number): Promise<void> {
    await this.mutate(async () => {
      const layer = await this.client.closure(this.session, root, down, up, maxDepth);
      this.upsertLayer(layer.layer, layer.label, layer.feature_count);
      await this.refreshDocument();
    });
  }

  /** Open the enrich dialog: list the properties available on a layer. */
  async loadEnrichable(layer: string): Promise<void> {
    await this.mutate(async () => {
      this.state.enrichable = await this.client.enrichableProperties(this.session, layer);
      this.state.enrichLayer = layer;
    });
  }

  async enrich(layer: string, properties: string[]): Promise<void> {
    await this.mutate(async () => {
      await this.client.enrich(this.session, layer, properties);
      this.state.enrichLayer = null;
      this.state.enrichable = [];
      await this.refreshDocument();
    });
  }

  async applyStyle(rulebase?: unknown): Promise<void> {
    await this.mutate(async () => {
      await this.client.applyStyle(this.session, rulebase);
      await this.refreshDocument();
    });
  }

  async explain(item: string): Promise<RuleTrace[] | undefined> {
    const payload = await this.client.explain(this.session, item);
    return payload.traces;
  }

  private upsertLayer(iri: string, label: string, featureCount: number): void {
    const existing = this.state.layers.find((l) => l.iri === iri);
    if (existing) {
      existing.featureCount = featureCount;
      existing.label = label;
    } else {
      this.state.layers.push({ iri, label, featureCount });
    }
  }

  private async refreshDocument(): Promise<void> {
    this.state.document = await this.client.mapDocument(this.session);
    this.state.window = fullWindow(this.state.document.timeline);
  }

  /** Purely presentational: only the view's idea of the window moves. */
  setWindow(window: TimeWindow): void {
    this.state.window = window;
    this.notify();
  }

  restoreFullWindow(): void {
    if (this.state.document) {
      this.state.window = fullWindow(this.state.document.timeline);
    }
    this.notify();
  }
}
