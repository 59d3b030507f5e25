/** Typed client for the narramap service.
 *
 * All queries originate server-side; this client only moves JSON. The
 * fetch implementation is injectable so tests can replay canned
 * responses without a network.
 */

import type {
  Direction,
  EnrichReport,
  ExplainResponse,
  MapDocument,
  PropertyRow,
  SearchCandidate,
  SessionState,
  StyleReport,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ServiceClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'Content-Type': 'application/json' } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = await response.json();
        detail = payload.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ServiceError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  async createSession(profile: string): Promise<string> {
    const payload = await this.request<{ session: string }>('POST', '/sessions', { profile });
    return payload.session;
  }

  sessionState(session: string): Promise<SessionState> {
    return this.request('GET', `/sessions/${session}`);
  }

  async search(session: string, text: string): Promise<SearchCandidate[]> {
    const payload = await this.request<{ candidates: SearchCandidate[] }>(
      'GET',
      `/sessions/${session}/search?q=${encodeURIComponent(text)}`,
    );
    return payload.candidates;
  }

  async properties(session: string, direction: Direction): Promise<PropertyRow[]> {
    const payload = await this.request<{ properties: PropertyRow[] }>(
      'GET',
      `/sessions/${session}/properties?direction=${direction}`,
    );
    return payload.properties;
  }

  async enrichableProperties(session: string, layer: string): Promise<PropertyRow[]> {
    const payload = await this.request<{ properties: PropertyRow[] }>(
      'GET',
      `/sessions/${session}/properties?mode=enrichment&layer=${encodeURIComponent(layer)}`,
    );
    return payload.properties;
  }

  setStartNodes(session: string, nodes: string[]): Promise<{ start_nodes: string[] }> {
    return this.request('POST', `/sessions/${session}/path/start`, { nodes });
  }

  addHop(session: string, direction: Direction, property: string): Promise<{ degree: number }> {
    return this.request('POST', `/sessions/${session}/path/hops`, { direction, property });
  }

  resetPath(session: string): Promise<{ degree: number }> {
    return this.request('DELETE', `/sessions/${session}/path`);
  }

  retrieve(session: string): Promise<{ layer: string; label: string; feature_count: number }> {
    return this.request('POST', `/sessions/${session}/retrieve`);
  }

  closure(
    session: string,
    root: string,
    down: string,
    up?: string,
    maxDepth?: number,
  ): Promise<{ layer: string; label: string; feature_count: number }> {
    return this.request('POST', `/sessions/${session}/closure`, {
      root,
      down,
      up: up ?? null,
      max_depth: maxDepth ?? null,
    });
  }

  enrich(session: string, layer: string, properties: string[]): Promise<EnrichReport> {
    return this.request('POST', `/sessions/${session}/enrich`, { layer, properties });
  }

  applyStyle(session: string, rulebase?: unknown): Promise<StyleReport> {
    return this.request('POST', `/sessions/${session}/style`, { rulebase: rulebase ?? null });
  }

  mapDocument(session: string): Promise<MapDocument> {
    return this.request('GET', `/sessions/${session}/map`);
  }

  explain(session: string, item: string): Promise<ExplainResponse> {
    return this.request('GET', `/sessions/${session}/explain?item=${encodeURIComponent(item)}`);
  }
}
