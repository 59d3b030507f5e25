/** Mock fetch replaying captured service exchanges.
 *
 * Fixtures are ordered lists of {method, path, body, status, response}
 * captured from the real service in replay mode. Matching is by
 * method + path + body; repeated identical requests consume entries in
 * order. Session ids are masked as SESSION on both sides.
 */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import type { FetchLike } from '../src/api.js';

interface Exchange {
  method: string;
  path: string;
  body: unknown;
  status: number;
  response: unknown;
}

const FIXTURES_DIR = join(dirname(fileURLToPath(import.meta.url)), 'fixtures');

export function loadExchanges(name: string): Exchange[] {
  return JSON.parse(readFileSync(join(FIXTURES_DIR, name), 'utf-8')) as Exchange[];
}

function canonical(value: unknown): string {
  if (value === undefined || value === null) {
    return 'null';
  }
  return JSON.stringify(value, Object.keys(value as object).sort());
}

export class ReplayFetch {
  private consumed: boolean[];
  readonly requests: { method: string; path: string }[] = [];

  constructor(private exchanges: Exchange[], private baseUrl = 'http://service.test') {
    this.consumed = exchanges.map(() => false);
  }

  get fetch(): FetchLike {
    return async (input, init) => {
      const method = init?.method ?? 'GET';
      let path = input.startsWith(this.baseUrl) ? input.slice(this.baseUrl.length) : input;
      path = path.replace(/\/sessions\/[0-9a-f]{8,}/, '/sessions/SESSION');
      const body = init?.body ? JSON.parse(init.body as string) : null;
      this.requests.push({ method, path });
      for (let i = 0; i < this.exchanges.length; i += 1) {
        const exchange = this.exchanges[i];
        if (
          !this.consumed[i] &&
          exchange.method === method &&
          exchange.path === path &&
          canonical(exchange.body) === canonical(body)
        ) {
          this.consumed[i] = true;
          return new Response(JSON.stringify(exchange.response), {
            status: exchange.status,
            headers: { 'Content-Type': 'application/json' },
          });
        }
      }
      return new Response(JSON.stringify({ detail: `no fixture for ${method} ${path}` }), {
        status: 502,
        headers: { 'Content-Type': 'application/json' },
      });
    };
  }

  unconsumed(): Exchange[] {
    return this.exchanges.filter((_, i) => !this.consumed[i]);
  }
}

/** The DOM shell of index.html, as the app expects to find it. */
export function appShell(doc: Document): void {
  doc.body.innerHTML = `
    <input id="search-box" type="search">
    <button id="search-button" disabled>Search</button>
    <ul id="candidates"></ul>
    <p id="start-node"></p>
    <select id="direction-toggle">
      <option value="forward">forward</option>
      <option value="backward">backward</option>
    </select>
    <p id="breadcrumb"></p>
    <ul id="properties"></ul>
    <button id="retrieve-button">Retrieve</button>
    <button id="reset-path-button">Reset path</button>
    <input id="closure-root"><input id="closure-down"><input id="closure-up">
    <button id="closure-button">Retrieve closure</button>
    <ul id="layers"></ul>
    <ul id="enrich-panel"></ul>
    <button id="enrich-submit" hidden>Enrich selected</button>
    <button id="style-button">Apply styling rules</button>
    <div id="legend"></div>
    <div id="explain"></div>
    <div id="map"></div>
    <input id="window-end" type="range" min="0" max="100" value="100">
    <button id="window-reset">Full extent</button>
    <span id="status"></span>
  `;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
