/** DOM wiring for the explorer.
 *
 * Everything stateful lives in ExplorationController; this file only
 * binds inputs to controller calls and repaints panels on change. It is
 * instantiated with a document and a fetch so the scripted walkthrough
 * test can drive the full app under a DOM shim.
 */

import { FetchLike, ServiceClient } from './api.js';
import { renderExplanation, renderLegend } from './legend.js';
import { renderMap, visibleFeatureIds } from './mapview.js';
import { ExplorationController, ExplorationState } from './state.js';
import { sliderDate } from './timeline.js';

export interface AppOptions {
  baseUrl: string;
  document: Document;
  fetchImpl?: FetchLike;
}

export class ExplorerApp {
  readonly controller: ExplorationController;
  private doc: Document;

  constructor(options: AppOptions) {
    this.doc = options.document;
    const client = new ServiceClient(options.baseUrl, options.fetchImpl);
    this.controller = new ExplorationController(client);
    this.controller.subscribe((state) => this.render(state));
    this.bind();
  }

  private element<T extends HTMLElement>(id: string): T {
    const node = this.doc.getElementById(id);
    if (!node) {
      throw new Error(`missing element #${id}`);
    }
    return node as T;
  }

  private bind(): void {
    this.element<HTMLButtonElement>('search-button').addEventListener('click', () => {
      void this.controller.search(this.element<HTMLInputElement>('search-box').value);
    });
    this.element<HTMLInputElement>('search-box').addEventListener('input', (event) => {
      const value = (event.target as HTMLInputElement).value;
      this.element<HTMLButtonElement>('search-button').disabled = !value.trim();
    });
    this.element<HTMLSelectElement>('direction-toggle').addEventListener('change', (event) => {
      const value = (event.target as HTMLSelectElement).value as 'forward' | 'backward';
      void this.controller.setDirection(value);
    });
    this.element<HTMLButtonElement>('retrieve-button').addEventListener('click', () => {
      void this.controller.retrieve();
    });
    this.element<HTMLButtonElement>('style-button').addEventListener('click', () => {
      void this.controller.applyStyle();
    });
    this.element<HTMLButtonElement>('reset-path-button').addEventListener('click', () => {
      void this.controller.resetPath();
    });
    this.element<HTMLButtonElement>('closure-button').addEventListener('click', () => {
      const root = this.element<HTMLInputElement>('closure-root').value.trim();
      const down = this.element<HTMLInputElement>('closure-down').value.trim();
      const up = this.element<HTMLInputElement>('closure-up').value.trim();
      if (root && down) {
        void this.controller.closure(root, down, up || undefined);
      }
    });
    this.element<HTMLButtonElement>('enrich-submit').addEventListener('click', () => {
      const state = this.controller.state;
      if (!state.enrichLayer) {
        return;
      }
      const chosen = Array.from(
        this.doc.querySelectorAll<HTMLInputElement>('#enrich-panel input:checked'),
      ).map((box) => box.value);
      if (chosen.length) {
        void this.controller.enrich(state.enrichLayer, chosen);
      }
    });
    const slider = this.element<HTMLInputElement>('window-end');
    slider.addEventListener('input', () => {
      const state = this.controller.state;
      if (!state.document) {
        return;
      }
      const to = sliderDate(state.document.timeline, Number(slider.value) / 100);
      this.controller.setWindow({ from: state.window.from, to });
    });
    this.element<HTMLButtonElement>('window-reset').addEventListener('click', () => {
      this.controller.restoreFullWindow();
      slider.value = '100';
    });
  }

  /** Visible feature ids under the current window (used by tests). */
  visibleFeatures(): string[] {
    const state = this.controller.state;
    return state.document ? visibleFeatureIds(state.document, state.window) : [];
  }

  private render(state: ExplorationState): void {
    this.renderCandidates(state);
    this.renderBreadcrumb(state);
    this.renderProperties(state);
    this.renderLayers(state);
    this.renderMapPanel(state);
    this.element<HTMLElement>('status').textContent = state.busy
      ? 'working...'
      : (state.error ?? '');
    for (const id of ['retrieve-button', 'style-button', 'reset-path-button']) {
      this.element<HTMLButtonElement>(id).disabled = state.busy;
    }
  }

  private renderCandidates(state: ExplorationState): void {
    const list = this.element<HTMLElement>('candidates');
    list.innerHTML = '';
    for (const candidate of state.candidates) {
      const item = this.doc.createElement('li');
      const button = this.doc.createElement('button');
      button.textContent = candidate.label || candidate.iri;
      button.dataset.iri = candidate.iri;
      button.addEventListener('click', () => {
        void this.controller.pickStartNode(candidate);
      });
      item.appendChild(button);
      list.appendChild(item);
    }
    if (state.startNode) {
      this.element<HTMLElement>('start-node').textContent =
        `${state.startNode.label} <${state.startNode.iri}>`;
    }
  }

  private renderBreadcrumb(state: ExplorationState): void {
    this.element<HTMLElement>('breadcrumb').textContent = state.breadcrumb
      .map((hop) => `${hop.direction} ${hop.label || hop.property}`)
      .join(' -> ');
  }

  private renderProperties(state: ExplorationState): void {
    const list = this.element<HTMLElement>('properties');
    list.innerHTML = '';
    for (const row of state.properties) {
      const item = this.doc.createElement('li');
      const button = this.doc.createElement('button');
      button.textContent = `${row.label || row.property} (${row.count})`;
      button.dataset.property = row.property;
      button.disabled = state.busy;
      button.addEventListener('click', () => {
        void this.controller.addHop(row);
      });
      item.appendChild(button);
      list.appendChild(item);
    }
  }

  private renderLayers(state: ExplorationState): void {
    const list = this.element<HTMLElement>('layers');
    list.innerHTML = '';
    for (const layer of state.layers) {
      const item = this.doc.createElement('li');
      item.textContent = `${layer.label} (${layer.featureCount}) `;
      item.dataset.iri = layer.iri;
      const enrichButton = this.doc.createElement('button');
      enrichButton.textContent = 'Enrich...';
      enrichButton.disabled = state.busy;
      enrichButton.addEventListener('click', () => {
        void this.controller.loadEnrichable(layer.iri);
      });
      item.appendChild(enrichButton);
      list.appendChild(item);
    }
    this.renderEnrichPanel(state);
  }

  private renderEnrichPanel(state: ExplorationState): void {
    const panel = this.element<HTMLElement>('enrich-panel');
    panel.innerHTML = '';
    this.element<HTMLButtonElement>('enrich-submit').hidden = !state.enrichLayer;
    if (!state.enrichLayer) {
      return;
    }
    for (const row of state.enrichable) {
      const label = this.doc.createElement('label');
      const box = this.doc.createElement('input');
      box.type = 'checkbox';
      box.value = row.property;
      label.appendChild(box);
      label.appendChild(this.doc.createTextNode(` ${row.label || row.property} (${row.count})`));
      const wrapper = this.doc.createElement('li');
      wrapper.appendChild(label);
      panel.appendChild(wrapper);
    }
  }

  private renderMapPanel(state: ExplorationState): void {
    const map = this.element<HTMLElement>('map');
    const legend = this.element<HTMLElement>('legend');
    if (!state.document) {
      map.innerHTML = '';
      legend.innerHTML = '';
      return;
    }
    map.innerHTML = renderMap(state.document, state.window);
    legend.innerHTML = renderLegend(state.document);
    for (const node of Array.from(map.querySelectorAll('.feature'))) {
      node.addEventListener('click', () => {
        const id = (node as HTMLElement).dataset.id;
        if (id) {
          void this.showExplanation(id);
        }
      });
    }
  }

  private async showExplanation(item: string): Promise<void> {
    const traces = await this.controller.explain(item);
    if (traces) {
      this.element<HTMLElement>('explain').innerHTML = renderExplanation({ item, traces });
    }
  }
}

export function mount(options: AppOptions): ExplorerApp {
  return new ExplorerApp(options);
}
