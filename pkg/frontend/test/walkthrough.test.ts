/** Scripted browser walkthroughs over captured service exchanges.
 *
 * Magellan: search "Magellan", add the "participant in" and
 * "start point" hops, retrieve, and see a layer containing Seville.
 * WWII: retrieve the sub-event closure, enrich with time properties,
 * apply the four-rule style, and check that the legend shows four items
 * and that a slider window before 1937 hides every event.
 */

import { beforeEach, describe, expect, it } from 'vitest';

import { ExplorerApp } from '../src/app.js';
import { appShell, flush, loadExchanges, ReplayFetch } from './helpers.js';

const WD = 'http://www.wikidata.org/entity/';

function makeApp(fixture: string): { app: ExplorerApp; replay: ReplayFetch } {
  appShell(document);
  const replay = new ReplayFetch(loadExchanges(fixture));
  const app = new ExplorerApp({
    baseUrl: 'http://service.test',
    document,
    fetchImpl: replay.fetch,
  });
  return { app, replay };
}

function click(id: string): void {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  (node as HTMLElement).click();
}

function clickPropertyByLabel(label: string): void {
  const buttons = Array.from(
    document.querySelectorAll<HTMLButtonElement>('#properties button'),
  );
  const target = buttons.find((b) => b.textContent?.includes(label));
  expect(target, `property button ${label}`).toBeTruthy();
  target!.click();
}

describe('Magellan walkthrough', () => {
  beforeEach(() => {
    document.body.innerHTML = '';
  });

  it('search, two hops, retrieve: the layer contains Seville', async () => {
    const { app } = makeApp('magellan.json');
    await app.controller.start('magellan-replay');

    // typing enables the search button; empty query keeps it disabled
    const box = document.getElementById('search-box') as HTMLInputElement;
    const searchButton = document.getElementById('search-button') as HTMLButtonElement;
    expect(searchButton.disabled).toBe(true);
    box.value = 'Magellan';
    box.dispatchEvent(new Event('input'));
    expect(searchButton.disabled).toBe(false);

    click('search-button');
    await flush();
    const candidates = Array.from(document.querySelectorAll('#candidates button'));
    expect(candidates.map((c) => (c as HTMLElement).dataset.iri)).toContain(WD + 'Q1496');

    // picking the start node loads the first-degree property ranking
    (candidates.find((c) => (c as HTMLElement).dataset.iri === WD + 'Q1496') as HTMLElement).click();
    await flush();
    await flush();
    const labels = Array.from(document.querySelectorAll('#properties button')).map(
      (b) => b.textContent ?? '',
    );
    expect(labels.some((l) => l.includes('participant in'))).toBe(true);

    // counts shown equal the service response
    const state = app.controller.state;
    for (const row of state.properties) {
      expect(labels.some((l) => l.includes(`(${row.count})`))).toBe(true);
    }

    clickPropertyByLabel('participant in');
    await flush();
    await flush();
    expect(app.controller.state.breadcrumb.length).toBe(1);
    // adding a hop refreshed the next-degree list
    expect(
      Array.from(document.querySelectorAll('#properties button')).some((b) =>
        b.textContent?.includes('start point'),
      ),
    ).toBe(true);

    clickPropertyByLabel('start point');
    await flush();
    await flush();
    expect(app.controller.state.breadcrumb.length).toBe(2);
    expect(document.getElementById('breadcrumb')?.textContent).toContain('participant in');
    expect(document.getElementById('breadcrumb')?.textContent).toContain('start point');

    click('retrieve-button');
    await flush();
    await flush();

    const doc = app.controller.state.document;
    expect(doc).toBeTruthy();
    const ids = doc!.layers.flatMap((layer) => layer.features.map((f) => f.properties.entity));
    expect(ids).toContain(WD + 'Q8717');

    // the map rendered a marker for Seville
    const svg = document.getElementById('map')!.innerHTML;
    expect(svg).toContain('Seville');
    expect(svg).toContain('<circle');
  });
});

describe('WWII walkthrough', () => {
  beforeEach(() => {
    document.body.innerHTML = '';
  });

  it('closure, enrich, style: legend has four items and the slider hides pre-1937 windows', async () => {
    const { app } = makeApp('ww2.json');
    await app.controller.start('ww2-replay');

    await app.controller.closure(
      WD + 'Q362',
      'http://www.wikidata.org/prop/direct/P527',
      undefined,
      4,
    );
    expect(app.controller.state.layers[0].featureCount).toBe(48);
    const layer = app.controller.state.layers[0].iri;

    // enrich dialog lists the available properties; pick the six used by the demo
    await app.controller.loadEnrichable(layer);
    expect(app.controller.state.enrichable.length).toBe(76);
    const wanted = new Set([
      'http://www.wikidata.org/prop/direct/P580',
      'http://www.wikidata.org/prop/direct/P582',
      'http://www.wikidata.org/prop/direct/P585',
      'http://www.wikidata.org/prop/direct/P625',
      'http://www.wikidata.org/prop/direct/P31',
      'http://www.wikidata.org/prop/direct/P710',
    ]);
    const boxes = Array.from(
      document.querySelectorAll<HTMLInputElement>('#enrich-panel input'),
    );
    expect(boxes.length).toBe(76);
    for (const box of boxes) {
      box.checked = wanted.has(box.value);
    }
    click('enrich-submit');
    await flush();
    await flush();
    expect(app.controller.state.error).toBeNull();

    click('style-button');
    await flush();
    await flush();
    expect(app.controller.state.error).toBeNull();

    // legend shows one entry per demo rule
    const legendItems = document.querySelectorAll('#legend .legend-item');
    expect(legendItems.length).toBe(4);

    // full window shows every event; a window before 1937 hides them all
    const before = app.visibleFeatures();
    expect(before.length).toBe(48);
    app.controller.setWindow({ from: '1900-01-01', to: '1936-12-31' });
    expect(app.visibleFeatures().length).toBe(0);
    const svg = document.getElementById('map')!.innerHTML;
    expect(svg).not.toContain('<circle');

    // restoring the window reproduces the identical feature set (purely
    // presentational filtering)
    click('window-reset');
    expect(app.visibleFeatures()).toEqual(before);

    // clicking a styled feature shows its explanation trace
    click('window-reset');
    const feature = document.querySelector('#map .feature') as HTMLElement;
    expect(feature).toBeTruthy();
    feature.click();
    await flush();
    await flush();
    const explain = document.getElementById('explain')!.innerHTML;
    expect(explain).toContain('trace');
  });
});
