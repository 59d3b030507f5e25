/** Legend and explanation rendering (pure HTML strings). */

import type { ExplainResponse, MapDocument, SymbolizerJson } from './types.js';

function escapeHtml(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

function swatch(symbolizer: SymbolizerJson | undefined): string {
  const color = symbolizer?.fill?.color ?? symbolizer?.stroke?.color ?? '#888888';
  const shape = symbolizer?.marker_shape ?? 'circle';
  return `<span class="swatch swatch-${shape}" style="background:${color}"></span>`;
}

export function renderLegend(document: MapDocument): string {
  if (!document.legend.items.length) {
    return '<p class="legend-empty">No style applied.</p>';
  }
  const rows = document.legend.items.map(
    (item) =>
      `<li class="legend-item" data-symbolizer="${escapeHtml(item.symbolizer)}">` +
      swatch(document.symbolizers[item.symbolizer]) +
      `<span class="legend-label">${escapeHtml(item.label)}</span></li>`,
  );
  return `<ul class="legend">${rows.join('')}</ul>`;
}

export function renderExplanation(payload: ExplainResponse): string {
  const sections = payload.traces.map((trace) => {
    const status = trace.skipped
      ? `skipped: ${escapeHtml(trace.skipped)}`
      : trace.satisfied
        ? 'matched'
        : 'not matched';
    const rows = trace.conditions
      .map((condition) => {
        const mark = condition.satisfied === null ? '*' : condition.satisfied ? 'yes' : 'no';
        const detail = condition.detail ? ` <small>${escapeHtml(condition.detail)}</small>` : '';
        return `<li><code>${escapeHtml(condition.condition)}</code> - ${mark}${detail}</li>`;
      })
      .join('');
    return (
      `<section class="trace" data-rule="${escapeHtml(trace.rule)}">` +
      `<h4>${escapeHtml(trace.rule.split('/').pop() ?? trace.rule)} (${status})</h4>` +
      `<ul>${rows}</ul></section>`
    );
  });
  return sections.join('');
}
