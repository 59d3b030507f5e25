"""Assembly of the final map document.

A MapDocument is the renderer-facing artifact: layers of GeoJSON
features (each carrying its assigned symbolizer IRIs and the primary
one), the symbolizer catalog, the legend, and the timeline.  Time-window
filtering happens here, at assembly, so a slider never mutates the
store.
"""

from __future__ import annotations

import json

from .contentkg import ContentGraph, ContentItem
from .features import geometry_json, temporal_json
from .portrayal import RuleBase, generate_legend, symbolizer_to_json
from .temporal import Instant


def _item_feature(item: ContentItem) -> dict:
    geometry = geometry_json(item.spatial) if item.spatial is not None else None
    return {
        "type": "Feature",
        "id": item.iri,
        "geometry": geometry,
        "properties": {
            "entity": item.entity,
            "label": item.label,
            "kind": item.kind,
            "temporal": temporal_json(item.temporal),
            "symbolizers": item.symbolizers,
            "primary_symbolizer": item.primary_symbolizer,
        },
    }


def build_map_document(
    content: ContentGraph,
    rulebase: RuleBase | None = None,
    window: tuple[Instant | None, Instant | None] | None = None,
) -> dict:
    """The layered, legend- and timeline-bearing document for rendering."""
    layers = []
    all_items: list[ContentItem] = []
    for layer_iri in content.layers():
        items = content.query_items(layer=layer_iri, window=window)
        all_items.extend(items)
        layers.append(
            {
                "iri": layer_iri,
                "label": content.layer_label(layer_iri),
                "features": [_item_feature(item) for item in items],
            }
        )

    ordered, extent = content.timeline(all_items)
    timeline = {
        "start": extent[0].iso() if extent else None,
        "end": extent[1].iso() if extent else None,
        "items": [
            {
                "item": item.iri,
                "label": item.label,
                "start": item.temporal.effective_start().iso(),
                "end": item.temporal.effective_end().iso(),
            }
            for item in ordered
            if item.temporal is not None
        ],
    }

    symbolizers = {}
    legend = {"iri": None, "items": []}
    if rulebase is not None:
        used = {s for item in all_items for s in item.symbolizers}
        used.update(r.symbolizer for r in rulebase.rules)
        symbolizers = {
            key: symbolizer_to_json(rulebase.symbolizers[key])
            for key in sorted(used)
            if key in rulebase.symbolizers
        }
        legend_obj = generate_legend(rulebase)
        legend = {
            "iri": legend_obj.iri,
            "items": [
                {"label": item.label, "symbolizer": item.symbolizer} for item in legend_obj.items
            ],
        }

    return {
        "layers": layers,
        "symbolizers": symbolizers,
        "legend": legend,
        "timeline": timeline,
    }


def map_document_bytes(document: dict) -> bytes:
    return (json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")
