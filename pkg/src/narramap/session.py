"""One exploration session: the workflow core behind service and CLI.

A session owns an endpoint client, an endpoint profile, the path spec
under construction, and a per-session content graph.  The interactive
loop is: search a start entity, inspect ranked properties, extend the
path hop by hop, retrieve (materialize + ingest as a layer), enrich the
layer with more properties, apply a portrayal rule base, and read the
resulting map document.

Sessions snapshot to disk as one Turtle file per named graph plus a
JSON manifest, so the CLI can run the same pipeline over local files
and produce byte-identical exports.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .client import EndpointConfig, SparqlClient, canonical_query_key
from .contentkg import ContentGraph, LayerDescriptor, SourceDescriptor
from .features import (
    ColumnMapping,
    FeatureCollection,
    materialize,
    read_geojson,
    write_csv,
    write_geojson,
)
from .mapdoc import build_map_document, map_document_bytes
from .portrayal import RuleBase, dump_rulebase, load_rulebase, shacl_export
from .queries import (
    ClosureSpec,
    EndpointProfile,
    Hop,
    PathSpec,
    build_closure_query,
    build_discovery_for_enrichment,
    build_enrichment_query,
    build_entity_search_query,
    build_path_query,
    build_property_discovery,
    enrichment_columns,
    path_position_vars,
    profile_by_name,
)
from .store import (
    GRAPH_ALIGNMENT,
    GRAPH_CONTENT,
    GRAPH_PROVENANCE,
    GRAPH_SYMBOLIZATION,
    GraphStore,
)
from .temporal import Instant

LAYER_NAMESPACE = "https://narramap.dev/layer/"

SNAPSHOT_GRAPHS = {
    "content.ttl": GRAPH_CONTENT,
    "alignment.ttl": GRAPH_ALIGNMENT,
    "provenance.ttl": GRAPH_PROVENANCE,
    "symbolization.ttl": GRAPH_SYMBOLIZATION,
}


class SessionError(Exception):
    def __init__(self, message: str, status: int = 400):
        super().__init__(message)
        self.status = status


@dataclass
class SearchCandidate:
    iri: str
    label: str
    description: str = ""


@dataclass
class LayerState:
    iri: str
    label: str
    kind: str
    feature_count: int
    property_map: dict[str, str] = field(default_factory=dict)


class WorkSession:
    """Write operations are serialized by an internal lock; reads are
    safe to interleave."""

    def __init__(
        self,
        config: EndpointConfig,
        profile: EndpointProfile,
        language: str | None = None,
    ):
        self.config = config
        self.profile = profile
        self.language = language or config.default_language
        self.client = SparqlClient(config)
        self.content = ContentGraph(GraphStore())
        self.hops: list[Hop] = []
        self.start_nodes: list[str] = []
        self.layers: dict[str, LayerState] = {}
        self.rulebase: RuleBase | None = None
        self.lock = threading.Lock()

    # -- start nodes and search

    def search_entities(self, text: str, limit: int = 10) -> list[SearchCandidate]:
        if not text.strip():
            raise SessionError("search text must not be empty", status=400)
        if self.profile.search_mechanism == "wikidata_api" and self.config.mode == "live":
            return self._search_via_api(text, limit)
        query = build_entity_search_query(text, self.language, self.profile, limit)
        table = self.client.execute_select(query)
        out = []
        for row in table.rows:
            entity = row.get("entity")
            label = row.get("label")
            if entity is not None:
                out.append(SearchCandidate(entity.value, label.value if label else ""))
        return out

    def _search_via_api(self, text: str, limit: int) -> list[SearchCandidate]:
        response = requests.get(
            self.profile.search_api_url,
            params={
                "action": "wbsearchentities",
                "search": text,
                "language": self.language,
                "format": "json",
                "limit": str(limit),
            },
            headers={"User-Agent": self.config.user_agent},
            timeout=self.config.timeout_ms / 1000.0,
        )
        response.raise_for_status()
        out = []
        for hit in response.json().get("search", [])[:limit]:
            out.append(
                SearchCandidate(
                    hit.get("concepturi") or hit.get("url", ""),
                    hit.get("label", ""),
                    hit.get("description", ""),
                )
            )
        return out

    # -- path construction

    def set_start_nodes(self, nodes: list[str]) -> None:
        if not nodes:
            raise SessionError("need at least one start node", status=400)
        self.start_nodes = sorted(set(nodes))

    def add_hop(self, direction: str, property_iri: str) -> int:
        self.hops.append(Hop(direction, property_iri))
        return len(self.hops)

    def reset_path(self) -> None:
        self.hops = []

    def current_path(self) -> PathSpec:
        if not self.start_nodes:
            raise SessionError("no start nodes chosen", status=409)
        if not self.hops:
            raise SessionError("path has no hops yet", status=409)
        return PathSpec(self.start_nodes, self.hops)

    # -- discovery

    def frontier_nodes(self) -> list[str]:
        """Entities at the current path tip (start nodes when no hops)."""
        if not self.hops:
            if not self.start_nodes:
                raise SessionError("no start nodes chosen", status=409)
            return list(self.start_nodes)
        query = build_path_query(self.current_path(), self.language, self.profile)
        table = self.client.execute_select(query)
        terminal = path_position_vars(len(self.hops))[-1].name
        return sorted(table.distinct_values(terminal))

    def discover_properties(self, nodes: list[str] | None, direction: str) -> list[dict]:
        targets = nodes if nodes else self.frontier_nodes()
        if not targets:
            raise SessionError("no nodes to discover from", status=400)
        query = build_property_discovery(targets, direction, self.language, self.profile)
        table = self.client.execute_select(query)
        return _property_rows(table, "count")

    def discover_enrichment_properties(self, layer_iri: str) -> list[dict]:
        entities = self._layer_entities(layer_iri)
        query = build_discovery_for_enrichment(entities, self.language, self.profile)
        table = self.client.execute_select(query)
        return _property_rows(table, "coverage")

    # -- retrieval

    def retrieve(self) -> LayerState:
        """Execute the current path, materialize, ingest as one layer.

        The layer IRI is derived from the query, so repeating the same
        path updates the layer in place instead of duplicating it.
        """
        spec = self.current_path()
        query = build_path_query(spec, self.language, self.profile)
        table = self.client.execute_select(query)
        positions = path_position_vars(spec.degree)
        terminal = positions[-1].name
        attributes = []
        for var in positions[:-1]:
            attributes.extend([var.name, var.name + "Label"])
        mapping = ColumnMapping(
            entity=terminal,
            label=terminal + "Label",
            geometry=terminal + "Geom",
            attributes=attributes,
        )
        collection = materialize(table, mapping)
        key = canonical_query_key(query)
        layer = LayerDescriptor(
            iri=LAYER_NAMESPACE + key[:16],
            label="Path result: " + " / ".join(f"{h.direction} {h.property}" for h in spec.hops),
            kind="object",
        )
        report = self.content.ingest(
            collection,
            layer,
            source=SourceDescriptor(self.config.base_url, key),
        )
        state = LayerState(layer.iri, layer.label, layer.kind, len(report.items))
        self.layers[layer.iri] = state
        return state

    def closure(
        self,
        root: str,
        down: str,
        up: str | None = None,
        max_depth: int | None = None,
    ) -> LayerState:
        spec = ClosureSpec(root, down, up, max_depth)
        query = build_closure_query(spec, self.language, self.profile)
        table = self.client.execute_select(query)
        mapping = ColumnMapping(entity="event", label="eventLabel", attributes=[])
        collection = materialize(table, mapping)
        key = canonical_query_key(query)
        layer = LayerDescriptor(
            iri=LAYER_NAMESPACE + key[:16],
            label=f"Closure of {root}",
            kind="event",
        )
        self.content.ingest(
            collection, layer, source=SourceDescriptor(self.config.base_url, key)
        )
        state = LayerState(layer.iri, layer.label, layer.kind, len(collection))
        self.layers[layer.iri] = state
        # closure edges are needed for rule conditions and explanations
        closure_properties = [down] + ([up] if up else [])
        self.enrich(layer.iri, closure_properties)
        return state

    def _layer_entities(self, layer_iri: str) -> list[str]:
        if layer_iri not in self.layers and layer_iri not in self.content.layers():
            raise SessionError(f"unknown layer {layer_iri}", status=404)
        return sorted({item.entity for item in self.content.items(layer_iri)})

    def enrich(self, layer_iri: str, properties: list[str]) -> dict:
        """Fetch the given properties for every entity of a layer and lift
        them into the items: temporal properties become temporal extents,
        the coordinate property becomes geometry, the rest observations."""
        if not properties:
            raise SessionError("property set must not be empty", status=400)
        entities = self._layer_entities(layer_iri)
        if not entities:
            return {"layer": layer_iri, "items_updated": 0, "observations": {}}
        query = build_enrichment_query(entities, properties, self.language, self.profile)
        table = self.client.execute_select(query)
        columns = enrichment_columns(properties)
        property_map = {var: prop for var, prop in columns}
        start_col = end_col = instant_col = geom_col = None
        attribute_cols = []
        for var, prop in columns:
            if prop == self.profile.start_time_property:
                start_col = var
            elif prop == self.profile.end_time_property:
                end_col = var
            elif prop == self.profile.instant_time_property:
                instant_col = var
            elif prop == self.profile.coordinate_property:
                geom_col = var
            else:
                attribute_cols.append(var)
        mapping = ColumnMapping(
            entity="entity",
            label="entityLabel",
            geometry=geom_col,
            start=start_col,
            end=end_col,
            instant=instant_col,
            attributes=attribute_cols,
        )
        collection = materialize(table, mapping)
        kind = self.layers[layer_iri].kind if layer_iri in self.layers else "event"
        layer = LayerDescriptor(layer_iri, self.content.layer_label(layer_iri), kind)
        self.content.ingest(
            collection,
            layer,
            property_map=property_map,
            source=SourceDescriptor(self.config.base_url, canonical_query_key(query)),
            type_property=self.profile.type_property,
        )
        observation_counts: dict[str, int] = {}
        for var, prop in columns:
            count = sum(1 for row in table.rows if row.get(var) is not None)
            observation_counts[prop] = count
        return {
            "layer": layer_iri,
            "items_updated": len(collection),
            "observations": observation_counts,
        }

    # -- styling

    def apply_style(self, rulebase: RuleBase | None = None) -> dict:
        """Compile each rule to SPARQL, evaluate it against the session
        endpoint, and write the assignments into the symbolization graph.

        Remote evaluation keeps the rule semantics on the full source
        graph; assignments attach to any session item representing an
        assigned entity.
        """
        from .portrayal import compile_to_sparql

        if rulebase is None:
            rulebase = load_bundled_rulebase()
        self.rulebase = rulebase
        entity_to_items: dict[str, list[str]] = {}
        for layer_iri in self.content.layers():
            for item in self.content.items(layer_iri):
                entity_to_items.setdefault(item.entity, []).append(item.iri)

        self.content.clear_symbolization()
        per_rule: dict[str, int] = {}
        primary_seen: set[str] = set()
        for rule in rulebase.ordered_rules():
            query = compile_to_sparql(rule, self.profile)
            triples = self.client.execute_construct(query)
            assigned = 0
            for s, _p, o in triples:
                items = entity_to_items.get(s.value, [])
                if items:
                    assigned += 1
                for item_iri in items:
                    primary = item_iri not in primary_seen
                    if primary:
                        primary_seen.add(item_iri)
                    self.content.assign_symbolizer(item_iri, o.value, primary)
            per_rule[rule.iri] = assigned
        return {"rules": per_rule, "style": rulebase.style_iri}

    def explain_item(self, item_iri: str) -> list[dict]:
        from .portrayal import explain

        if self.rulebase is None:
            raise SessionError("no rule base applied yet", status=409)
        traces = explain(item_iri, self.rulebase, self.content, profile=self.profile)
        return [
            {
                "rule": t.rule,
                "satisfied": t.satisfied,
                "skipped": t.skipped,
                "conditions": [
                    {"condition": c.condition, "satisfied": c.satisfied, "detail": c.detail}
                    for c in t.conditions
                ],
            }
            for t in traces
        ]

    # -- outputs

    def map_document(self, window: tuple[Instant | None, Instant | None] | None = None) -> dict:
        return build_map_document(self.content, self.rulebase, window)

    def all_features(self) -> FeatureCollection:
        from .features import FeatureRecord

        records: dict[str, FeatureRecord] = {}
        for layer_iri in self.content.layers():
            for item in self.content.items(layer_iri):
                attributes: dict[str, list] = {}
                for obs in item.observations:
                    values = attributes.setdefault(obs.property, [])
                    if obs.result not in values:
                        values.append(obs.result)
                records[item.entity] = FeatureRecord(
                    entity=item.entity,
                    label=item.label,
                    geometry=item.spatial,
                    temporal=item.temporal,
                    attributes=attributes,
                )
        return FeatureCollection([records[key] for key in sorted(records)])

    def export(self, fmt: str) -> tuple[bytes, str]:
        """(payload, content type) for one export format."""
        if fmt == "turtle":
            return self.content.store.export_turtle(), "text/turtle"
        if fmt == "geojson":
            return write_geojson(self.all_features()), "application/geo+json"
        if fmt == "csv":
            return write_csv(self.all_features()), "text/csv"
        if fmt == "ruleset":
            rulebase = self.rulebase or load_bundled_rulebase()
            return dump_rulebase(rulebase), "application/json"
        if fmt == "shacl":
            rulebase = self.rulebase or load_bundled_rulebase()
            return shacl_export(rulebase, self.profile), "text/turtle"
        if fmt == "map":
            return map_document_bytes(self.map_document()), "application/json"
        raise SessionError(f"unknown export format {fmt!r}", status=400)

    # -- snapshots

    def snapshot(self, directory: Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for filename, graph in SNAPSHOT_GRAPHS.items():
            (directory / filename).write_bytes(self.content.store.export_turtle(graph))
        manifest = {
            "endpoint": {
                "base_url": self.config.base_url,
                "mode": self.config.mode,
                "fixture_dir": str(self.config.fixture_dir) if self.config.fixture_dir else None,
                "page_size": self.config.page_size,
                "default_language": self.config.default_language,
            },
            "profile": self.profile.name,
            "language": self.language,
            "start_nodes": self.start_nodes,
            "hops": [{"direction": h.direction, "property": h.property} for h in self.hops],
            "layers": [
                {
                    "iri": s.iri,
                    "label": s.label,
                    "kind": s.kind,
                    "feature_count": s.feature_count,
                }
                for s in self.layers.values()
            ],
        }
        (directory / "session.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8"
        )
        if self.rulebase is not None:
            (directory / "rules.json").write_bytes(dump_rulebase(self.rulebase))

    @classmethod
    def load(cls, directory: Path) -> "WorkSession":
        directory = Path(directory)
        manifest = json.loads((directory / "session.json").read_text("utf-8"))
        endpoint = manifest["endpoint"]
        config = EndpointConfig(
            base_url=endpoint["base_url"],
            mode=endpoint.get("mode", "replay"),
            fixture_dir=Path(endpoint["fixture_dir"]) if endpoint.get("fixture_dir") else None,
            page_size=endpoint.get("page_size", 1000),
            default_language=endpoint.get("default_language", "en"),
        )
        session = cls(config, profile_by_name(manifest.get("profile", "wikidata")))
        session.language = manifest.get("language", session.language)
        session.start_nodes = manifest.get("start_nodes", [])
        session.hops = [Hop(h["direction"], h["property"]) for h in manifest.get("hops", [])]
        for layer in manifest.get("layers", []):
            session.layers[layer["iri"]] = LayerState(
                layer["iri"], layer["label"], layer["kind"], layer["feature_count"]
            )
        for filename, graph in SNAPSHOT_GRAPHS.items():
            path = directory / filename
            if path.exists():
                session.content.store.import_turtle(path.read_bytes(), graph)
        rules_path = directory / "rules.json"
        if rules_path.exists():
            session.rulebase = load_rulebase(rules_path.read_bytes())
        return session


def _property_rows(table, count_var: str) -> list[dict]:
    out = []
    for row in table.rows:
        prop = row.get("property")
        if prop is None:
            continue
        label = row.get("propertyLabel")
        count = row.get(count_var)
        out.append(
            {
                "property": prop.value,
                "label": label.value if label else "",
                "count": int(count.value) if count else 0,
            }
        )
    return out


def load_bundled_rulebase() -> RuleBase:
    path = Path(__file__).parent / "rules" / "ww2_battle_rules.json"
    return load_rulebase(path.read_bytes())


def bundled_fixture_dir(name: str) -> Path:
    return Path(__file__).parent / "fixtures" / name
