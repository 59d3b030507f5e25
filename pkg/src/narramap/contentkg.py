"""The map-content knowledge graph.

Wraps a GraphStore with the content vocabulary: feature collections are
ingested as MapContentItems under a MapContentType (one layer each),
with spatiotemporal extents decomposed into spatial/temporal nodes,
attributes lifted into SOSA observations, owl:sameAs alignment links in
their own graph, and a provenance record per ingest.

Item IRIs are minted deterministically from (layer, entity), so
re-ingesting the same collection is an idempotent merge.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field

from . import vocab
from .features import FeatureCollection, FeatureRecord
from .geo import Geometry, format_wkt, parse_wkt, point_in_bbox
from .store import (
    GRAPH_ALIGNMENT,
    GRAPH_CONTENT,
    GRAPH_PROVENANCE,
    GRAPH_SYMBOLIZATION,
    GraphStore,
)
from .temporal import Instant, TemporalValue, instant_value, interval_value, parse_time
from .terms import (
    OWL_SAMEAS,
    RDF_TYPE,
    RDFS_LABEL,
    XSD_DATETIME,
    XSD_INTEGER,
    Term,
    iri,
    is_absolute_iri,
    literal,
)

logger = logging.getLogger(__name__)

DEFAULT_MAP_CONTENT_IRI = "https://narramap.dev/content/map"


@dataclass(frozen=True)
class LayerDescriptor:
    iri: str
    label: str
    kind: str = "event"  # "event" | "object"

    def __post_init__(self) -> None:
        if not is_absolute_iri(self.iri):
            raise ValueError(f"layer IRI must be absolute: {self.iri!r}")
        if not self.label:
            raise ValueError("layer label must not be empty")
        if self.kind not in ("event", "object"):
            raise ValueError(f"layer kind must be event/object, got {self.kind!r}")


@dataclass(frozen=True)
class SourceDescriptor:
    endpoint: str
    query_key: str


@dataclass
class Observation:
    property: str
    result: Term


@dataclass
class ContentItem:
    """Read view of one MapContentItem."""

    iri: str
    entity: str
    label: str
    kind: str
    classes: list[str] = field(default_factory=list)
    spatial: Geometry | None = None
    temporal: TemporalValue | None = None
    observations: list[Observation] = field(default_factory=list)
    alignments: list[str] = field(default_factory=list)
    symbolizers: list[str] = field(default_factory=list)
    primary_symbolizer: str | None = None

    @property
    def is_mappable(self) -> bool:
        return self.spatial is not None or self.temporal is not None

    def observed(self, property_iri: str) -> list[Term]:
        return [o.result for o in self.observations if o.property == property_iri]


@dataclass
class IngestReport:
    layer: str
    items: list[str]
    merged: list[str]


def item_iri_for(layer_iri: str, entity_iri: str) -> str:
    digest = hashlib.sha256(entity_iri.encode("utf-8")).hexdigest()[:16]
    return f"{layer_iri}/item/{digest}"


class ContentGraph:
    """Content, alignment, provenance, and symbolization graphs over one store."""

    def __init__(self, store: GraphStore | None = None, map_content_iri: str = DEFAULT_MAP_CONTENT_IRI):
        self.store = store if store is not None else GraphStore()
        self.map_content_iri = map_content_iri

    # -- ingest

    def ingest(
        self,
        collection: FeatureCollection,
        layer: LayerDescriptor,
        property_map: dict[str, str] | None = None,
        source: SourceDescriptor | None = None,
        type_property: str | None = None,
    ) -> IngestReport:
        """Create one MapContentItem per feature under the given layer.

        ``property_map`` maps attribute column names to the property IRIs
        they were retrieved from; unmapped columns get an IRI minted in
        the content namespace so nothing is dropped.  Attribute values of
        ``type_property`` additionally become rdf:type statements on the
        represented entity, giving items their open subclass IRIs.
        """
        add = self.store.add
        mc = iri(self.map_content_iri)
        layer_term = iri(layer.iri)
        add(mc, iri(RDF_TYPE), iri(vocab.MAP_CONTENT), GRAPH_CONTENT)
        add(mc, iri(vocab.HAS_MAP_CONTENT_TYPE), layer_term, GRAPH_CONTENT)
        add(layer_term, iri(RDF_TYPE), iri(vocab.MAP_CONTENT_TYPE), GRAPH_CONTENT)
        add(layer_term, iri(RDFS_LABEL), literal(layer.label), GRAPH_CONTENT)

        existing = set(self.layer_items(layer.iri))
        items: list[str] = []
        merged: list[str] = []
        for record in collection:
            item = item_iri_for(layer.iri, record.entity)
            if item in existing:
                merged.append(item)
            items.append(item)
            self._write_item(layer, record, item, property_map or {}, type_property)
        if merged:
            logger.warning(
                "layer %s: %d item(s) were already present and merged idempotently",
                layer.iri,
                len(merged),
            )
        if source is not None:
            src = iri(f"{layer.iri}/source/{source.query_key[:16]}")
            add(layer_term, iri(vocab.PROV_WAS_DERIVED_FROM), src, GRAPH_PROVENANCE)
            add(src, iri(RDF_TYPE), iri(vocab.PROV_ENTITY), GRAPH_PROVENANCE)
            add(src, iri(vocab.SOURCE_ENDPOINT), literal(source.endpoint), GRAPH_PROVENANCE)
            add(src, iri(vocab.SOURCE_QUERY_KEY), literal(source.query_key), GRAPH_PROVENANCE)
        return IngestReport(layer.iri, items, merged)

    def _write_item(
        self,
        layer: LayerDescriptor,
        record: FeatureRecord,
        item: str,
        property_map: dict[str, str],
        type_property: str | None,
    ) -> None:
        add = self.store.add
        g = GRAPH_CONTENT
        item_term = iri(item)
        entity_term = iri(record.entity)
        add(iri(layer.iri), iri(vocab.HAS_MAP_ITEM), item_term, g)
        add(item_term, iri(RDF_TYPE), iri(vocab.MAP_CONTENT_ITEM), g)
        add(item_term, iri(vocab.ITEM_KIND), literal(layer.kind), g)
        if record.label:
            add(item_term, iri(RDFS_LABEL), literal(record.label), g)
        add(item_term, iri(vocab.REPRESENTS), entity_term, g)
        kind_class = vocab.EVENT_CLASS if layer.kind == "event" else vocab.OBJECT_CLASS
        add(entity_term, iri(RDF_TYPE), iri(kind_class), g)

        if record.geometry is not None or record.temporal is not None:
            ste = iri(f"{item}/extent")
            add(item_term, iri(vocab.HAS_SPATIOTEMPORAL_EXTENT), ste, g)
            add(ste, iri(RDF_TYPE), iri(vocab.SPATIOTEMPORAL_EXTENT), g)
            if record.geometry is not None:
                se = iri(f"{item}/extent/spatial")
                add(ste, iri(vocab.HAS_SPATIAL_EXTENT), se, g)
                add(se, iri(RDF_TYPE), iri(vocab.SPATIAL_EXTENT), g)
                add(
                    se,
                    iri(vocab.GEO_AS_WKT),
                    literal(format_wkt(record.geometry), datatype=vocab.GEO_WKT_LITERAL),
                    g,
                )
            if record.temporal is not None:
                te = iri(f"{item}/extent/temporal")
                add(ste, iri(vocab.HAS_TEMPORAL_EXTENT), te, g)
                add(te, iri(RDF_TYPE), iri(vocab.TEMPORAL_EXTENT), g)
                self._write_temporal(te, record.temporal)

        for name in sorted(record.attributes):
            prop = property_map.get(name) or f"{vocab.NMC}attribute/{name}"
            for term in record.attributes[name]:
                digest = hashlib.sha256(
                    f"{prop} {term.n3()}".encode("utf-8")
                ).hexdigest()[:12]
                obs = iri(f"{item}/obs/{digest}")
                oc = iri(f"{item}/observations")
                add(item_term, iri(vocab.SOSA_IS_FEATURE_OF_INTEREST_OF), oc, g)
                add(oc, iri(RDF_TYPE), iri(vocab.SOSA_OBSERVATION_COLLECTION), g)
                add(oc, iri(vocab.SOSA_HAS_MEMBER), obs, g)
                add(obs, iri(RDF_TYPE), iri(vocab.SOSA_OBSERVATION), g)
                add(obs, iri(vocab.SOSA_OBSERVED_PROPERTY), iri(prop), g)
                add(obs, iri(vocab.SOSA_HAS_SIMPLE_RESULT), term, g)
                if term.is_iri and type_property is not None and prop == type_property:
                    add(entity_term, iri(RDF_TYPE), term, g)

    def _write_temporal(self, te: Term, value: TemporalValue) -> None:
        add = self.store.add
        g = GRAPH_CONTENT

        def stamp(prop: str, prec_prop: str, instant: Instant) -> None:
            add(te, iri(prop), literal(instant.xsd_datetime(), datatype=XSD_DATETIME), g)
            add(te, iri(prec_prop), literal(str(instant.precision), datatype=XSD_INTEGER), g)

        if value.kind == "instant":
            stamp(vocab.INSTANT_TIME, vocab.INSTANT_PRECISION, value.instant)
        else:
            if value.start is not None:
                stamp(vocab.START_TIME, vocab.START_PRECISION, value.start)
            if value.end is not None:
                stamp(vocab.END_TIME, vocab.END_PRECISION, value.end)

    # -- alignment

    def align(self, item_iri: str, external_iri: str) -> None:
        """Record a sameAs link; set semantics, no inference."""
        for value in (item_iri, external_iri):
            if not is_absolute_iri(value):
                raise ValueError(f"alignment needs absolute IRIs, got {value!r}")
        self.store.add(iri(item_iri), iri(OWL_SAMEAS), iri(external_iri), GRAPH_ALIGNMENT)

    # -- reading

    def layers(self) -> list[str]:
        return sorted(
            q.object.value
            for q in self.store.match(
                iri(self.map_content_iri), iri(vocab.HAS_MAP_CONTENT_TYPE), None, GRAPH_CONTENT
            )
        )

    def layer_label(self, layer_iri: str) -> str:
        value = self.store.value(iri(layer_iri), iri(RDFS_LABEL), GRAPH_CONTENT)
        return value.value if value else layer_iri

    def layer_items(self, layer_iri: str) -> list[str]:
        return sorted(
            q.object.value
            for q in self.store.match(iri(layer_iri), iri(vocab.HAS_MAP_ITEM), None, GRAPH_CONTENT)
        )

    def item(self, item_iri: str) -> ContentItem:
        store = self.store
        subject = iri(item_iri)
        label_term = store.value(subject, iri(RDFS_LABEL), GRAPH_CONTENT)
        kind_term = store.value(subject, iri(vocab.ITEM_KIND), GRAPH_CONTENT)
        entity_term = store.value(subject, iri(vocab.REPRESENTS), GRAPH_CONTENT)
        entity = entity_term.value if entity_term else item_iri

        classes = sorted(
            q.object.value
            for q in store.match(iri(entity), iri(RDF_TYPE), None, GRAPH_CONTENT)
            if q.object.is_iri
        )

        spatial: Geometry | None = None
        temporal: TemporalValue | None = None
        for ste_quad in store.match(subject, iri(vocab.HAS_SPATIOTEMPORAL_EXTENT), None, GRAPH_CONTENT):
            ste = ste_quad.object
            se = store.value(ste, iri(vocab.HAS_SPATIAL_EXTENT), GRAPH_CONTENT)
            if se is not None:
                wkt = store.value(se, iri(vocab.GEO_AS_WKT), GRAPH_CONTENT)
                if wkt is not None:
                    spatial = parse_wkt(wkt.value)
            te = store.value(ste, iri(vocab.HAS_TEMPORAL_EXTENT), GRAPH_CONTENT)
            if te is not None:
                temporal = self._read_temporal(te)

        observations = []
        for oc_quad in store.match(subject, iri(vocab.SOSA_IS_FEATURE_OF_INTEREST_OF), None, GRAPH_CONTENT):
            for member in store.match(oc_quad.object, iri(vocab.SOSA_HAS_MEMBER), None, GRAPH_CONTENT):
                prop = store.value(member.object, iri(vocab.SOSA_OBSERVED_PROPERTY), GRAPH_CONTENT)
                result = store.value(member.object, iri(vocab.SOSA_HAS_SIMPLE_RESULT), GRAPH_CONTENT)
                if prop is not None and result is not None:
                    observations.append(Observation(prop.value, result))
        observations.sort(key=lambda o: (o.property, o.result.n3()))

        alignments = sorted(
            q.object.value for q in store.match(subject, iri(OWL_SAMEAS), None, GRAPH_ALIGNMENT)
        )
        symbolizers = sorted(
            q.object.value
            for q in store.match(subject, iri(vocab.IS_SYMBOLIZED_BY), None, GRAPH_SYMBOLIZATION)
        )
        primary = store.value(subject, iri(vocab.HAS_PRIMARY_SYMBOLIZER), GRAPH_SYMBOLIZATION)

        return ContentItem(
            iri=item_iri,
            entity=entity,
            label=label_term.value if label_term else "",
            kind=kind_term.value if kind_term else "event",
            classes=classes,
            spatial=spatial,
            temporal=temporal,
            observations=observations,
            alignments=alignments,
            symbolizers=symbolizers,
            primary_symbolizer=primary.value if primary else None,
        )

    def _read_temporal(self, te: Term) -> TemporalValue | None:
        store = self.store

        def read(prop: str, prec_prop: str) -> Instant | None:
            value = store.value(te, iri(prop), GRAPH_CONTENT)
            if value is None:
                return None
            prec = store.value(te, iri(prec_prop), GRAPH_CONTENT)
            return parse_time(value.value, int(prec.value) if prec else None)

        instant = read(vocab.INSTANT_TIME, vocab.INSTANT_PRECISION)
        if instant is not None:
            return instant_value(instant)
        start = read(vocab.START_TIME, vocab.START_PRECISION)
        end = read(vocab.END_TIME, vocab.END_PRECISION)
        if start is None and end is None:
            return None
        return interval_value(start, end)

    def items(self, layer_iri: str | None = None) -> list[ContentItem]:
        if layer_iri is not None:
            iris = self.layer_items(layer_iri)
        else:
            iris = sorted(
                {
                    q.object.value
                    for q in self.store.match(None, iri(vocab.HAS_MAP_ITEM), None, GRAPH_CONTENT)
                }
            )
        return [self.item(i) for i in iris]

    def item_for_entity(self, layer_iri: str, entity_iri: str) -> str:
        return item_iri_for(layer_iri, entity_iri)

    # -- filtering and timeline

    def query_items(
        self,
        layer: str | None = None,
        kind: str | None = None,
        window: tuple[Instant | None, Instant | None] | None = None,
        bbox: tuple[float, float, float, float] | None = None,
    ) -> list[ContentItem]:
        """Items matching every given filter; items without temporal data
        are visible in every window (background layers must not vanish)."""
        out = []
        for item in self.items(layer):
            if kind is not None and item.kind != kind:
                continue
            if window is not None:
                if item.temporal is not None and not item.temporal.intersects(*window):
                    continue
            if bbox is not None:
                if item.spatial is None or not _bbox_intersects(item.spatial, bbox):
                    continue
            out.append(item)
        return out

    def timeline(
        self, items: list[ContentItem]
    ) -> tuple[list[ContentItem], tuple[Instant, Instant] | None]:
        """Items ordered by interval start (ties by IRI), undated last,
        plus the overall [min start, max end] extent of the dated ones."""
        dated = [i for i in items if i.temporal is not None]
        undated = sorted((i for i in items if i.temporal is None), key=lambda i: i.iri)
        dated.sort(key=lambda i: (i.temporal.effective_start().sort_key(), i.iri))
        extent = None
        if dated:
            starts = [i.temporal.effective_start() for i in dated]
            ends = [i.temporal.effective_end() for i in dated]
            extent = (
                min(starts, key=lambda inst: inst.sort_key()),
                max(ends, key=lambda inst: inst.latest_days()),
            )
        return dated + undated, extent

    # -- symbolization graph

    def clear_symbolization(self) -> int:
        return self.store.remove_graph(GRAPH_SYMBOLIZATION)

    def assign_symbolizer(self, item_iri: str, symbolizer_iri: str, primary: bool = False) -> None:
        self.store.add(
            iri(item_iri), iri(vocab.IS_SYMBOLIZED_BY), iri(symbolizer_iri), GRAPH_SYMBOLIZATION
        )
        if primary:
            self.store.add(
                iri(item_iri), iri(vocab.HAS_PRIMARY_SYMBOLIZER), iri(symbolizer_iri), GRAPH_SYMBOLIZATION
            )


def _bbox_intersects(geom: Geometry, bbox: tuple[float, float, float, float]) -> bool:
    if geom.kind == "point":
        lon, lat = geom.coordinates
        return point_in_bbox(lon, lat, bbox)
    g_min_lon, g_min_lat, g_max_lon, g_max_lat = geom.bbox()
    min_lon, min_lat, max_lon, max_lat = bbox
    return not (
        g_max_lon < min_lon or g_min_lon > max_lon or g_max_lat < min_lat or g_min_lat > max_lat
    )
