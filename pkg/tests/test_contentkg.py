import random

import pytest

from narramap import vocab
from narramap.contentkg import ContentGraph, LayerDescriptor, SourceDescriptor
from narramap.features import FeatureCollection, FeatureRecord
from narramap.geo import point
from narramap.store import GRAPH_ALIGNMENT, GRAPH_CONTENT, GraphStore
from narramap.temporal import Instant, instant_value, interval_value, parse_time
from narramap.terms import OWL_SAMEAS, iri, literal
from narramap.turtle import parse_turtle

WD = "http://www.wikidata.org/entity/"
LAYER = LayerDescriptor("https://narramap.dev/layer/test", "Test layer", "event")


def sedjenane_record() -> FeatureRecord:
    return FeatureRecord(
        entity="https://example.org/local/sedjenane",
        label="Battle of Sedjenane",
        geometry=point(9.2439, 37.0564),
        temporal=interval_value(parse_time("1943-02-26"), parse_time("1943-03-04")),
        attributes={"v0": [literal("Sejenane")]},
    )


def soviet_union_record() -> FeatureRecord:
    return FeatureRecord(
        entity=WD + "Q15180",
        label="Soviet Union",
        geometry=None,
        temporal=interval_value(parse_time("1922-12-30"), parse_time("1991-12-26")),
    )


def test_ingest_creates_extents_and_observations():
    content = ContentGraph()
    report = content.ingest(
        FeatureCollection([sedjenane_record()]),
        LAYER,
        property_map={"v0": "http://www.wikidata.org/prop/direct/P276"},
        source=SourceDescriptor("https://query.wikidata.org/sparql", "ab" * 32),
    )
    assert len(report.items) == 1 and not report.merged
    item = content.item(report.items[0])
    assert item.label == "Battle of Sedjenane"
    assert item.temporal.start.iso() == "1943-02-26"
    assert item.temporal.end.iso() == "1943-03-04"
    assert item.spatial.coordinates == (9.2439, 37.0564)
    assert item.observed("http://www.wikidata.org/prop/direct/P276")[0].value == "Sejenane"
    assert item.is_mappable


def test_temporal_only_object_is_valid():
    content = ContentGraph()
    layer = LayerDescriptor("https://narramap.dev/layer/objects", "Objects", "object")
    report = content.ingest(FeatureCollection([soviet_union_record()]), layer)
    item = content.item(report.items[0])
    assert item.spatial is None
    assert item.temporal.start.iso() == "1922-12-30"
    assert item.temporal.end.iso() == "1991-12-26"
    assert item.kind == "object"
    assert vocab.OBJECT_CLASS in item.classes
    assert item.is_mappable


def test_empty_collection_still_creates_layer():
    content = ContentGraph()
    report = content.ingest(FeatureCollection([]), LAYER)
    assert report.items == []
    assert LAYER.iri in content.layers()


def test_ingest_is_idempotent():
    collection = FeatureCollection([sedjenane_record(), soviet_union_record()])
    once = ContentGraph()
    once.ingest(collection, LAYER)
    twice = ContentGraph()
    twice.ingest(collection, LAYER)
    report = twice.ingest(collection, LAYER)
    assert set(report.merged) == set(report.items)
    assert once.store.quads == twice.store.quads


def test_align_set_semantics_and_validation():
    content = ContentGraph()
    report = content.ingest(FeatureCollection([sedjenane_record()]), LAYER)
    item = report.items[0]
    content.align(item, WD + "Q4872340")
    content.align(item, WD + "Q4872340")
    quads = list(content.store.match(iri(item), iri(OWL_SAMEAS), None, GRAPH_ALIGNMENT))
    assert len(quads) == 1
    assert content.item(item).alignments == [WD + "Q4872340"]
    with pytest.raises(ValueError):
        content.align(item, "relative/iri")


def test_query_items_time_windows():
    content = ContentGraph()
    content.ingest(FeatureCollection([sedjenane_record(), soviet_union_record()]), LAYER)
    undated = FeatureRecord(entity="https://example.org/bg", label="Background", geometry=point(0, 0))
    content.ingest(FeatureCollection([undated]), LAYER)

    window_1943 = (parse_time("1943-01-01"), parse_time("1943-12-31"))
    hits = {i.label for i in content.query_items(LAYER.iri, window=window_1943)}
    assert hits == {"Battle of Sedjenane", "Soviet Union", "Background"}

    before = (None, parse_time("1900-01-01"))
    hits = {i.label for i in content.query_items(LAYER.iri, window=before)}
    assert hits == {"Background"}  # items without temporal data match any window

    assert len(content.query_items()) == 3  # no filter: everything


def test_query_items_bbox_and_kind():
    content = ContentGraph()
    content.ingest(FeatureCollection([sedjenane_record(), soviet_union_record()]), LAYER)
    near_tunisia = (8.0, 36.0, 10.0, 38.0)
    hits = content.query_items(LAYER.iri, bbox=near_tunisia)
    assert [i.label for i in hits] == ["Battle of Sedjenane"]
    assert content.query_items(LAYER.iri, kind="object") == [
        i for i in content.items(LAYER.iri) if i.kind == "object"
    ]


def test_window_subset_monotonicity_random_windows():
    content = ContentGraph()
    rng = random.Random(5)
    records = []
    for i in range(40):
        year = rng.randint(1937, 1945)
        records.append(
            FeatureRecord(
                entity=f"https://example.org/e{i:02d}",
                label=f"E{i}",
                temporal=instant_value(Instant(year, rng.randint(1, 12), rng.randint(1, 28))),
            )
        )
    content.ingest(FeatureCollection(records), LAYER)
    for _ in range(50):
        y1, y2 = sorted(rng.sample(range(1936, 1947), 2))
        inner = (Instant(y1, 6, 1), Instant(y2, 6, 1))
        outer = (Instant(y1, 1, 1), Instant(y2, 12, 28))
        inner_items = {i.iri for i in content.query_items(LAYER.iri, window=inner)}
        outer_items = {i.iri for i in content.query_items(LAYER.iri, window=outer)}
        assert inner_items <= outer_items


def test_timeline_ordering_and_extent():
    content = ContentGraph()
    records = [
        FeatureRecord(entity="https://e.org/b", label="B",
                      temporal=instant_value(parse_time("1941-06-22"))),
        FeatureRecord(entity="https://e.org/a", label="A",
                      temporal=instant_value(parse_time("1941-06-22"))),
        FeatureRecord(entity="https://e.org/c", label="C",
                      temporal=interval_value(parse_time("1939-09-01"), parse_time("1945-09-02"))),
        FeatureRecord(entity="https://e.org/z", label="Z"),
    ]
    content.ingest(FeatureCollection(records), LAYER)
    ordered, extent = content.timeline(content.items(LAYER.iri))
    labels = [i.label for i in ordered]
    assert labels[0] == "C"
    # identical starts break ties by item IRI: deterministic across runs
    assert ordered[1].iri < ordered[2].iri
    assert sorted(labels[1:3]) == ["A", "B"]
    again, _ = content.timeline(content.items(LAYER.iri))
    assert [i.iri for i in again] == [i.iri for i in ordered]
    assert labels[-1] == "Z"  # undated items trail
    assert extent[0].iso() == "1939-09-01"
    assert extent[1].iso() == "1945-09-02"


def test_single_instant_extent_is_degenerate():
    content = ContentGraph()
    record = FeatureRecord(entity="https://e.org/x", label="X",
                           temporal=instant_value(parse_time("1908-06-30")))
    content.ingest(FeatureCollection([record]), LAYER)
    _, extent = content.timeline(content.items(LAYER.iri))
    assert extent[0] == extent[1]


def test_turtle_round_trip_preserves_quads():
    content = ContentGraph()
    content.ingest(FeatureCollection([sedjenane_record(), soviet_union_record()]), LAYER)
    content.align(content.layer_items(LAYER.iri)[0], WD + "Q4872340")
    payload = content.store.export_turtle(GRAPH_CONTENT)
    fresh = GraphStore()
    fresh.import_turtle(payload, GRAPH_CONTENT)
    original = {q for q in content.store.quads if q.graph == GRAPH_CONTENT}
    assert fresh.quads == original


def test_ontology_vocabulary_document_is_complete():
    """Every class and relation of the two graph modules exists in the
    shipped vocabulary artifact."""
    from pathlib import Path

    shipped = Path(vocab.__file__).parent / "vocab" / "ontology.ttl"
    triples = parse_turtle(shipped.read_bytes())
    subjects = {t[0].value for t in triples}
    expected = (
        set(vocab.CONTENT_CLASSES)
        | set(vocab.CONTENT_RELATIONS)
        | set(vocab.CARTO_CLASSES)
        | set(vocab.CARTO_RELATIONS)
    )
    missing = expected - subjects
    assert not missing, f"vocabulary artifact lacks {missing}"
    # and the shipped bytes match the generator exactly
    assert shipped.read_bytes() == vocab.vocabulary_turtle()


def test_ontology_core_names_present():
    # the ontology houses every concept of the content and carto modules
    for name in (
        "MapContent", "MapContentType", "MapContentItem", "SpatiotemporalExtent",
        "SpatialExtent", "TemporalExtent", "Object", "Event",
    ):
        assert vocab.NMC + name in vocab.CONTENT_CLASSES
    for name in (
        "FeatureTypeStyle", "Symbol", "Symbolizer", "Stroke", "Fill", "Legend", "LegendItem",
    ):
        assert vocab.NCA + name in vocab.CARTO_CLASSES
    for name in ("hasMapContentType", "hasMapItem", "hasSpatiotemporalExtent",
                 "hasSpatialExtent", "hasTemporalExtent", "represents"):
        assert vocab.NMC + name in vocab.CONTENT_RELATIONS
    for name in ("hasStyle", "hasSymbol", "hasSymbolizer", "hasLegend",
                 "hasLegendItem", "isSymbolizedBy"):
        assert vocab.NCA + name in vocab.CARTO_RELATIONS
    # SOSA observation terms are reused, not redefined
    assert vocab.SOSA_OBSERVATION.startswith("http://www.w3.org/ns/sosa/")
