from pathlib import Path

import pytest

from narramap.contentkg import ContentGraph, LayerDescriptor
from narramap.features import FeatureCollection, FeatureRecord
from narramap.portrayal import (
    And,
    ClassIs,
    CountAtLeast,
    DurationOver,
    Fill,
    HasRelation,
    InClosure,
    Or,
    PortrayalRule,
    RuleBase,
    RuleValidationError,
    StartWithin,
    Stroke,
    Symbolizer,
    UnresolvedSymbolizer,
    compile_to_sparql,
    dump_rulebase,
    evaluate,
    explain,
    generate_legend,
    load_rulebase,
    shacl_export,
)
from narramap.queries import PORTRAYAL, normalize_query_text
from narramap.session import load_bundled_rulebase
from narramap.store import GRAPH_SYMBOLIZATION, GraphStore
from narramap.temporal import interval_value, parse_time
from narramap.terms import XSD_DATETIME, iri, literal
from narramap.turtle import parse_turtle
from narramap.vocab import IS_SYMBOLIZED_BY

WD = "http://www.wikidata.org/entity/"
WDT = "http://www.wikidata.org/prop/direct/"
GOLDEN_DIR = Path(__file__).parent.parent / "src" / "narramap" / "rules" / "goldens"

GOLDEN_FOR_RULE = {
    PORTRAYAL + "rule_us_participation": "rule_us_participation.rq",
    PORTRAYAL + "rule_many_participants": "rule_many_participants.rq",
    PORTRAYAL + "rule_long_duration": "rule_long_duration.rq",
    PORTRAYAL + "rule_started_1939": "rule_started_1939.rq",
}


def point_symbolizer(iri_text: str) -> Symbolizer:
    return Symbolizer(iri_text, "point", marker_shape="circle", marker_size=8.0, fill=Fill())


# ---------------------------------------------------------------------------
# style model validation


def test_symbolizer_field_discipline():
    with pytest.raises(RuleValidationError):
        Symbolizer("https://e.org/s", "point", marker_shape="circle", marker_size=0, fill=Fill())
    with pytest.raises(RuleValidationError):
        Symbolizer("https://e.org/s", "line", fill=Fill())
    with pytest.raises(RuleValidationError):
        Symbolizer("https://e.org/s", "polygon", fill=Fill())  # needs stroke too
    Symbolizer("https://e.org/s", "polygon", fill=Fill(), stroke=Stroke())
    with pytest.raises(RuleValidationError):
        Fill(color="red")
    with pytest.raises(RuleValidationError):
        Stroke(width=-1)
    with pytest.raises(RuleValidationError):
        Fill(opacity=1.5)


def test_rulebase_validation():
    sym = point_symbolizer("https://e.org/sym")
    rule = PortrayalRule("https://e.org/r1", 0, ClassIs(WD + "Q178561"), sym.iri)
    with pytest.raises(UnresolvedSymbolizer):
        RuleBase(rules=[rule], symbolizers={})
    dup = PortrayalRule("https://e.org/r2", 0, ClassIs(WD + "Q1"), sym.iri)
    with pytest.raises(RuleValidationError):
        RuleBase(rules=[rule, dup], symbolizers={sym.iri: sym})


def test_condition_validation():
    with pytest.raises(RuleValidationError):
        And([])
    with pytest.raises(RuleValidationError):
        Or([])
    with pytest.raises(RuleValidationError):
        CountAtLeast(WDT + "P710", -1)
    with pytest.raises(RuleValidationError):
        DurationOver(-5)


# ---------------------------------------------------------------------------
# local evaluation on a handcrafted graph


def small_graph() -> GraphStore:
    store = GraphStore()

    def battle(qid, start=None, end=None, participants=(), in_closure=True):
        s = iri(WD + qid)
        store.add(s, iri(WDT + "P31"), iri(WD + "Q178561"))
        if in_closure:
            store.add(s, iri(WDT + "P361"), iri(WD + "Q362"))
        if start:
            store.add(s, iri(WDT + "P580"), literal(f"+{start}T00:00:00Z", datatype=XSD_DATETIME))
        if end:
            store.add(s, iri(WDT + "P582"), literal(f"+{end}T00:00:00Z", datatype=XSD_DATETIME))
        for p in participants:
            store.add(s, iri(WDT + "P710"), iri(WD + p))

    battle("B1", "1943-02-26", "1943-03-04", ["Q145", "Q183", "Q38"])        # 6 days
    battle("B2", "1939-05-01", "1939-08-01", ["Q30", "Q145"])                # US + 1939 + 92 days
    battle("B3", "1941-01-01", "1941-01-31", ["Q1", "Q2", "Q3", "Q4", "Q5"])  # 5 participants, 30 days
    battle("B4", "1941-01-01", "1941-02-01", ["Q1", "Q2", "Q3", "Q4", "Q5", "Q6"])  # 6, 31 days
    battle("B5", participants=["Q30"])                                        # no dates
    battle("B6", "1940-01-01", "1940-06-01", ["Q30"], in_closure=False)       # outside closure
    return store


def paper_rules() -> RuleBase:
    return load_bundled_rulebase()


def test_us_rule_requires_closure_membership():
    result = evaluate(paper_rules(), small_graph())
    rule0 = PORTRAYAL + "symbolizer_0"
    assigned = {s for s, sym in result.assignments if sym == rule0}
    assert WD + "B2" in assigned
    assert WD + "B5" in assigned
    assert WD + "B6" not in assigned  # battle-typed, US participant, but disconnected


def test_count_threshold_is_strictly_greater():
    result = evaluate(paper_rules(), small_graph())
    rule1 = PORTRAYAL + "symbolizer_1"
    assigned = {s for s, sym in result.assignments if sym == rule1}
    assert assigned == {WD + "B4"}  # six participants pass, five do not


def test_duration_strictly_greater_than_30():
    result = evaluate(paper_rules(), small_graph())
    rule2 = PORTRAYAL + "symbolizer_2"
    assigned = {s for s, sym in result.assignments if sym == rule2}
    assert WD + "B2" in assigned      # 92 days
    assert WD + "B4" in assigned      # 31 days
    assert WD + "B3" not in assigned  # exactly 30 days
    assert WD + "B1" not in assigned  # 6 days


def test_start_window_is_exclusive():
    result = evaluate(paper_rules(), small_graph())
    rule3 = PORTRAYAL + "symbolizer_3"
    assigned = {s for s, sym in result.assignments if sym == rule3}
    assert assigned == {WD + "B2"}
    # B3/B4 start 1941; a battle starting exactly on Jan 1 1939 is excluded
    store = small_graph()
    store.add(iri(WD + "B7"), iri(WDT + "P31"), iri(WD + "Q178561"))
    store.add(iri(WD + "B7"), iri(WDT + "P361"), iri(WD + "Q362"))
    store.add(iri(WD + "B7"), iri(WDT + "P580"), literal("+1939-01-01T00:00:00Z", datatype=XSD_DATETIME))
    result = evaluate(paper_rules(), store)
    assigned = {s for s, sym in result.assignments if sym == rule3}
    assert WD + "B7" not in assigned


def test_missing_temporal_data_is_skipped_with_diagnostics():
    result = evaluate(paper_rules(), small_graph())
    skipped = {(s, r) for s, r, _ in result.diagnostics}
    assert (WD + "B5", PORTRAYAL + "rule_long_duration") in skipped
    assert (WD + "B5", PORTRAYAL + "rule_started_1939") in skipped
    # the run still completed and assigned other rules to B5
    assert (WD + "B5", PORTRAYAL + "symbolizer_0") in result.assignments


def test_multi_match_keeps_all_assignments_with_primary_by_priority():
    result = evaluate(paper_rules(), small_graph())
    b2 = WD + "B2"
    b2_assignments = {sym for s, sym in result.assignments if s == b2}
    assert b2_assignments == {
        PORTRAYAL + "symbolizer_0",
        PORTRAYAL + "symbolizer_2",
        PORTRAYAL + "symbolizer_3",
    }
    assert result.primary[b2] == PORTRAYAL + "symbolizer_0"  # lowest priority number wins


def test_evaluation_writes_quads_and_is_deterministic():
    store = small_graph()
    first = evaluate(paper_rules(), store)
    quads_first = {q for q in store.quads if q.graph == GRAPH_SYMBOLIZATION}
    store2 = small_graph()
    evaluate(paper_rules(), store2)
    quads_second = {q for q in store2.quads if q.graph == GRAPH_SYMBOLIZATION}
    assert quads_first == quads_second
    assert any(q.predicate.value == IS_SYMBOLIZED_BY for q in quads_first)
    assert first.assignments == evaluate(paper_rules(), small_graph()).assignments


def test_or_condition():
    sym = point_symbolizer(PORTRAYAL + "s")
    rule = PortrayalRule(
        "https://e.org/r", 0,
        Or([HasRelation(WDT + "P710", WD + "Q30"), HasRelation(WDT + "P710", WD + "Q38")]),
        sym.iri,
    )
    rulebase = RuleBase([rule], {sym.iri: sym})
    result = evaluate(rulebase, small_graph())
    subjects = {s for s, _ in result.assignments}
    assert WD + "B1" in subjects and WD + "B2" in subjects


# ---------------------------------------------------------------------------
# content-graph mode


def content_with_items() -> tuple[ContentGraph, str]:
    layer = LayerDescriptor("https://narramap.dev/layer/b", "Battles", "event")
    content = ContentGraph()
    records = [
        FeatureRecord(
            entity=WD + "B1",
            label="Sedjenane",
            temporal=interval_value(parse_time("1943-02-26"), parse_time("1943-03-04")),
            attributes={
                "type": [iri(WD + "Q178561")],
                "part": [iri(WD + "Q362")],
                "who": [iri(WD + "Q145")],
            },
        ),
        FeatureRecord(
            entity=WD + "B2",
            label="Long battle",
            temporal=interval_value(parse_time("1939-05-01"), parse_time("1939-08-01")),
            attributes={"type": [iri(WD + "Q178561")], "part": [iri(WD + "Q362")],
                        "who": [iri(WD + "Q30")]},
        ),
    ]
    content.ingest(
        FeatureCollection(records),
        layer,
        property_map={"type": WDT + "P31", "part": WDT + "P361", "who": WDT + "P710"},
        type_property=WDT + "P31",
    )
    return content, layer.iri


def test_content_mode_evaluation_matches_raw_semantics():
    content, layer = content_with_items()
    result = evaluate(paper_rules(), content, layer=layer)
    by_symbolizer = {}
    for item_iri, sym in result.assignments:
        by_symbolizer.setdefault(sym, set()).add(content.item(item_iri).entity)
    assert by_symbolizer[PORTRAYAL + "symbolizer_2"] == {WD + "B2"}
    assert by_symbolizer[PORTRAYAL + "symbolizer_3"] == {WD + "B2"}
    assert by_symbolizer[PORTRAYAL + "symbolizer_0"] == {WD + "B2"}
    item = content.item([i for i, s in result.assignments][0])
    assert item.symbolizers  # written into the derived graph


def test_explain_traces():
    traces = explain(WD + "B1", paper_rules(), small_graph())
    by_rule = {t.rule: t for t in traces}
    duration_trace = by_rule[PORTRAYAL + "rule_long_duration"]
    assert duration_trace.satisfied is False
    detail = [c for c in duration_trace.conditions if "duration" in c.condition][0]
    assert "duration=6" in detail.detail and "threshold=30" in detail.detail

    us_trace = by_rule[PORTRAYAL + "rule_us_participation"]
    assert us_trace.satisfied is False  # B1 has no US participant

    missing = explain(WD + "B5", paper_rules(), small_graph())
    t = {x.rule: x for x in missing}[PORTRAYAL + "rule_started_1939"]
    assert t.skipped == "missing start time"


def test_explain_satisfied_subconditions():
    traces = explain(WD + "B2", paper_rules(), small_graph())
    us = {t.rule: t for t in traces}[PORTRAYAL + "rule_us_participation"]
    assert us.satisfied is True
    leaf_results = [c.satisfied for c in us.conditions if c.satisfied is not None]
    assert leaf_results == [True, True, True]


# ---------------------------------------------------------------------------
# compilation and goldens


def test_compiled_rules_match_goldens():
    for rule in paper_rules().ordered_rules():
        golden = (GOLDEN_DIR / GOLDEN_FOR_RULE[rule.iri]).read_text("utf-8")
        assert normalize_query_text(compile_to_sparql(rule)) == normalize_query_text(golden), rule.iri


def test_compile_rejects_empty_and():
    with pytest.raises(RuleValidationError):
        And([])


def test_compile_or_condition_unions():
    sym = point_symbolizer(PORTRAYAL + "s")
    rule = PortrayalRule(
        "https://e.org/r", 0,
        Or([HasRelation(WDT + "P710", WD + "Q30"), HasRelation(WDT + "P710", WD + "Q38")]),
        sym.iri,
    )
    text = compile_to_sparql(rule)
    assert "UNION" in text


def test_legend_one_item_per_used_symbolizer():
    legend = generate_legend(paper_rules())
    assert len(legend.items) == 4
    assert [i.symbolizer for i in legend.items] == [
        PORTRAYAL + f"symbolizer_{n}" for n in range(4)
    ]
    assert legend.items[0].label == "Battles with United States participation"


def test_legend_shared_symbolizer_merges_labels():
    sym = point_symbolizer(PORTRAYAL + "shared")
    rules = [
        PortrayalRule("https://e.org/r1", 0, ClassIs(WD + "Q1"), sym.iri, label="first"),
        PortrayalRule("https://e.org/r2", 1, ClassIs(WD + "Q2"), sym.iri, label="second"),
    ]
    legend = generate_legend(RuleBase(rules, {sym.iri: sym}))
    assert len(legend.items) == 1
    assert legend.items[0].label == "first; second"


def test_legend_omits_unused_symbolizers():
    sym_used = point_symbolizer(PORTRAYAL + "used")
    sym_unused = point_symbolizer(PORTRAYAL + "unused")
    rules = [PortrayalRule("https://e.org/r1", 0, ClassIs(WD + "Q1"), sym_used.iri)]
    legend = generate_legend(RuleBase(rules, {s.iri: s for s in (sym_used, sym_unused)}))
    assert [i.symbolizer for i in legend.items] == [sym_used.iri]


def test_rulebase_json_round_trip():
    rulebase = paper_rules()
    reloaded = load_rulebase(dump_rulebase(rulebase))
    assert [r.iri for r in reloaded.ordered_rules()] == [r.iri for r in rulebase.ordered_rules()]
    assert reloaded.symbolizers.keys() == rulebase.symbolizers.keys()
    for rule, back in zip(rulebase.ordered_rules(), reloaded.ordered_rules()):
        assert compile_to_sparql(rule) == compile_to_sparql(back)


def test_shacl_export_contains_construct_rules():
    payload = shacl_export(paper_rules())
    triples = parse_turtle(payload)
    sh = "http://www.w3.org/ns/shacl#"
    constructs = [t for t in triples if t[1].value == sh + "construct"]
    assert len(constructs) == 4
    assert any("isSymbolizedBy" in t[2].value for t in constructs)
    orders = [t for t in triples if t[1].value == sh + "order"]
    assert sorted(t[2].value for t in orders) == ["0", "1", "2", "3"]


def test_count_anti_monotone_in_threshold():
    store = small_graph()
    sizes = []
    for threshold in (1, 3, 5, 7):
        sym = point_symbolizer(PORTRAYAL + "s")
        rule = PortrayalRule("https://e.org/r", 0, CountAtLeast(WDT + "P710", threshold), sym.iri)
        result = evaluate(RuleBase([rule], {sym.iri: sym}), store, write=False)
        sizes.append({s for s, _ in result.assignments})
    assert sizes[0] >= sizes[1] >= sizes[2] >= sizes[3]
