"""Portrayal rules: styles, symbols, symbolizers, legends.

A rule base is an ordered set of (condition -> symbolizer) rules.  Four
condition families cover relation membership (class, closure, specific
relation), relation counts, durations, and start-time windows; And/Or
compose them.  Rules evaluate locally against either a raw RDF graph or
a content graph of ingested items; every rule can also be compiled to an
equivalent SPARQL CONSTRUCT query for remote evaluation.

Missing data is open-world: an item without a start time simply does
not satisfy a temporal condition.  Such items are skipped for that rule
and listed in the diagnostics report, never a hard failure.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field

from . import vocab
from .contentkg import ContentGraph
from .queries import (
    Arith,
    BindPattern,
    Cmp,
    ConstructQuery,
    EndpointProfile,
    FilterPattern,
    GroupPattern,
    OrderKey,
    PORTRAYAL,
    SelectQuery,
    SubSelect,
    TriplePattern,
    UnionPattern,
    ValuesPattern,
    Var,
    Aggregate,
    WIKIDATA_PROFILE,
    expand_curie,
    serialize,
)
from .store import GRAPH_SYMBOLIZATION, GraphStore
from .temporal import (
    Instant,
    InsufficientPrecision,
    duration_days,
    parse_time,
)
from .terms import (
    RDF_TYPE,
    RDFS_LABEL,
    XSD_DATETIME,
    XSD_INTEGER,
    Term,
    iri,
    is_absolute_iri,
    literal,
)

SH = "http://www.w3.org/ns/shacl#"

_COLOR = re.compile(r"^#[0-9a-fA-F]{6}$")


class RuleValidationError(ValueError):
    pass


class UnresolvedSymbolizer(RuleValidationError):
    pass


# ---------------------------------------------------------------------------
# Style model


@dataclass(frozen=True)
class Fill:
    color: str = "#808080"
    opacity: float = 1.0

    def __post_init__(self) -> None:
        if not _COLOR.match(self.color):
            raise RuleValidationError(f"fill color must be #RRGGBB, got {self.color!r}")
        if not 0.0 <= self.opacity <= 1.0:
            raise RuleValidationError("fill opacity must be within [0, 1]")


@dataclass(frozen=True)
class Stroke:
    color: str = "#000000"
    width: float = 1.0
    opacity: float = 1.0
    dash: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not _COLOR.match(self.color):
            raise RuleValidationError(f"stroke color must be #RRGGBB, got {self.color!r}")
        if self.width <= 0:
            raise RuleValidationError("stroke width must be positive")
        if not 0.0 <= self.opacity <= 1.0:
            raise RuleValidationError("stroke opacity must be within [0, 1]")


@dataclass(frozen=True)
class Symbolizer:
    """Exactly the fields of its geometry kind are populated."""

    iri: str
    geometry_kind: str  # point | line | polygon
    marker_shape: str | None = None
    marker_size: float | None = None
    fill: Fill | None = None
    stroke: Stroke | None = None

    def __post_init__(self) -> None:
        if not is_absolute_iri(self.iri):
            raise RuleValidationError(f"symbolizer IRI must be absolute: {self.iri!r}")
        if self.geometry_kind == "point":
            if not self.marker_shape or self.marker_size is None or self.fill is None:
                raise RuleValidationError(f"{self.iri}: point symbolizer needs marker shape, size, fill")
            if self.marker_size <= 0:
                raise RuleValidationError("marker size must be positive")
            if self.stroke is not None:
                raise RuleValidationError("point symbolizer does not take a stroke")
        elif self.geometry_kind == "line":
            if self.stroke is None or self.fill is not None or self.marker_shape:
                raise RuleValidationError(f"{self.iri}: line symbolizer takes a stroke only")
        elif self.geometry_kind == "polygon":
            if self.fill is None or self.stroke is None or self.marker_shape:
                raise RuleValidationError(f"{self.iri}: polygon symbolizer needs fill and stroke")
        else:
            raise RuleValidationError(f"unknown geometry kind {self.geometry_kind!r}")


@dataclass(frozen=True)
class LegendItem:
    label: str
    symbolizer: str


@dataclass(frozen=True)
class Legend:
    iri: str
    items: tuple[LegendItem, ...]


@dataclass(frozen=True)
class Symbol:
    iri: str
    symbolizers: tuple[str, ...]
    legend_label: str


@dataclass(frozen=True)
class FeatureTypeStyle:
    iri: str
    target_layer: str | None
    symbols: tuple[Symbol, ...]


# ---------------------------------------------------------------------------
# Conditions


@dataclass(frozen=True)
class ClassIs:
    class_iri: str


@dataclass(frozen=True)
class InClosure:
    root: str
    down: str
    up: str | None = None


@dataclass(frozen=True)
class HasRelation:
    property: str
    object: str


@dataclass(frozen=True)
class CountAtLeast:
    property: str
    threshold: int

    def __post_init__(self) -> None:
        if self.threshold < 0:
            raise RuleValidationError("count threshold must be >= 0")


@dataclass(frozen=True)
class DurationOver:
    days: int

    def __post_init__(self) -> None:
        if self.days < 0:
            raise RuleValidationError("duration threshold must be >= 0")


@dataclass(frozen=True)
class StartWithin:
    """Start time strictly inside (start, end), endpoint-exclusive like a
    pair of dateTime comparisons."""

    start: Instant
    end: Instant


@dataclass(frozen=True)
class And:
    conditions: tuple

    def __init__(self, conditions):
        conditions = tuple(conditions)
        if not conditions:
            raise RuleValidationError("And needs at least one condition")
        object.__setattr__(self, "conditions", conditions)


@dataclass(frozen=True)
class Or:
    conditions: tuple

    def __init__(self, conditions):
        conditions = tuple(conditions)
        if not conditions:
            raise RuleValidationError("Or needs at least one condition")
        object.__setattr__(self, "conditions", conditions)


@dataclass(frozen=True)
class PortrayalRule:
    iri: str
    priority: int
    condition: object
    symbolizer: str
    label: str = ""
    subject_var: str = "item"
    count_value_var: str = "value"
    count_alias: str = "valueCount"


@dataclass
class RuleBase:
    rules: list[PortrayalRule]
    symbolizers: dict[str, Symbolizer]
    style_iri: str = PORTRAYAL + "style"
    target_layer: str | None = None

    def __post_init__(self) -> None:
        priorities = [r.priority for r in self.rules]
        if len(set(priorities)) != len(priorities):
            raise RuleValidationError("rule priorities must be unique within a rule base")
        for rule in self.rules:
            if rule.symbolizer not in self.symbolizers:
                raise UnresolvedSymbolizer(
                    f"rule {rule.iri} names unknown symbolizer {rule.symbolizer}"
                )

    def ordered_rules(self) -> list[PortrayalRule]:
        return sorted(self.rules, key=lambda r: r.priority)


# ---------------------------------------------------------------------------
# Data accessors (raw RDF graph vs content graph)


class RawGraphAccessor:
    """Reads rule inputs straight off source-shaped triples."""

    def __init__(self, store: GraphStore, profile: EndpointProfile = WIKIDATA_PROFILE):
        self.store = store
        self.profile = profile
        self._closure_cache: dict[tuple[str, str, str | None], frozenset[str]] = {}

    def subjects(self) -> list[str]:
        seen = {
            q.subject.value
            for q in self.store.match(None, None, None, None)
            if q.subject.is_iri
        }
        return sorted(seen)

    def classes(self, subject: str) -> set[str]:
        return {
            q.object.value
            for q in self.store.match(iri(subject), iri(self.profile.type_property), None, None)
            if q.object.is_iri
        }

    def relation_values(self, subject: str, property_iri: str) -> list[Term]:
        return [q.object for q in self.store.match(iri(subject), iri(property_iri), None, None)]

    def _instant(self, subject: str, property_iri: str) -> Instant | None:
        for term in self.relation_values(subject, property_iri):
            if term.is_literal:
                try:
                    return parse_time(term.value)
                except ValueError:
                    continue
        return None

    def start_instant(self, subject: str) -> Instant | None:
        return self._instant(subject, self.profile.start_time_property)

    def end_instant(self, subject: str) -> Instant | None:
        return self._instant(subject, self.profile.end_time_property)

    def in_closure(self, subject: str, condition: InClosure) -> bool:
        key = (condition.root, condition.down, condition.up)
        members = self._closure_cache.get(key)
        if members is None:
            members = self._compute_closure(condition)
            self._closure_cache[key] = members
        return subject in members

    def _compute_closure(self, condition: InClosure) -> frozenset[str]:
        members = {condition.root}
        queue = deque([condition.root])
        down = iri(condition.down)
        while queue:
            node = queue.popleft()
            for quad in self.store.match(iri(node), down, None, None):
                if quad.object.is_iri and quad.object.value not in members:
                    members.add(quad.object.value)
                    queue.append(quad.object.value)
        if condition.up:
            up = iri(condition.up)
            queue = deque([condition.root])
            while queue:
                node = queue.popleft()
                for quad in self.store.match(None, up, iri(node), None):
                    if quad.subject.is_iri and quad.subject.value not in members:
                        members.add(quad.subject.value)
                        queue.append(quad.subject.value)
        return frozenset(members)


class ContentAccessor:
    """Reads rule inputs from ingested MapContentItems.

    Subjects are item IRIs; relation values come from observations, time
    from the temporal extent, and closure edges from observations of the
    closure properties across the item set.
    """

    def __init__(self, content: ContentGraph, layer: str | None = None):
        self.content = content
        self.items = {item.iri: item for item in content.items(layer)}
        self._entity_of = {item.iri: item.entity for item in self.items.values()}
        self._closure_cache: dict[tuple[str, str, str | None], frozenset[str]] = {}

    def subjects(self) -> list[str]:
        return sorted(self.items)

    def classes(self, subject: str) -> set[str]:
        item = self.items[subject]
        return set(item.classes)

    def relation_values(self, subject: str, property_iri: str) -> list[Term]:
        return self.items[subject].observed(property_iri)

    def start_instant(self, subject: str) -> Instant | None:
        temporal = self.items[subject].temporal
        return temporal.effective_start() if temporal else None

    def end_instant(self, subject: str) -> Instant | None:
        temporal = self.items[subject].temporal
        return temporal.effective_end() if temporal else None

    def in_closure(self, subject: str, condition: InClosure) -> bool:
        key = (condition.root, condition.down, condition.up)
        members = self._closure_cache.get(key)
        if members is None:
            members = self._compute_closure(condition)
            self._closure_cache[key] = members
        return self._entity_of[subject] in members

    def _compute_closure(self, condition: InClosure) -> frozenset[str]:
        down_edges: dict[str, set[str]] = {}
        up_edges: dict[str, set[str]] = {}
        for item in self.items.values():
            for obs in item.observations:
                if not obs.result.is_iri:
                    continue
                if obs.property == condition.down:
                    down_edges.setdefault(item.entity, set()).add(obs.result.value)
                if condition.up and obs.property == condition.up:
                    up_edges.setdefault(obs.result.value, set()).add(item.entity)
        members = {condition.root}
        queue = deque([condition.root])
        while queue:
            node = queue.popleft()
            for nxt in sorted(down_edges.get(node, ())) + sorted(up_edges.get(node, ())):
                if nxt not in members:
                    members.add(nxt)
                    queue.append(nxt)
        return frozenset(members)


# ---------------------------------------------------------------------------
# Local evaluation


class _Skip(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass
class ConditionTrace:
    condition: str
    satisfied: bool | None
    detail: str = ""


@dataclass
class RuleTrace:
    rule: str
    satisfied: bool
    skipped: str | None = None
    conditions: list[ConditionTrace] = field(default_factory=list)


@dataclass
class EvaluationResult:
    assignments: set[tuple[str, str]]
    primary: dict[str, str]
    per_rule: dict[str, int]
    diagnostics: list[tuple[str, str, str]]  # (subject, rule, reason)


def _describe(condition) -> str:
    if isinstance(condition, ClassIs):
        return f"class is <{condition.class_iri}>"
    if isinstance(condition, InClosure):
        updown = f"<{condition.down}>" + (f" / <{condition.up}>" if condition.up else "")
        return f"in closure of <{condition.root}> via {updown}"
    if isinstance(condition, HasRelation):
        return f"has <{condition.property}> -> <{condition.object}>"
    if isinstance(condition, CountAtLeast):
        return f"count of <{condition.property}> >= {condition.threshold}"
    if isinstance(condition, DurationOver):
        return f"duration > {condition.days} days"
    if isinstance(condition, StartWithin):
        return f"start inside ({condition.start.iso()}, {condition.end.iso()})"
    if isinstance(condition, And):
        return "all of"
    if isinstance(condition, Or):
        return "any of"
    return type(condition).__name__


def _check(condition, subject: str, accessor, trace: list[ConditionTrace] | None) -> bool:
    def record(satisfied: bool | None, detail: str = "") -> None:
        if trace is not None:
            trace.append(ConditionTrace(_describe(condition), satisfied, detail))

    if isinstance(condition, And):
        record(None)
        for c in condition.conditions:  # short-circuit: failed conjunct ends the rule
            if not _check(c, subject, accessor, trace):
                return False
        return True
    if isinstance(condition, Or):
        record(None)
        for c in condition.conditions:
            if _check(c, subject, accessor, trace):
                return True
        return False
    if isinstance(condition, ClassIs):
        ok = condition.class_iri in accessor.classes(subject)
        record(ok)
        return ok
    if isinstance(condition, InClosure):
        ok = accessor.in_closure(subject, condition)
        record(ok)
        return ok
    if isinstance(condition, HasRelation):
        ok = any(
            t.is_iri and t.value == condition.object
            for t in accessor.relation_values(subject, condition.property)
        )
        record(ok)
        return ok
    if isinstance(condition, CountAtLeast):
        values = {t.n3() for t in accessor.relation_values(subject, condition.property)}
        ok = len(values) >= condition.threshold
        record(ok, f"count={len(values)}, threshold={condition.threshold}")
        return ok
    if isinstance(condition, DurationOver):
        start = accessor.start_instant(subject)
        end = accessor.end_instant(subject)
        if start is None or end is None:
            record(False, "skipped: missing temporal extent")
            raise _Skip("missing temporal extent")
        try:
            days = duration_days(start, end)
        except (InsufficientPrecision, ValueError) as exc:
            record(False, f"skipped: {exc}")
            raise _Skip(str(exc)) from None
        ok = days > condition.days
        record(ok, f"duration={days}, threshold={condition.days}")
        return ok
    if isinstance(condition, StartWithin):
        start = accessor.start_instant(subject)
        if start is None:
            record(False, "skipped: missing start time")
            raise _Skip("missing start time")
        ok = (
            start.earliest_days() > condition.start.earliest_days()
            and start.earliest_days() < condition.end.earliest_days()
        )
        record(ok, f"start={start.iso()}")
        return ok
    raise RuleValidationError(f"unknown condition {type(condition).__name__}")


def evaluate(
    rulebase: RuleBase,
    store: GraphStore | ContentGraph,
    layer: str | None = None,
    profile: EndpointProfile = WIKIDATA_PROFILE,
    write: bool = True,
) -> EvaluationResult:
    """Single-pass forward evaluation over every subject.

    All matching rules contribute an assignment; the highest-priority
    (lowest number) match becomes the subject's primary symbolizer.
    Assignments are written into the derived-symbolization graph unless
    ``write=False``.
    """
    if isinstance(store, ContentGraph):
        accessor = ContentAccessor(store, layer)
        target_store = store.store
    else:
        accessor = RawGraphAccessor(store, profile)
        target_store = store

    assignments: set[tuple[str, str]] = set()
    primary: dict[str, str] = {}
    per_rule: dict[str, int] = {rule.iri: 0 for rule in rulebase.rules}
    diagnostics: list[tuple[str, str, str]] = []

    rules = rulebase.ordered_rules()
    for subject in accessor.subjects():
        for rule in rules:
            try:
                matched = _check(rule.condition, subject, accessor, None)
            except _Skip as skip:
                diagnostics.append((subject, rule.iri, skip.reason))
                continue
            if matched:
                assignments.add((subject, rule.symbolizer))
                per_rule[rule.iri] += 1
                if subject not in primary:
                    primary[subject] = rule.symbolizer

    if write:
        if isinstance(store, ContentGraph):
            for subject, symbolizer in sorted(assignments):
                store.assign_symbolizer(subject, symbolizer, primary.get(subject) == symbolizer)
        else:
            for subject, symbolizer in sorted(assignments):
                target_store.add(
                    iri(subject), iri(vocab.IS_SYMBOLIZED_BY), iri(symbolizer), GRAPH_SYMBOLIZATION
                )
                if primary.get(subject) == symbolizer:
                    target_store.add(
                        iri(subject),
                        iri(vocab.HAS_PRIMARY_SYMBOLIZER),
                        iri(symbolizer),
                        GRAPH_SYMBOLIZATION,
                    )
    return EvaluationResult(assignments, primary, per_rule, diagnostics)


def explain(
    subject: str,
    rulebase: RuleBase,
    store: GraphStore | ContentGraph,
    layer: str | None = None,
    profile: EndpointProfile = WIKIDATA_PROFILE,
) -> list[RuleTrace]:
    """Per-rule trace of the sub-condition values for one subject."""
    if isinstance(store, ContentGraph):
        accessor = ContentAccessor(store, layer)
    else:
        accessor = RawGraphAccessor(store, profile)
    traces = []
    for rule in rulebase.ordered_rules():
        conditions: list[ConditionTrace] = []
        try:
            satisfied = _check(rule.condition, subject, accessor, conditions)
            traces.append(RuleTrace(rule.iri, satisfied, None, conditions))
        except _Skip as skip:
            traces.append(RuleTrace(rule.iri, False, skip.reason, conditions))
    return traces


# ---------------------------------------------------------------------------
# Compilation to SPARQL


def _flatten_and(condition) -> list:
    if isinstance(condition, And):
        out = []
        for c in condition.conditions:
            out.extend(_flatten_and(c))
        return out
    return [condition]


def _condition_patterns(condition, subject: Var, rule: PortrayalRule, profile: EndpointProfile) -> list:
    if isinstance(condition, ClassIs):
        return [TriplePattern(subject, iri(profile.type_property), iri(condition.class_iri))]
    if isinstance(condition, InClosure):
        down_branch = GroupPattern(
            [TriplePattern(iri(condition.root), iri(condition.down), subject, star=True)]
        )
        if condition.up is None:
            return [down_branch]
        up_branch = GroupPattern(
            [TriplePattern(subject, iri(condition.up), iri(condition.root), star=True)]
        )
        return [UnionPattern([down_branch, up_branch])]
    if isinstance(condition, HasRelation):
        return [TriplePattern(subject, iri(condition.property), iri(condition.object))]
    if isinstance(condition, DurationOver):
        start, end, duration = Var("start_time"), Var("end_time"), Var("duration")
        return [
            TriplePattern(subject, iri(profile.start_time_property), start),
            TriplePattern(subject, iri(profile.end_time_property), end),
            BindPattern(Arith("-", end, start), duration),
            FilterPattern(
                Cmp(">", duration, literal(str(condition.days), datatype=XSD_INTEGER))
            ),
        ]
    if isinstance(condition, StartWithin):
        start = Var("start_time")
        return [
            TriplePattern(subject, iri(profile.start_time_property), start),
            FilterPattern(
                Cmp(">", start, literal(condition.start.xsd_datetime(), datatype=XSD_DATETIME))
            ),
            FilterPattern(
                Cmp("<", start, literal(condition.end.xsd_datetime(), datatype=XSD_DATETIME))
            ),
        ]
    if isinstance(condition, Or):
        branches = [
            GroupPattern(_condition_patterns(c, subject, rule, profile)) for c in condition.conditions
        ]
        return [UnionPattern(branches)]
    if isinstance(condition, And):
        out = []
        for c in condition.conditions:
            out.extend(_condition_patterns(c, subject, rule, profile))
        return out
    if isinstance(condition, CountAtLeast):
        raise RuleValidationError("count conditions compile at the rule level")
    raise RuleValidationError(f"cannot compile condition {type(condition).__name__}")


def compile_to_sparql(rule: PortrayalRule, profile: EndpointProfile = WIKIDATA_PROFILE) -> str:
    """A CONSTRUCT query semantically equivalent to the rule.

    A rule containing one count condition compiles to the
    subselect-with-HAVING shape (count strictly greater than
    threshold - 1, i.e. at least threshold).
    """
    subject = Var(rule.subject_var)
    template = [TriplePattern(subject, iri(vocab.IS_SYMBOLIZED_BY), iri(rule.symbolizer))]
    conjuncts = _flatten_and(rule.condition)
    counts = [c for c in conjuncts if isinstance(c, CountAtLeast)]
    others = [c for c in conjuncts if not isinstance(c, CountAtLeast)]
    if len(counts) > 1:
        raise RuleValidationError("at most one count condition per rule can be compiled")

    if counts:
        count = counts[0]
        value_var = Var(rule.count_value_var)
        alias = Var(rule.count_alias)
        inner_children: list = []
        for condition in others:
            inner_children.extend(_condition_patterns(condition, subject, rule, profile))
        inner_children.append(TriplePattern(subject, iri(count.property), value_var))
        inner = SelectQuery(
            projections=[subject, (Aggregate("COUNT", value_var), alias)],
            where=GroupPattern(inner_children),
            group_by=[subject],
            having=Cmp(">", alias, literal(str(count.threshold - 1), datatype=XSD_INTEGER)),
        )
        where = GroupPattern([SubSelect(inner)])
    else:
        children: list = []
        for condition in conjuncts:
            children.extend(_condition_patterns(condition, subject, rule, profile))
        where = GroupPattern(children)
    return serialize(ConstructQuery(template, where))


# ---------------------------------------------------------------------------
# Legend


def generate_legend(rulebase: RuleBase) -> Legend:
    """One legend item per symbolizer used by any rule, in priority order;
    rules sharing a symbolizer share one entry."""
    ordered: list[str] = []
    labels: dict[str, list[str]] = {}
    for rule in rulebase.ordered_rules():
        if rule.symbolizer not in labels:
            labels[rule.symbolizer] = []
            ordered.append(rule.symbolizer)
        labels[rule.symbolizer].append(rule.label or rule.iri)
    items = tuple(LegendItem("; ".join(labels[s]), s) for s in ordered)
    return Legend(rulebase.style_iri + "/legend", items)


def build_style(rulebase: RuleBase) -> FeatureTypeStyle:
    symbols = []
    for index, item in enumerate(generate_legend(rulebase).items):
        symbols.append(
            Symbol(f"{rulebase.style_iri}/symbol/{index}", (item.symbolizer,), item.label)
        )
    return FeatureTypeStyle(rulebase.style_iri, rulebase.target_layer, tuple(symbols))


# ---------------------------------------------------------------------------
# Rule base file format (JSON)


def _condition_from_json(data: dict) -> object:
    kind = data.get("type")
    if kind == "and":
        return And([_condition_from_json(c) for c in data["conditions"]])
    if kind == "or":
        return Or([_condition_from_json(c) for c in data["conditions"]])
    if kind == "class_is":
        return ClassIs(expand_curie(data["class"]))
    if kind == "in_closure":
        return InClosure(
            expand_curie(data["root"]),
            expand_curie(data["down"]),
            expand_curie(data["up"]) if data.get("up") else None,
        )
    if kind == "has_relation":
        return HasRelation(expand_curie(data["property"]), expand_curie(data["object"]))
    if kind == "count_at_least":
        return CountAtLeast(expand_curie(data["property"]), int(data["threshold"]))
    if kind == "duration_over":
        return DurationOver(int(data["days"]))
    if kind == "start_within":
        return StartWithin(parse_time(data["start"]), parse_time(data["end"]))
    raise RuleValidationError(f"unknown condition type {kind!r}")


def _condition_to_json(condition) -> dict:
    if isinstance(condition, And):
        return {"type": "and", "conditions": [_condition_to_json(c) for c in condition.conditions]}
    if isinstance(condition, Or):
        return {"type": "or", "conditions": [_condition_to_json(c) for c in condition.conditions]}
    if isinstance(condition, ClassIs):
        return {"type": "class_is", "class": condition.class_iri}
    if isinstance(condition, InClosure):
        return {
            "type": "in_closure",
            "root": condition.root,
            "down": condition.down,
            "up": condition.up,
        }
    if isinstance(condition, HasRelation):
        return {"type": "has_relation", "property": condition.property, "object": condition.object}
    if isinstance(condition, CountAtLeast):
        return {"type": "count_at_least", "property": condition.property, "threshold": condition.threshold}
    if isinstance(condition, DurationOver):
        return {"type": "duration_over", "days": condition.days}
    if isinstance(condition, StartWithin):
        return {"type": "start_within", "start": condition.start.iso(), "end": condition.end.iso()}
    raise RuleValidationError(f"cannot serialize condition {type(condition).__name__}")


def _symbolizer_from_json(data: dict) -> Symbolizer:
    fill = Fill(**data["fill"]) if data.get("fill") else None
    stroke = None
    if data.get("stroke"):
        stroke_data = dict(data["stroke"])
        stroke_data["dash"] = tuple(stroke_data.get("dash", ()))
        stroke = Stroke(**stroke_data)
    return Symbolizer(
        iri=expand_curie(data["iri"]),
        geometry_kind=data["geometry"],
        marker_shape=data.get("marker_shape"),
        marker_size=data.get("marker_size"),
        fill=fill,
        stroke=stroke,
    )


def symbolizer_to_json(sym: Symbolizer) -> dict:
    out: dict = {"iri": sym.iri, "geometry": sym.geometry_kind}
    if sym.marker_shape:
        out["marker_shape"] = sym.marker_shape
        out["marker_size"] = sym.marker_size
    if sym.fill:
        out["fill"] = {"color": sym.fill.color, "opacity": sym.fill.opacity}
    if sym.stroke:
        out["stroke"] = {
            "color": sym.stroke.color,
            "width": sym.stroke.width,
            "opacity": sym.stroke.opacity,
            "dash": list(sym.stroke.dash),
        }
    return out


def load_rulebase(data: bytes | str | dict) -> RuleBase:
    if isinstance(data, (bytes, str)):
        data = json.loads(data)
    symbolizers = {}
    for sym_data in data.get("symbolizers", []):
        sym = _symbolizer_from_json(sym_data)
        symbolizers[sym.iri] = sym
    rules = []
    for rule_data in data.get("rules", []):
        rules.append(
            PortrayalRule(
                iri=expand_curie(rule_data["iri"]),
                priority=int(rule_data["priority"]),
                condition=_condition_from_json(rule_data["condition"]),
                symbolizer=expand_curie(rule_data["symbolizer"]),
                label=rule_data.get("label", ""),
                subject_var=rule_data.get("subject_var", "item"),
                count_value_var=rule_data.get("count_value_var", "value"),
                count_alias=rule_data.get("count_alias", "valueCount"),
            )
        )
    return RuleBase(
        rules=rules,
        symbolizers=symbolizers,
        style_iri=expand_curie(data.get("style", PORTRAYAL + "style")),
        target_layer=data.get("target_layer"),
    )


def dump_rulebase(rulebase: RuleBase) -> bytes:
    doc = {
        "style": rulebase.style_iri,
        "target_layer": rulebase.target_layer,
        "symbolizers": [
            symbolizer_to_json(rulebase.symbolizers[key]) for key in sorted(rulebase.symbolizers)
        ],
        "rules": [
            {
                "iri": rule.iri,
                "priority": rule.priority,
                "label": rule.label,
                "subject_var": rule.subject_var,
                "count_value_var": rule.count_value_var,
                "count_alias": rule.count_alias,
                "condition": _condition_to_json(rule.condition),
                "symbolizer": rule.symbolizer,
            }
            for rule in rulebase.ordered_rules()
        ],
    }
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# SHACL export


def shacl_export(rulebase: RuleBase, profile: EndpointProfile = WIKIDATA_PROFILE) -> bytes:
    """The rule base as SHACL SPARQLRules, for interoperable stores."""
    from .turtle import serialize_turtle

    triples = []
    rdf_type = iri(RDF_TYPE)
    for rule in rulebase.ordered_rules():
        shape = iri(rule.iri + "/shape")
        node = iri(rule.iri)
        triples.append((shape, rdf_type, iri(SH + "NodeShape")))
        triples.append((shape, iri(SH + "rule"), node))
        triples.append((node, rdf_type, iri(SH + "SPARQLRule")))
        triples.append((node, iri(SH + "construct"), literal(compile_to_sparql(rule, profile))))
        triples.append((node, iri(SH + "order"), literal(str(rule.priority), datatype=XSD_INTEGER)))
        if rule.label:
            triples.append((node, iri(RDFS_LABEL), literal(rule.label, language="en")))
    return serialize_turtle(triples)
