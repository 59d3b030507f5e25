"""SPARQL construction for the exploration query families.

Everything here is a pure function from an immutable spec to query text:
property discovery (which edges leave/enter a node set), N-degree
relationship paths, property enrichment, transitive/disjunctive
sub-event closure, and area-based retrieval.  Queries are built as a
small AST and rendered by :func:`serialize`, which is deterministic down
to the byte so query text can be golden-tested and used as a cache key.

Endpoint differences (how labels are fetched, which property carries
coordinates, whether polygon containment is available) are isolated in
:class:`EndpointProfile`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .geo import Geometry, format_wkt
from .terms import RDF_TYPE, RDFS_LABEL, Term, is_absolute_iri, iri, literal

GEO = "http://www.opengis.net/ont/geosparql#"
GEOF = "http://www.opengis.net/def/function/geosparql/"
WD = "http://www.wikidata.org/entity/"
WDT = "http://www.wikidata.org/prop/direct/"
WIKIBASE = "http://wikiba.se/ontology#"
BD = "http://www.bigdata.com/rdf#"
CARTO = "https://narramap.dev/ns/carto#"
PORTRAYAL = "https://narramap.dev/portrayal/"
WKT_LITERAL = GEO + "wktLiteral"

# Fixed prefix block: every serialized query carries exactly these lines.
QUERY_PREFIXES: tuple[tuple[str, str], ...] = (
    ("wd", WD),
    ("wdt", WDT),
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
    ("geo", GEO),
    ("geof", GEOF),
    ("wikibase", WIKIBASE),
    ("bd", BD),
    ("symbolizer", CARTO),
    ("portrayal", PORTRAYAL),
)

DEFAULT_MAX_DEGREE = 6


class QueryValidationError(ValueError):
    pass


class UnsupportedShape(QueryValidationError):
    """The endpoint profile cannot express this area filter."""


def expand_curie(text: str) -> str:
    """Expand a prefixed name using the fixed query prefixes."""
    if ":" in text:
        prefix, local = text.split(":", 1)
        for name, ns in QUERY_PREFIXES:
            if name == prefix:
                return ns + local
    return text


_BRACE_PAD = re.compile(r"([{}()])")


def normalize_query_text(text: str) -> str:
    """Layout-insensitive form of a query: braces and parens become
    standalone tokens, whitespace runs collapse.  Two serializations of
    the same query compare equal under this form regardless of
    indentation style."""
    return " ".join(_BRACE_PAD.sub(r" \1 ", text).split())


# ---------------------------------------------------------------------------
# Endpoint profiles


@dataclass(frozen=True)
class EndpointProfile:
    """Declarative description of how to talk to one family of endpoints."""

    name: str
    label_mechanism: str  # "wikidata_service" | "rdfs_label"
    coordinate_property: str
    type_property: str
    start_time_property: str
    end_time_property: str
    instant_time_property: str
    property_namespace: str | None = None
    polygon_filter: bool = False
    search_mechanism: str = "sparql"  # "sparql" | "wikidata_api"
    search_api_url: str | None = None


WIKIDATA_PROFILE = EndpointProfile(
    name="wikidata",
    label_mechanism="wikidata_service",
    coordinate_property=WDT + "P625",
    type_property=WDT + "P31",
    start_time_property=WDT + "P580",
    end_time_property=WDT + "P582",
    instant_time_property=WDT + "P585",
    property_namespace=WDT,
    polygon_filter=False,
    search_mechanism="wikidata_api",
    search_api_url="https://www.wikidata.org/w/api.php",
)

GENERIC_PROFILE = EndpointProfile(
    name="generic",
    label_mechanism="rdfs_label",
    coordinate_property=GEO + "asWKT",
    type_property=RDF_TYPE,
    start_time_property="https://narramap.dev/ns/content#startTime",
    end_time_property="https://narramap.dev/ns/content#endTime",
    instant_time_property="https://narramap.dev/ns/content#instantTime",
    property_namespace=None,
    polygon_filter=True,
    search_mechanism="sparql",
)

BUILTIN_PROFILES: dict[str, EndpointProfile] = {
    "wikidata": WIKIDATA_PROFILE,
    "generic": GENERIC_PROFILE,
}


def profile_by_name(name: str) -> EndpointProfile:
    try:
        return BUILTIN_PROFILES[name]
    except KeyError:
        raise QueryValidationError(f"unknown endpoint profile {name!r}") from None


# ---------------------------------------------------------------------------
# Exploration specs


@dataclass(frozen=True)
class Hop:
    """One traversal step: direction plus the property to follow."""

    direction: str  # "forward" | "backward"
    property: str

    def __post_init__(self) -> None:
        if self.direction not in ("forward", "backward"):
            raise QueryValidationError(f"hop direction must be forward/backward, got {self.direction!r}")
        if not is_absolute_iri(self.property):
            raise QueryValidationError(f"hop property must be an absolute IRI, got {self.property!r}")


@dataclass(frozen=True)
class PathSpec:
    start_nodes: frozenset[str]
    hops: tuple[Hop, ...]
    max_degree: int = DEFAULT_MAX_DEGREE

    def __init__(self, start_nodes, hops, max_degree: int = DEFAULT_MAX_DEGREE):
        object.__setattr__(self, "start_nodes", frozenset(start_nodes))
        object.__setattr__(self, "hops", tuple(hops))
        object.__setattr__(self, "max_degree", max_degree)
        if not self.start_nodes:
            raise QueryValidationError("path needs at least one start node")
        for node in self.start_nodes:
            if not is_absolute_iri(node):
                raise QueryValidationError(f"start node is not an absolute IRI: {node!r}")
        if not 1 <= len(self.hops) <= self.max_degree:
            raise QueryValidationError(
                f"relationship degree must be between 1 and {self.max_degree}, got {len(self.hops)}"
            )

    @property
    def degree(self) -> int:
        return len(self.hops)


@dataclass(frozen=True)
class ClosureSpec:
    """Transitive sub-event traversal from a root, optionally two-way."""

    root: str
    down_property: str
    up_property: str | None = None
    max_depth: int | None = None  # None = unbounded

    def __post_init__(self) -> None:
        for value in (self.root, self.down_property):
            if not is_absolute_iri(value):
                raise QueryValidationError(f"not an absolute IRI: {value!r}")
        if self.up_property is not None:
            if not is_absolute_iri(self.up_property):
                raise QueryValidationError(f"not an absolute IRI: {self.up_property!r}")
            if self.up_property == self.down_property:
                raise QueryValidationError("down and up properties must be distinct")
        if self.max_depth is not None and self.max_depth < 1:
            raise QueryValidationError("max_depth must be positive")


@dataclass(frozen=True)
class AreaSpec:
    """A study area: WGS84 bbox or polygon, plus an optional class filter."""

    bbox: tuple[float, float, float, float] | None = None  # min_lon, min_lat, max_lon, max_lat
    polygon: tuple[tuple[float, float], ...] | None = None
    type_filter: str | None = None

    def __post_init__(self) -> None:
        if (self.bbox is None) == (self.polygon is None):
            raise QueryValidationError("area needs exactly one of bbox/polygon")
        if self.bbox is not None:
            min_lon, min_lat, max_lon, max_lat = self.bbox
            if min_lon > max_lon or min_lat > max_lat:
                raise QueryValidationError("bbox minimum exceeds maximum")
            Geometry("point", (min_lon, min_lat))
            Geometry("point", (max_lon, max_lat))
        else:
            Geometry("polygon", (tuple(self.polygon),))
        if self.type_filter is not None and not is_absolute_iri(self.type_filter):
            raise QueryValidationError(f"type filter is not an absolute IRI: {self.type_filter!r}")

    def outer_bbox(self) -> tuple[float, float, float, float]:
        if self.bbox is not None:
            return self.bbox
        return Geometry("polygon", (tuple(self.polygon),)).bbox()


# ---------------------------------------------------------------------------
# Query AST


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


@dataclass(frozen=True)
class Aggregate:
    func: str  # COUNT only, for now
    arg: Var | None = None  # None = *
    distinct: bool = False


@dataclass(frozen=True)
class Cmp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class BoolExpr:
    op: str  # "&&" | "||"
    args: tuple


@dataclass(frozen=True)
class NotExpr:
    expr: object


@dataclass(frozen=True)
class Arith:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str  # builtin name ("STR") or prefixed function ("geof:longitude")
    args: tuple


@dataclass(frozen=True)
class TriplePattern:
    subject: object  # Var | Term
    predicate: object
    object: object
    star: bool = False  # zero-or-more path over a constant predicate


@dataclass(frozen=True)
class GroupPattern:
    children: tuple

    def __init__(self, children):
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class UnionPattern:
    branches: tuple  # of GroupPattern

    def __init__(self, branches):
        object.__setattr__(self, "branches", tuple(branches))


@dataclass(frozen=True)
class OptionalPattern:
    group: GroupPattern


@dataclass(frozen=True)
class FilterPattern:
    expr: object


@dataclass(frozen=True)
class BindPattern:
    expr: object
    var: Var


@dataclass(frozen=True)
class ValuesPattern:
    var: Var
    terms: tuple

    def __init__(self, var, terms):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "terms", tuple(terms))


@dataclass(frozen=True)
class LabelServicePattern:
    language: str


@dataclass(frozen=True)
class OrderKey:
    expr: object
    descending: bool = False


@dataclass(frozen=True)
class SelectQuery:
    projections: tuple  # of Var | tuple[Aggregate, Var]
    where: GroupPattern
    distinct: bool = False
    group_by: tuple = ()
    having: object | None = None
    order_by: tuple = ()
    limit: int | None = None
    offset: int | None = None

    def __init__(self, projections, where, distinct=False, group_by=(), having=None,
                 order_by=(), limit=None, offset=None):
        object.__setattr__(self, "projections", tuple(projections))
        object.__setattr__(self, "where", where)
        object.__setattr__(self, "distinct", distinct)
        object.__setattr__(self, "group_by", tuple(group_by))
        object.__setattr__(self, "having", having)
        object.__setattr__(self, "order_by", tuple(order_by))
        object.__setattr__(self, "limit", limit)
        object.__setattr__(self, "offset", offset)


@dataclass(frozen=True)
class SubSelect:
    query: SelectQuery


@dataclass(frozen=True)
class AskQuery:
    where: GroupPattern


@dataclass(frozen=True)
class ConstructQuery:
    template: tuple  # of TriplePattern
    where: GroupPattern

    def __init__(self, template, where):
        object.__setattr__(self, "template", tuple(template))
        object.__setattr__(self, "where", where)


# ---------------------------------------------------------------------------
# Serialization


def _compact_iri(value: str) -> str:
    for prefix, ns in QUERY_PREFIXES:
        if value.startswith(ns):
            local = value[len(ns):]
            if local and all(c.isalnum() or c in "_-" for c in local):
                return f"{prefix}:{local}"
    return f"<{value}>"


def _render_term(term: Term) -> str:
    if term.is_iri:
        return _compact_iri(term.value)
    if term.is_blank:
        return f"_:{term.value}"
    from .terms import XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, escape_literal

    if term.datatype == XSD_INTEGER:
        return term.value
    if term.datatype in (XSD_DECIMAL, XSD_DOUBLE):
        return term.value
    if term.datatype == XSD_BOOLEAN:
        return term.value
    out = '"' + escape_literal(term.value) + '"'
    if term.language:
        return out + "@" + term.language
    if term.datatype:
        return out + "^^" + _compact_iri(term.datatype)
    return out


def _render_node(node) -> str:
    if isinstance(node, Var):
        return str(node)
    if isinstance(node, Term):
        return _render_term(node)
    raise TypeError(f"cannot render {node!r} in a triple pattern")


def _render_expr(expr) -> str:
    if isinstance(expr, Var):
        return str(expr)
    if isinstance(expr, Term):
        return _render_term(expr)
    if isinstance(expr, Cmp):
        return f"{_render_expr(expr.left)} {expr.op} {_render_expr(expr.right)}"
    if isinstance(expr, BoolExpr):
        return f" {expr.op} ".join(_render_expr(a) for a in expr.args)
    if isinstance(expr, NotExpr):
        return f"!({_render_expr(expr.expr)})"
    if isinstance(expr, Arith):
        return f"({_render_expr(expr.left)} {expr.op} {_render_expr(expr.right)})"
    if isinstance(expr, Call):
        args = ", ".join(_render_expr(a) for a in expr.args)
        return f"{expr.name}({args})"
    if isinstance(expr, Aggregate):
        inner = "*" if expr.arg is None else str(expr.arg)
        if expr.distinct:
            inner = "DISTINCT " + inner
        return f"{expr.func}({inner})"
    raise TypeError(f"cannot render expression {expr!r}")


def _render_pattern(node, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(node, TriplePattern):
        pred = _render_node(node.predicate)
        if node.star:
            pred += "*"
        out.append(f"{pad}{_render_node(node.subject)} {pred} {_render_node(node.object)} .")
    elif isinstance(node, GroupPattern):
        out.append(pad + "{")
        for child in node.children:
            _render_pattern(child, indent + 1, out)
        out.append(pad + "}")
    elif isinstance(node, UnionPattern):
        for i, branch in enumerate(node.branches):
            if i:
                out.append(pad + "UNION")
            _render_pattern(branch, indent, out)
    elif isinstance(node, OptionalPattern):
        out.append(pad + "OPTIONAL {")
        for child in node.group.children:
            _render_pattern(child, indent + 1, out)
        out.append(pad + "}")
    elif isinstance(node, FilterPattern):
        out.append(f"{pad}FILTER({_render_expr(node.expr)})")
    elif isinstance(node, BindPattern):
        out.append(f"{pad}BIND({_render_expr(node.expr)} AS {node.var})")
    elif isinstance(node, ValuesPattern):
        terms = " ".join(_render_term(t) for t in node.terms)
        out.append(f"{pad}VALUES {node.var} {{ {terms} }}")
    elif isinstance(node, LabelServicePattern):
        out.append(pad + "SERVICE wikibase:label {")
        out.append(f'{pad}  bd:serviceParam wikibase:language "{node.language}" .')
        out.append(pad + "}")
    elif isinstance(node, SubSelect):
        out.append(pad + "{")
        _render_select(node.query, indent + 1, out)
        out.append(pad + "}")
    else:
        raise TypeError(f"cannot render pattern {node!r}")


def _render_select(q: SelectQuery, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    parts = []
    for proj in q.projections:
        if isinstance(proj, Var):
            parts.append(str(proj))
        else:
            agg, var = proj
            parts.append(f"({_render_expr(agg)} AS {var})")
    head = "SELECT " + ("DISTINCT " if q.distinct else "") + " ".join(parts)
    out.append(pad + head)
    out.append(pad + "WHERE {")
    for child in q.where.children:
        _render_pattern(child, indent + 1, out)
    out.append(pad + "}")
    if q.group_by:
        out.append(pad + "GROUP BY " + " ".join(str(v) for v in q.group_by))
    if q.having is not None:
        out.append(pad + f"HAVING ({_render_expr(q.having)})")
    if q.order_by:
        keys = []
        for key in q.order_by:
            rendered = _render_expr(key.expr)
            if key.descending:
                keys.append(f"DESC({rendered})")
            elif not isinstance(key.expr, Var):
                keys.append(f"ASC({rendered})")
            else:
                keys.append(rendered)
        out.append(pad + "ORDER BY " + " ".join(keys))
    if q.limit is not None:
        out.append(pad + f"LIMIT {q.limit}")
    if q.offset is not None:
        out.append(pad + f"OFFSET {q.offset}")


def serialize(query) -> str:
    """Deterministic query text: fixed prefixes, two-space indentation."""
    out = [f"PREFIX {name}: <{ns}>" for name, ns in QUERY_PREFIXES]
    out.append("")
    if isinstance(query, SelectQuery):
        _render_select(query, 0, out)
    elif isinstance(query, AskQuery):
        out.append("ASK {")
        for child in query.where.children:
            _render_pattern(child, 1, out)
        out.append("}")
    elif isinstance(query, ConstructQuery):
        out.append("CONSTRUCT {")
        for pattern in query.template:
            _render_pattern(pattern, 1, out)
        out.append("}")
        out.append("WHERE {")
        for child in query.where.children:
            _render_pattern(child, 1, out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {query!r}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Label handling


def label_var(base: Var) -> Var:
    return Var(base.name + "Label")


def _label_patterns(profile: EndpointProfile, language: str, labeled_vars: list[Var]) -> list:
    if profile.label_mechanism == "wikidata_service":
        return [LabelServicePattern(language)]
    patterns = []
    for var in labeled_vars:
        lvar = label_var(var)
        patterns.append(
            OptionalPattern(
                GroupPattern(
                    [
                        TriplePattern(var, iri(RDFS_LABEL), lvar),
                        FilterPattern(
                            Call("LANGMATCHES", (Call("LANG", (lvar,)), literal(language)))
                        ),
                    ]
                )
            )
        )
    return patterns


def _sorted_iris(values) -> list[Term]:
    out = []
    for value in sorted(values):
        if not is_absolute_iri(value):
            raise QueryValidationError(f"not an absolute IRI: {value!r}")
        out.append(iri(value))
    return out


# ---------------------------------------------------------------------------
# Builders


def build_property_discovery(
    nodes,
    direction: str = "forward",
    language: str = "en",
    profile: EndpointProfile = WIKIDATA_PROFILE,
) -> str:
    """Ranked properties incident to a node set, with usage counts.

    This powers the interactive hop choice: the user picks the next
    property from the returned (property, label, count) rows.
    """
    return serialize(property_discovery_ast(nodes, direction, language, profile))


def property_discovery_ast(nodes, direction, language, profile) -> SelectQuery:
    if direction not in ("forward", "backward"):
        raise QueryValidationError(f"direction must be forward/backward, got {direction!r}")
    terms = _sorted_iris(nodes)
    if not terms:
        raise QueryValidationError("node set must not be empty")
    node, prop, other, count = Var("node"), Var("property"), Var("value"), Var("count")
    if direction == "forward":
        edge = TriplePattern(node, prop, other)
    else:
        edge = TriplePattern(other, prop, node)
    inner_children: list = [ValuesPattern(node, terms), edge]
    if profile.property_namespace:
        inner_children.append(
            FilterPattern(
                Call("STRSTARTS", (Call("STR", (prop,)), literal(profile.property_namespace)))
            )
        )
    inner = SelectQuery(
        projections=[prop, (Aggregate("COUNT"), count)],
        where=GroupPattern(inner_children),
        group_by=[prop],
    )
    outer_children: list = [SubSelect(inner)]
    outer_children.extend(_label_patterns(profile, language, [prop]))
    return SelectQuery(
        projections=[prop, label_var(prop), count],
        where=GroupPattern(outer_children),
        order_by=[OrderKey(count, descending=True), OrderKey(prop)],
    )


def build_discovery_for_enrichment(
    entities,
    language: str = "en",
    profile: EndpointProfile = WIKIDATA_PROFILE,
) -> str:
    """Properties available to enrich an entity set, by coverage count."""
    terms = _sorted_iris(entities)
    if not terms:
        raise QueryValidationError("entity set must not be empty")
    node, prop, other, coverage = Var("node"), Var("property"), Var("value"), Var("coverage")
    inner_children: list = [ValuesPattern(node, terms), TriplePattern(node, prop, other)]
    if profile.property_namespace:
        inner_children.append(
            FilterPattern(
                Call("STRSTARTS", (Call("STR", (prop,)), literal(profile.property_namespace)))
            )
        )
    inner = SelectQuery(
        projections=[prop, (Aggregate("COUNT", node, distinct=True), coverage)],
        where=GroupPattern(inner_children),
        group_by=[prop],
    )
    outer_children: list = [SubSelect(inner)]
    outer_children.extend(_label_patterns(profile, language, [prop]))
    query = SelectQuery(
        projections=[prop, label_var(prop), coverage],
        where=GroupPattern(outer_children),
        order_by=[OrderKey(coverage, descending=True), OrderKey(prop)],
    )
    return serialize(query)


def path_position_vars(degree: int) -> list[Var]:
    return [Var(f"n{i}") for i in range(degree + 1)]


def build_path_query(
    spec: PathSpec,
    language: str = "en",
    profile: EndpointProfile = WIKIDATA_PROFILE,
) -> str:
    """N-degree relationship path from the start nodes.

    One variable per path position; the terminal position additionally
    gets its coordinate literal via OPTIONAL, so rows never drop just
    because an entity has no geometry.
    """
    positions = path_position_vars(spec.degree)
    children: list = [ValuesPattern(positions[0], _sorted_iris(spec.start_nodes))]
    for k, hop in enumerate(spec.hops):
        prop = iri(hop.property)
        if hop.direction == "forward":
            children.append(TriplePattern(positions[k], prop, positions[k + 1]))
        else:
            children.append(TriplePattern(positions[k + 1], prop, positions[k]))
    terminal = positions[-1]
    geom = Var(terminal.name + "Geom")
    children.append(
        OptionalPattern(
            GroupPattern([TriplePattern(terminal, iri(profile.coordinate_property), geom)])
        )
    )
    children.extend(_label_patterns(profile, language, positions))
    projections: list = []
    for var in positions:
        projections.extend([var, label_var(var)])
    projections.append(geom)
    query = SelectQuery(projections=projections, where=GroupPattern(children), distinct=True)
    return serialize(query)


def enrichment_columns(properties) -> list[tuple[str, str]]:
    """Deterministic (value-variable, property IRI) pairs for enrichment."""
    return [(f"v{i}", prop) for i, prop in enumerate(sorted(properties))]


def build_enrichment_query(
    entities,
    properties,
    language: str = "en",
    profile: EndpointProfile = WIKIDATA_PROFILE,
) -> str:
    """One OPTIONAL value (+ label) column per requested property."""
    entity_terms = _sorted_iris(entities)
    if not entity_terms:
        raise QueryValidationError("entity set must not be empty")
    if not properties:
        raise QueryValidationError("property set must not be empty")
    entity = Var("entity")
    children: list = [ValuesPattern(entity, entity_terms)]
    labeled = [entity]
    projections: list = [entity, label_var(entity)]
    for var_name, prop in enrichment_columns(properties):
        if not is_absolute_iri(prop):
            raise QueryValidationError(f"not an absolute IRI: {prop!r}")
        value = Var(var_name)
        children.append(OptionalPattern(GroupPattern([TriplePattern(entity, iri(prop), value)])))
        labeled.append(value)
        projections.extend([value, label_var(value)])
    children.extend(_label_patterns(profile, language, labeled))
    query = SelectQuery(projections=projections, where=GroupPattern(children))
    return serialize(query)


def build_closure_query(
    spec: ClosureSpec,
    language: str = "en",
    profile: EndpointProfile = WIKIDATA_PROFILE,
) -> str:
    """All entities transitively connected to the root.

    Unbounded: a UNION of ``root down* ?event`` and ``?event up* root``
    (property-path star semantics include the root itself).  Bounded:
    the UNION expands to explicit chains of length 0..max_depth.
    """
    return serialize(closure_ast(spec, language, profile))


def closure_ast(spec: ClosureSpec, language, profile) -> SelectQuery:
    root = iri(spec.root)
    event = Var("event")
    down = iri(spec.down_property)
    up = iri(spec.up_property) if spec.up_property else None

    if spec.max_depth is None:
        branches = [GroupPattern([TriplePattern(root, down, event, star=True)])]
        if up is not None:
            branches.append(GroupPattern([TriplePattern(event, up, root, star=True)]))
        body: list = [UnionPattern(branches)] if len(branches) > 1 else list(branches[0].children)
    else:
        branches = [GroupPattern([ValuesPattern(event, [root])])]
        for length in range(1, spec.max_depth + 1):
            chain = []
            nodes = [root] + [Var(f"i{k}") for k in range(1, length)] + [event]
            for a, b in zip(nodes, nodes[1:]):
                chain.append(TriplePattern(a, down, b))
            branches.append(GroupPattern(chain))
            if up is not None:
                chain_up = []
                nodes_up = [event] + [Var(f"j{k}") for k in range(1, length)] + [root]
                for a, b in zip(nodes_up, nodes_up[1:]):
                    chain_up.append(TriplePattern(a, up, b))
                branches.append(GroupPattern(chain_up))
        body = [UnionPattern(branches)]

    body.extend(_label_patterns(profile, language, [event]))
    return SelectQuery(
        projections=[event, label_var(event)],
        where=GroupPattern(body),
        distinct=True,
    )


def build_area_query(
    area: AreaSpec,
    language: str = "en",
    profile: EndpointProfile = WIKIDATA_PROFILE,
) -> str:
    """Entities whose coordinates fall inside the study area.

    Bounding boxes become coordinate-component comparisons; polygons use
    the profile's containment filter over a bbox prefilter, or raise
    UnsupportedShape when the profile has none (callers may retry with
    the polygon's bbox).
    """
    if area.polygon is not None and not profile.polygon_filter:
        raise UnsupportedShape(
            f"profile {profile.name!r} has no polygon containment filter; retry with a bbox"
        )
    entity, geom = Var("entity"), Var("geom")
    children: list = [TriplePattern(entity, iri(profile.coordinate_property), geom)]
    if area.type_filter:
        children.append(TriplePattern(entity, iri(profile.type_property), iri(area.type_filter)))
    min_lon, min_lat, max_lon, max_lat = area.outer_bbox()
    lon = Call("geof:longitude", (geom,))
    lat = Call("geof:latitude", (geom,))

    def num(value: float) -> Term:
        from .terms import XSD_DECIMAL

        return literal(repr(float(value)), datatype=XSD_DECIMAL)

    children.append(
        FilterPattern(
            BoolExpr(
                "&&",
                (
                    Cmp(">=", lon, num(min_lon)),
                    Cmp("<=", lon, num(max_lon)),
                    Cmp(">=", lat, num(min_lat)),
                    Cmp("<=", lat, num(max_lat)),
                ),
            )
        )
    )
    if area.polygon is not None:
        ring = tuple(area.polygon)
        wkt = format_wkt(Geometry("polygon", (ring,)))
        children.append(
            FilterPattern(
                Call("geof:sfWithin", (geom, literal(wkt, datatype=WKT_LITERAL)))
            )
        )
    children.extend(_label_patterns(profile, language, [entity]))
    query = SelectQuery(
        projections=[entity, label_var(entity), geom],
        where=GroupPattern(children),
        distinct=True,
    )
    return serialize(query)


def build_entity_search_query(
    text: str,
    language: str = "en",
    profile: EndpointProfile = WIKIDATA_PROFILE,
    limit: int = 10,
) -> str:
    """Label-substring entity lookup used by profiles without a search API."""
    if not text.strip():
        raise QueryValidationError("search text must not be empty")
    entity, lab = Var("entity"), Var("label")
    children = [
        TriplePattern(entity, iri(RDFS_LABEL), lab),
        FilterPattern(Call("LANGMATCHES", (Call("LANG", (lab,)), literal(language)))),
        FilterPattern(
            Call("CONTAINS", (Call("LCASE", (Call("STR", (lab,)),)), literal(text.strip().lower())))
        ),
    ]
    query = SelectQuery(
        projections=[entity, lab],
        where=GroupPattern(children),
        distinct=True,
        order_by=[OrderKey(Call("STRLEN", (Call("STR", (lab,)),))), OrderKey(entity)],
        limit=limit,
    )
    return serialize(query)
