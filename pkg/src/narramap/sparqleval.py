"""Evaluation of the SPARQL subset this toolkit emits.

A tokenizer + recursive-descent parser turns query text back into the
AST from :mod:`narramap.queries`, and an evaluator runs it against a
GraphStore.  Together they stand in for a remote endpoint: bundled
fixtures are recorded by evaluating queries against a bundled graph,
and the same pair backs the loopback HTTP endpoint used by live-mode
tests and demos.

Supported: SELECT / ASK / CONSTRUCT, basic graph patterns, zero-or-more
property paths, UNION, OPTIONAL, FILTER, BIND, single-variable VALUES,
subselects, COUNT aggregation with GROUP BY / HAVING, ORDER BY, LIMIT /
OFFSET, and an emulation of the Wikidata label service (labels resolve
through rdfs:label in the requested language, falling back to the IRI's
local name).

One deliberate deviation from strict SPARQL: subtracting two
xsd:dateTime values yields the integer number of calendar days, so a
duration condition like ``(?end - ?start) > 30`` means "more than 30
days" instead of comparing an xsd:duration against a bare integer.
"""

from __future__ import annotations

import re
from collections import deque

from .geo import parse_wkt, point_in_polygon
from .queries import (
    GEOF,
    WIKIBASE,
    Aggregate,
    Arith,
    AskQuery,
    BindPattern,
    BoolExpr,
    Call,
    Cmp,
    ConstructQuery,
    FilterPattern,
    GroupPattern,
    LabelServicePattern,
    NotExpr,
    OptionalPattern,
    OrderKey,
    SelectQuery,
    SubSelect,
    TriplePattern,
    UnionPattern,
    ValuesPattern,
    Var,
)
from .temporal import datetime_sort_key
from .terms import (
    RDFS_LABEL,
    XSD_BOOLEAN,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    Term,
    iri,
    literal,
)

RDF_TYPE_IRI = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


class SparqlSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnsupportedSparql(ValueError):
    """Valid SPARQL outside the supported subset."""


# ---------------------------------------------------------------------------
# Tokenizer

_KEYWORDS = {
    "SELECT", "DISTINCT", "WHERE", "FILTER", "OPTIONAL", "UNION", "BIND", "AS",
    "VALUES", "SERVICE", "GROUP", "BY", "HAVING", "ORDER", "ASC", "DESC",
    "LIMIT", "OFFSET", "CONSTRUCT", "ASK", "PREFIX", "BASE", "COUNT",
}
_BUILTINS = {
    "STR", "LANG", "LANGMATCHES", "DATATYPE", "BOUND", "ISIRI", "ISURI",
    "ISLITERAL", "ISBLANK", "CONTAINS", "STRSTARTS", "STRENDS", "LCASE",
    "UCASE", "STRLEN", "ABS",
}
_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")
_PNAME = re.compile(r"([A-Za-z_][A-Za-z0-9_\-]*)?:([A-Za-z0-9_][A-Za-z0-9_\-.]*)?")
_VARNAME = re.compile(r"[?$]([A-Za-z_][A-Za-z0-9_]*)")
_NUMBER = re.compile(
    r"[+-]?(?:\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
)
_LANGTAG = re.compile(r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*")
_PUNCT = set("{}(),;.*/")


class _Tok:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind, value, line, column):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column


def _tokenize(text: str) -> list[_Tok]:
    tokens: list[_Tok] = []
    pos, line, col = 0, 1, 1
    n = len(text)

    def advance(count: int):
        nonlocal pos, line, col
        chunk = text[pos : pos + count]
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = count - chunk.rfind("\n")
        else:
            col += count
        pos += count

    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            advance(1)
            continue
        if ch == "#":
            end = text.find("\n", pos)
            advance((end if end != -1 else n) - pos)
            continue
        start_line, start_col = line, col

        if ch == "<":
            close = pos + 1
            is_iri = False
            while close < n:
                c = text[close]
                if c == ">":
                    is_iri = True
                    break
                if c in " \t\r\n<":
                    break
                close += 1
            if is_iri:
                tokens.append(_Tok("iri", text[pos + 1 : close], start_line, start_col))
                advance(close + 1 - pos)
                continue
            op = "<=" if text.startswith("<=", pos) else "<"
            tokens.append(_Tok("op", op, start_line, start_col))
            advance(len(op))
            continue
        if ch == ">":
            op = ">=" if text.startswith(">=", pos) else ">"
            tokens.append(_Tok("op", op, start_line, start_col))
            advance(len(op))
            continue
        if ch == "!":
            op = "!=" if text.startswith("!=", pos) else "!"
            tokens.append(_Tok("op", op, start_line, start_col))
            advance(len(op))
            continue
        if ch == "=":
            tokens.append(_Tok("op", "=", start_line, start_col))
            advance(1)
            continue
        if text.startswith("&&", pos) or text.startswith("||", pos):
            tokens.append(_Tok("op", text[pos : pos + 2], start_line, start_col))
            advance(2)
            continue
        if text.startswith("^^", pos):
            tokens.append(_Tok("^^", "^^", start_line, start_col))
            advance(2)
            continue
        if ch in "+-":
            nxt = text[pos + 1] if pos + 1 < n else ""
            if nxt.isdigit() or nxt == ".":
                m = _NUMBER.match(text, pos)
                tokens.append(_Tok("number", m.group(0), start_line, start_col))
                advance(m.end() - pos)
            else:
                tokens.append(_Tok("op", ch, start_line, start_col))
                advance(1)
            continue
        if ch == "." and pos + 1 < n and text[pos + 1].isdigit():
            m = _NUMBER.match(text, pos)
            tokens.append(_Tok("number", m.group(0), start_line, start_col))
            advance(m.end() - pos)
            continue
        if ch in _PUNCT:
            tokens.append(_Tok(ch, ch, start_line, start_col))
            advance(1)
            continue
        if ch.isdigit():
            m = _NUMBER.match(text, pos)
            tokens.append(_Tok("number", m.group(0), start_line, start_col))
            advance(m.end() - pos)
            continue
        if ch in "?$":
            m = _VARNAME.match(text, pos)
            if not m:
                raise SparqlSyntaxError("malformed variable", start_line, start_col)
            tokens.append(_Tok("var", m.group(1), start_line, start_col))
            advance(m.end() - pos)
            continue
        if ch in "\"'":
            quote = ch
            long = text.startswith(quote * 3, pos)
            delim = quote * 3 if long else quote
            end = pos + len(delim)
            buf = []
            while True:
                if end >= n:
                    raise SparqlSyntaxError("unterminated string", start_line, start_col)
                if text.startswith(delim, end):
                    break
                c = text[end]
                if c == "\\" and end + 1 < n:
                    esc = text[end + 1]
                    mapping = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "'": "'", "\\": "\\"}
                    if esc in mapping:
                        buf.append(mapping[esc])
                        end += 2
                        continue
                buf.append(c)
                end += 1
            tokens.append(_Tok("string", "".join(buf), start_line, start_col))
            advance(end + len(delim) - pos)
            continue
        if ch == "@":
            m = _LANGTAG.match(text, pos)
            if not m:
                raise SparqlSyntaxError("malformed language tag", start_line, start_col)
            tokens.append(_Tok("langtag", m.group(0)[1:], start_line, start_col))
            advance(m.end() - pos)
            continue
        m = _PNAME.match(text, pos)
        if m and ":" in m.group(0):
            prefix, local = m.group(1) or "", (m.group(2) or "")
            raw = f"{prefix}:{local}"
            if local.endswith(".") and not text.startswith(raw + ".", pos):
                local = local.rstrip(".")
            tokens.append(_Tok("pname", (prefix, local), start_line, start_col))
            advance(len(prefix) + 1 + len(local))
            continue
        m = _WORD.match(text, pos)
        if m:
            word = m.group(0)
            upper = word.upper()
            if upper in _KEYWORDS:
                tokens.append(_Tok("kw", upper, start_line, start_col))
            elif upper in _BUILTINS:
                tokens.append(_Tok("builtin", upper, start_line, start_col))
            elif word == "a":
                tokens.append(_Tok("a", "a", start_line, start_col))
            elif word in ("true", "false"):
                tokens.append(_Tok("boolean", word, start_line, start_col))
            else:
                raise SparqlSyntaxError(f"unexpected word {word!r}", start_line, start_col)
            advance(len(word))
            continue
        raise SparqlSyntaxError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(_Tok("eof", None, line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class SparqlParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    @property
    def cur(self) -> _Tok:
        return self.tokens[self.pos]

    def next(self) -> _Tok:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at(self, kind: str, value=None) -> bool:
        tok = self.cur
        return tok.kind == kind and (value is None or tok.value == value)

    def accept(self, kind: str, value=None) -> _Tok | None:
        if self.at(kind, value):
            return self.next()
        return None

    def expect(self, kind: str, value=None) -> _Tok:
        if not self.at(kind, value):
            raise SparqlSyntaxError(
                f"expected {value or kind}, found {self.cur.value!r}",
                self.cur.line,
                self.cur.column,
            )
        return self.next()

    def fail(self, message: str):
        raise SparqlSyntaxError(message, self.cur.line, self.cur.column)

    def parse(self):
        while self.at("kw", "PREFIX") or self.at("kw", "BASE"):
            kw = self.next()
            if kw.value == "PREFIX":
                name = self.expect("pname")
                target = self.expect("iri")
                self.prefixes[name.value[0]] = target.value
            else:
                self.expect("iri")
        if self.at("kw", "SELECT"):
            query = self._select()
        elif self.accept("kw", "ASK"):
            self.accept("kw", "WHERE")
            query = AskQuery(self._group())
        elif self.at("kw", "CONSTRUCT"):
            query = self._construct()
        else:
            self.fail("expected SELECT, ASK, or CONSTRUCT")
        self.expect("eof")
        return query

    def _resolve_pname(self, tok: _Tok) -> str:
        prefix, local = tok.value
        if prefix not in self.prefixes:
            raise SparqlSyntaxError(f"undeclared prefix {prefix!r}", tok.line, tok.column)
        return self.prefixes[prefix] + local

    def _select(self) -> SelectQuery:
        self.expect("kw", "SELECT")
        distinct = bool(self.accept("kw", "DISTINCT"))
        projections: list = []
        while True:
            if self.at("var"):
                projections.append(Var(self.next().value))
            elif self.at("("):
                self.next()
                agg = self._aggregate()
                self.expect("kw", "AS")
                var = Var(self.expect("var").value)
                self.expect(")")
                projections.append((agg, var))
            else:
                break
        if not projections:
            self.fail("SELECT needs at least one projection")
        self.accept("kw", "WHERE")
        where = self._group()
        group_by: list[Var] = []
        having = None
        order_by: list[OrderKey] = []
        limit = offset = None
        if self.accept("kw", "GROUP"):
            self.expect("kw", "BY")
            while self.at("var"):
                group_by.append(Var(self.next().value))
        if self.accept("kw", "HAVING"):
            self.expect("(")
            having = self._expr()
            self.expect(")")
        if self.accept("kw", "ORDER"):
            self.expect("kw", "BY")
            while True:
                if self.accept("kw", "DESC"):
                    self.expect("(")
                    order_by.append(OrderKey(self._expr(), descending=True))
                    self.expect(")")
                elif self.accept("kw", "ASC"):
                    self.expect("(")
                    order_by.append(OrderKey(self._expr()))
                    self.expect(")")
                elif self.at("var"):
                    order_by.append(OrderKey(Var(self.next().value)))
                else:
                    break
        if self.accept("kw", "LIMIT"):
            limit = int(self.expect("number").value)
        if self.accept("kw", "OFFSET"):
            offset = int(self.expect("number").value)
        return SelectQuery(
            projections, where, distinct=distinct, group_by=group_by,
            having=having, order_by=order_by, limit=limit, offset=offset,
        )

    def _construct(self) -> ConstructQuery:
        self.expect("kw", "CONSTRUCT")
        self.expect("{")
        template: list[TriplePattern] = []
        while not self.at("}"):
            template.extend(self._triples_same_subject())
        self.expect("}")
        self.accept("kw", "WHERE")
        where = self._group()
        if self.accept("kw", "ORDER"):  # accepted and ignored on CONSTRUCT
            self.expect("kw", "BY")
            while self.at("var"):
                self.next()
        return ConstructQuery(template, where)

    def _aggregate(self) -> Aggregate:
        self.expect("kw", "COUNT")
        self.expect("(")
        distinct = bool(self.accept("kw", "DISTINCT"))
        arg = None if self.accept("*") else Var(self.expect("var").value)
        self.expect(")")
        return Aggregate("COUNT", arg, distinct)

    def _group(self) -> GroupPattern:
        self.expect("{")
        children: list = []
        while not self.at("}"):
            if self.at("{"):
                first = self._group()
                if self.at("kw", "UNION"):
                    branches = [first]
                    while self.accept("kw", "UNION"):
                        branches.append(self._group())
                    children.append(UnionPattern(branches))
                else:
                    children.append(first)
            elif self.at("kw", "SELECT"):
                children.append(SubSelect(self._select()))
            elif self.accept("kw", "OPTIONAL"):
                children.append(OptionalPattern(self._group()))
            elif self.accept("kw", "FILTER"):
                self.expect("(")
                expr = self._expr()
                self.expect(")")
                children.append(FilterPattern(expr))
            elif self.accept("kw", "BIND"):
                self.expect("(")
                expr = self._expr()
                self.expect("kw", "AS")
                var = Var(self.expect("var").value)
                self.expect(")")
                children.append(BindPattern(expr, var))
            elif self.accept("kw", "VALUES"):
                var = Var(self.expect("var").value)
                self.expect("{")
                terms = []
                while not self.at("}"):
                    terms.append(self._term())
                self.expect("}")
                children.append(ValuesPattern(var, terms))
            elif self.accept("kw", "SERVICE"):
                children.append(self._service())
            else:
                children.extend(self._triples_same_subject())
        self.expect("}")
        return GroupPattern(children)

    def _service(self) -> LabelServicePattern:
        tok = self.cur
        if tok.kind == "pname":
            service_iri = self._resolve_pname(self.next())
        elif tok.kind == "iri":
            service_iri = self.next().value
        else:
            self.fail("expected a service IRI")
        if service_iri != WIKIBASE + "label":
            raise UnsupportedSparql(f"unsupported SERVICE {service_iri!r}")
        group = self._group()
        language = "en"
        for child in group.children:
            if isinstance(child, TriplePattern) and isinstance(child.predicate, Term):
                if child.predicate.value == WIKIBASE + "language" and isinstance(child.object, Term):
                    language = child.object.value.split(",")[0].strip()
        return LabelServicePattern(language)

    def _triples_same_subject(self) -> list[TriplePattern]:
        subject = self._node()
        out: list[TriplePattern] = []
        while True:
            predicate, star = self._verb()
            while True:
                obj = self._node()
                out.append(TriplePattern(subject, predicate, obj, star=star))
                if not self.accept(","):
                    break
            if self.accept(";"):
                if self.at(".") or self.at("}"):
                    break
                continue
            break
        self.accept(".")
        return out

    def _verb(self):
        if self.at("a"):
            self.next()
            return iri(RDF_TYPE_IRI), False
        node = self._node(allow_literal=False)
        star = bool(self.accept("*"))
        return node, star

    def _node(self, allow_literal: bool = True):
        tok = self.cur
        if tok.kind == "var":
            self.next()
            return Var(tok.value)
        if tok.kind in ("iri", "pname"):
            return self._term()
        if allow_literal and tok.kind in ("string", "number", "boolean"):
            return self._term()
        self.fail(f"cannot parse a term from {tok.value!r}")

    def _term(self) -> Term:
        tok = self.next()
        if tok.kind == "iri":
            return iri(tok.value)
        if tok.kind == "pname":
            return iri(self._resolve_pname(tok))
        if tok.kind == "number":
            lexical = tok.value
            if "e" in lexical or "E" in lexical:
                return literal(lexical, datatype=XSD_DOUBLE)
            if "." in lexical:
                return literal(lexical, datatype=XSD_DECIMAL)
            return literal(lexical, datatype=XSD_INTEGER)
        if tok.kind == "boolean":
            return literal(tok.value, datatype=XSD_BOOLEAN)
        if tok.kind == "string":
            if self.at("langtag"):
                return literal(tok.value, language=self.next().value)
            if self.accept("^^"):
                dt = self.cur
                if dt.kind == "iri":
                    self.next()
                    return literal(tok.value, datatype=dt.value)
                if dt.kind == "pname":
                    self.next()
                    return literal(tok.value, datatype=self._resolve_pname(dt))
                self.fail("expected a datatype IRI")
            return literal(tok.value)
        raise SparqlSyntaxError(f"cannot parse a term from {tok.value!r}", tok.line, tok.column)

    # expressions: || < && < comparison < additive < multiplicative < unary

    def _expr(self):
        left = self._and_expr()
        args = [left]
        while self.accept("op", "||"):
            args.append(self._and_expr())
        return BoolExpr("||", args) if len(args) > 1 else left

    def _and_expr(self):
        left = self._cmp_expr()
        args = [left]
        while self.accept("op", "&&"):
            args.append(self._cmp_expr())
        return BoolExpr("&&", args) if len(args) > 1 else left

    def _cmp_expr(self):
        left = self._add_expr()
        if self.cur.kind == "op" and self.cur.value in ("=", "!=", "<", ">", "<=", ">="):
            op = self.next().value
            return Cmp(op, left, self._add_expr())
        return left

    def _add_expr(self):
        left = self._mul_expr()
        while self.cur.kind == "op" and self.cur.value in ("+", "-"):
            op = self.next().value
            left = Arith(op, left, self._mul_expr())
        return left

    def _mul_expr(self):
        left = self._unary_expr()
        while self.at("*") or self.at("/"):
            op = self.next().value
            left = Arith(op, left, self._unary_expr())
        return left

    def _unary_expr(self):
        if self.accept("op", "!"):
            return NotExpr(self._unary_expr())
        if self.at("("):
            self.next()
            inner = self._expr()
            self.expect(")")
            return inner
        if self.at("var"):
            return Var(self.next().value)
        if self.at("kw", "COUNT"):
            return self._aggregate()
        if self.at("builtin"):
            name = self.next().value
            return Call(name, self._call_args())
        tok = self.cur
        if tok.kind == "pname":
            save = self.pos
            name_iri = self._resolve_pname(self.next())
            if self.at("("):
                return Call(name_iri, self._call_args())
            self.pos = save
            return self._term()
        if tok.kind == "iri" and self.tokens[self.pos + 1].kind == "(":
            self.next()
            return Call(tok.value, self._call_args())
        return self._term()

    def _call_args(self) -> tuple:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self._expr())
            while self.accept(","):
                args.append(self._expr())
        self.expect(")")
        return tuple(args)


def parse_query(text: str):
    """Parse query text into the shared AST."""
    return SparqlParser(text).parse()


# ---------------------------------------------------------------------------
# Evaluator

_TRUE = literal("true", datatype=XSD_BOOLEAN)
_FALSE = literal("false", datatype=XSD_BOOLEAN)


class _ExprError(Exception):
    """Expression evaluation error; FILTERs treat it as false."""


def _boolean(value: bool) -> Term:
    return _TRUE if value else _FALSE


def _as_number(term: Term) -> float:
    if not term.is_literal:
        raise _ExprError("not a number")
    try:
        return float(term.value)
    except ValueError:
        raise _ExprError("not a number") from None


def _as_datetime_key(term: Term):
    if not term.is_literal:
        raise _ExprError("not a dateTime")
    key = datetime_sort_key(term.value)
    if key is None:
        raise _ExprError("not a dateTime")
    return key


def _is_numeric(term: Term) -> bool:
    if not term.is_literal:
        return False
    if term.datatype in (XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE):
        return True
    if term.datatype or term.language:
        return False
    try:
        float(term.value)
        return True
    except ValueError:
        return False


def _ebv(term: Term | None) -> bool:
    if term is None:
        raise _ExprError("unbound")
    if term.is_literal:
        if term.datatype == XSD_BOOLEAN:
            return term.value == "true"
        if _is_numeric(term):
            return float(term.value) != 0.0
        return len(term.value) > 0
    raise _ExprError("no boolean value for IRIs")


class Evaluator:
    """Evaluates parsed queries against one GraphStore."""

    def __init__(self, store, graph: str | None = None):
        self.store = store
        self.graph = graph
        self._closure_cache: dict[tuple[Term, str, str], frozenset[Term]] = {}

    # -- public entry points

    def select(self, query: SelectQuery) -> tuple[list[str], list[dict[str, Term]]]:
        self._label_vars = self._collect_label_vars(query)
        rows = self._eval_select(query)
        variables = [self._projection_var(p).name for p in query.projections]
        return variables, rows

    def ask(self, query: AskQuery) -> bool:
        self._label_vars = set()
        return bool(self._eval_group(query.where, [{}]))

    def construct(self, query: ConstructQuery) -> list[tuple[Term, Term, Term]]:
        self._label_vars = self._collect_label_vars(query)
        solutions = self._eval_group(query.where, [{}])
        triples: set[tuple[Term, Term, Term]] = set()
        for sol in solutions:
            for pattern in query.template:
                s = self._resolve(pattern.subject, sol)
                p = self._resolve(pattern.predicate, sol)
                o = self._resolve(pattern.object, sol)
                if s is None or p is None or o is None:
                    continue
                if s.is_literal or not p.is_iri:
                    continue
                triples.add((s, p, o))
        return sorted(triples, key=lambda t: (t[0].n3(), t[1].n3(), t[2].n3()))

    # -- helpers

    @staticmethod
    def _projection_var(projection) -> Var:
        return projection if isinstance(projection, Var) else projection[1]

    def _collect_label_vars(self, query) -> set[str]:
        names: set[str] = set()

        def walk_expr(expr):
            if isinstance(expr, Var):
                names.add(expr.name)
            elif isinstance(expr, (Cmp, Arith)):
                walk_expr(expr.left)
                walk_expr(expr.right)
            elif isinstance(expr, BoolExpr):
                for a in expr.args:
                    walk_expr(a)
            elif isinstance(expr, NotExpr):
                walk_expr(expr.expr)
            elif isinstance(expr, Call):
                for a in expr.args:
                    walk_expr(a)

        if isinstance(query, SelectQuery):
            for p in query.projections:
                names.add(self._projection_var(p).name)
            for key in query.order_by:
                walk_expr(key.expr)
        elif isinstance(query, ConstructQuery):
            for pattern in query.template:
                for node in (pattern.subject, pattern.predicate, pattern.object):
                    if isinstance(node, Var):
                        names.add(node.name)
        return {n for n in names if n.endswith("Label") and len(n) > 5}

    def _resolve(self, node, sol) -> Term | None:
        if isinstance(node, Var):
            return sol.get(node.name)
        return node

    # -- group evaluation

    def _eval_select(self, query: SelectQuery) -> list[dict[str, Term]]:
        solutions = self._eval_group(query.where, [{}])

        has_aggregates = any(not isinstance(p, Var) for p in query.projections)
        if query.group_by or has_aggregates:
            solutions = self._aggregate(query, solutions)

        rows = []
        for sol in solutions:
            row = {}
            for p in query.projections:
                var = self._projection_var(p)
                term = sol.get(var.name)
                if term is not None:
                    row[var.name] = term
            rows.append(row)

        if query.distinct:
            seen = set()
            unique = []
            for row in rows:
                key = tuple(row.get(self._projection_var(p).name) for p in query.projections)
                if key not in seen:
                    seen.add(key)
                    unique.append(row)
            rows = unique

        for key in reversed(query.order_by):
            rows.sort(key=lambda r, k=key: self._order_key(k.expr, r), reverse=key.descending)

        offset = query.offset or 0
        if offset:
            rows = rows[offset:]
        if query.limit is not None:
            rows = rows[: query.limit]
        return rows

    def _aggregate(self, query: SelectQuery, solutions) -> list[dict[str, Term]]:
        group_names = [v.name for v in query.group_by]
        groups: dict[tuple, list[dict]] = {}
        order: list[tuple] = []
        for sol in solutions:
            key = tuple(sol.get(name) for name in group_names)
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(sol)
        if not groups and not group_names:
            groups[()] = []
            order.append(())

        out = []
        for key in order:
            members = groups[key]
            row: dict[str, Term] = {}
            for name, term in zip(group_names, key):
                if term is not None:
                    row[name] = term
            for p in query.projections:
                if isinstance(p, Var):
                    continue
                agg, var = p
                if agg.func != "COUNT":
                    raise UnsupportedSparql(f"unsupported aggregate {agg.func}")
                if agg.arg is None:
                    count = len(members)
                else:
                    values = [m.get(agg.arg.name) for m in members]
                    values = [v for v in values if v is not None]
                    count = len(set(values)) if agg.distinct else len(values)
                row[var.name] = literal(str(count), datatype=XSD_INTEGER)
            if query.having is not None:
                try:
                    if not _ebv(self._eval_expr(query.having, row)):
                        continue
                except _ExprError:
                    continue
            out.append(row)
        return out

    def _eval_group(self, group: GroupPattern, seeds: list[dict]) -> list[dict]:
        solutions = seeds
        filters: list[FilterPattern] = []
        label_language: str | None = None
        for child in group.children:
            if isinstance(child, FilterPattern):
                filters.append(child)
            elif isinstance(child, LabelServicePattern):
                label_language = child.language
            else:
                solutions = self._extend(child, solutions)
                if not solutions:
                    break
        if label_language is not None:
            for sol in solutions:
                self._bind_labels(sol, label_language)
        for f in filters:
            kept = []
            for sol in solutions:
                try:
                    if _ebv(self._eval_expr(f.expr, sol)):
                        kept.append(sol)
                except _ExprError:
                    continue
            solutions = kept
        return solutions

    def _extend(self, pattern, solutions: list[dict]) -> list[dict]:
        if isinstance(pattern, TriplePattern):
            return self._eval_triple(pattern, solutions)
        if isinstance(pattern, GroupPattern):
            return self._eval_group(pattern, solutions)
        if isinstance(pattern, UnionPattern):
            out = []
            for branch in pattern.branches:
                out.extend(self._eval_group(branch, solutions))
            return out
        if isinstance(pattern, OptionalPattern):
            out = []
            for sol in solutions:
                extended = self._eval_group(pattern.group, [sol])
                out.extend(extended if extended else [sol])
            return out
        if isinstance(pattern, BindPattern):
            out = []
            for sol in solutions:
                new = dict(sol)
                try:
                    value = self._eval_expr(pattern.expr, sol)
                    if value is not None and pattern.var.name not in new:
                        new[pattern.var.name] = value
                except _ExprError:
                    pass
                out.append(new)
            return out
        if isinstance(pattern, ValuesPattern):
            out = []
            for sol in solutions:
                bound = sol.get(pattern.var.name)
                if bound is not None:
                    if bound in pattern.terms:
                        out.append(sol)
                else:
                    for term in pattern.terms:
                        new = dict(sol)
                        new[pattern.var.name] = term
                        out.append(new)
            return out
        if isinstance(pattern, SubSelect):
            _, rows = Evaluator(self.store, self.graph).select(pattern.query)
            out = []
            for sol in solutions:
                for row in rows:
                    shared = set(sol) & set(row)
                    if all(sol[name] == row[name] for name in shared):
                        merged = dict(sol)
                        merged.update(row)
                        out.append(merged)
            return out
        raise UnsupportedSparql(f"unsupported pattern {type(pattern).__name__}")

    def _eval_triple(self, pattern: TriplePattern, solutions: list[dict]) -> list[dict]:
        out = []
        for sol in solutions:
            s = self._resolve(pattern.subject, sol)
            p = self._resolve(pattern.predicate, sol)
            o = self._resolve(pattern.object, sol)
            if pattern.star:
                out.extend(self._eval_star(pattern, sol, s, p, o))
                continue
            for quad in self.store.match(s, p, o, self.graph):
                new = dict(sol)
                ok = True
                for node, value in (
                    (pattern.subject, quad.subject),
                    (pattern.predicate, quad.predicate),
                    (pattern.object, quad.object),
                ):
                    if isinstance(node, Var):
                        existing = new.get(node.name)
                        if existing is None:
                            new[node.name] = value
                        elif existing != value:
                            ok = False
                            break
                if ok:
                    out.append(new)
        return out

    def _closure(self, start: Term, prop: str, direction: str) -> frozenset[Term]:
        key = (start, prop, direction)
        cached = self._closure_cache.get(key)
        if cached is not None:
            return cached
        prop_term = iri(prop)
        seen = {start}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            if node.is_literal:
                continue
            if direction == "forward":
                neighbors = [q.object for q in self.store.match(node, prop_term, None, self.graph)]
            else:
                neighbors = [q.subject for q in self.store.match(None, prop_term, node, self.graph)]
            for nxt in neighbors:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        result = frozenset(seen)
        self._closure_cache[key] = result
        return result

    def _eval_star(self, pattern, sol, s, p, o) -> list[dict]:
        if not isinstance(p, Term) or not p.is_iri:
            raise UnsupportedSparql("property paths need a constant predicate")
        if s is not None:
            members = self._closure(s, p.value, "forward")
            if o is not None:
                return [sol] if o in members else []
            out = []
            for member in sorted(members, key=lambda t: t.n3()):
                new = dict(sol)
                new[pattern.object.name] = member
                out.append(new)
            return out
        if o is not None:
            members = self._closure(o, p.value, "backward")
            out = []
            for member in sorted(members, key=lambda t: t.n3()):
                new = dict(sol)
                new[pattern.subject.name] = member
                out.append(new)
            return out
        raise UnsupportedSparql("unbounded property path over two free variables")

    # -- label service emulation

    def _bind_labels(self, sol: dict, language: str) -> None:
        for name in self._label_vars:
            if name in sol:
                continue
            base = sol.get(name[: -len("Label")])
            if base is None:
                continue
            if base.is_literal:
                sol[name] = literal(base.value)
                continue
            label = self._lookup_label(base, language)
            sol[name] = label

    def _lookup_label(self, term: Term, language: str) -> Term:
        fallback = None
        for quad in self.store.match(term, iri(RDFS_LABEL), None, self.graph):
            obj = quad.object
            if not obj.is_literal:
                continue
            if obj.language == language or (obj.language or "").split("-")[0] == language:
                return literal(obj.value, language=obj.language)
            if fallback is None:
                fallback = obj
        if fallback is not None:
            return literal(fallback.value, language=fallback.language)
        return literal(term.local_name())

    # -- expressions

    def _eval_expr(self, expr, sol: dict) -> Term | None:
        if isinstance(expr, Var):
            value = sol.get(expr.name)
            if value is None:
                raise _ExprError("unbound variable")
            return value
        if isinstance(expr, Term):
            return expr
        if isinstance(expr, Cmp):
            return _boolean(self._compare(expr.op, expr.left, expr.right, sol))
        if isinstance(expr, BoolExpr):
            if expr.op == "&&":
                return _boolean(all(_ebv(self._eval_expr(a, sol)) for a in expr.args))
            return _boolean(any(_ebv(self._eval_expr(a, sol)) for a in expr.args))
        if isinstance(expr, NotExpr):
            return _boolean(not _ebv(self._eval_expr(expr.expr, sol)))
        if isinstance(expr, Arith):
            return self._arith(expr, sol)
        if isinstance(expr, Call):
            return self._call(expr, sol)
        raise _ExprError(f"unsupported expression {type(expr).__name__}")

    def _compare(self, op: str, left, right, sol) -> bool:
        lt = self._eval_expr(left, sol)
        rt = self._eval_expr(right, sol)
        if lt is None or rt is None:
            raise _ExprError("unbound operand")
        if _is_numeric(lt) and _is_numeric(rt):
            lv, rv = float(lt.value), float(rt.value)
        else:
            try:
                lv, rv = _as_datetime_key(lt), _as_datetime_key(rt)
            except _ExprError:
                if op in ("=", "!="):
                    equal = self._terms_equal(lt, rt)
                    return equal if op == "=" else not equal
                lv, rv = lt.value, rt.value
        if op == "=":
            return lv == rv
        if op == "!=":
            return lv != rv
        if op == "<":
            return lv < rv
        if op == ">":
            return lv > rv
        if op == "<=":
            return lv <= rv
        return lv >= rv

    @staticmethod
    def _terms_equal(a: Term, b: Term) -> bool:
        def norm(t: Term) -> Term:
            if t.is_literal and t.datatype == XSD_STRING:
                return literal(t.value)
            return t

        return norm(a) == norm(b)

    def _arith(self, expr: Arith, sol) -> Term:
        lt = self._eval_expr(expr.left, sol)
        rt = self._eval_expr(expr.right, sol)
        if lt is None or rt is None:
            raise _ExprError("unbound operand")
        if expr.op == "-" and not (_is_numeric(lt) and _is_numeric(rt)):
            try:
                lk, rk = _as_datetime_key(lt), _as_datetime_key(rt)
            except _ExprError:
                raise
            else:
                # dateTime difference in whole calendar days
                return literal(str(lk[0] - rk[0]), datatype=XSD_INTEGER)
        lv, rv = _as_number(lt), _as_number(rt)
        if expr.op == "+":
            value = lv + rv
        elif expr.op == "-":
            value = lv - rv
        elif expr.op == "*":
            value = lv * rv
        else:
            if rv == 0:
                raise _ExprError("division by zero")
            value = lv / rv
        if value == int(value) and lt.datatype == XSD_INTEGER and rt.datatype == XSD_INTEGER and expr.op != "/":
            return literal(str(int(value)), datatype=XSD_INTEGER)
        return literal(repr(value), datatype=XSD_DECIMAL)

    def _call(self, call: Call, sol) -> Term:
        name = call.name

        if name == "BOUND":
            arg = call.args[0]
            if not isinstance(arg, Var):
                raise _ExprError("BOUND needs a variable")
            return _boolean(arg.name in sol)

        args = [self._eval_expr(a, sol) for a in call.args]

        if name == "STR":
            return literal(args[0].value)
        if name == "LANG":
            if not args[0].is_literal:
                raise _ExprError("LANG of a non-literal")
            return literal(args[0].language or "")
        if name == "LANGMATCHES":
            tag = args[0].value.lower()
            rng = args[1].value.lower()
            if rng == "*":
                return _boolean(bool(tag))
            return _boolean(tag == rng or tag.startswith(rng + "-"))
        if name == "DATATYPE":
            term = args[0]
            if not term.is_literal:
                raise _ExprError("DATATYPE of a non-literal")
            if term.language:
                return iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#langString")
            return iri(term.datatype or XSD_STRING)
        if name in ("ISIRI", "ISURI"):
            return _boolean(args[0].is_iri)
        if name == "ISLITERAL":
            return _boolean(args[0].is_literal)
        if name == "ISBLANK":
            return _boolean(args[0].is_blank)
        if name == "CONTAINS":
            return _boolean(args[1].value in args[0].value)
        if name == "STRSTARTS":
            return _boolean(args[0].value.startswith(args[1].value))
        if name == "STRENDS":
            return _boolean(args[0].value.endswith(args[1].value))
        if name == "LCASE":
            return literal(args[0].value.lower())
        if name == "UCASE":
            return literal(args[0].value.upper())
        if name == "STRLEN":
            return literal(str(len(args[0].value)), datatype=XSD_INTEGER)
        if name == "ABS":
            return literal(repr(abs(_as_number(args[0]))), datatype=XSD_DECIMAL)

        if name == GEOF + "longitude" or name == GEOF + "latitude":
            geom = parse_wkt(args[0].value)
            if geom.kind != "point":
                raise _ExprError("longitude/latitude of a non-point")
            lon, lat = geom.coordinates
            value = lon if name.endswith("longitude") else lat
            return literal(repr(value), datatype=XSD_DECIMAL)
        if name == GEOF + "sfWithin":
            inner = parse_wkt(args[0].value)
            outer = parse_wkt(args[1].value)
            if outer.kind != "polygon":
                raise _ExprError("sfWithin target must be a polygon")
            ring = outer.coordinates[0]
            if inner.kind == "point":
                lon, lat = inner.coordinates
                return _boolean(point_in_polygon(lon, lat, ring))
            return _boolean(
                all(point_in_polygon(lon, lat, ring) for lon, lat in inner.all_coords())
            )
        raise _ExprError(f"unknown function {name}")

    def _order_key(self, expr, row: dict):
        try:
            term = self._eval_expr(expr, row)
        except _ExprError:
            term = None
        if term is None:
            return (0, 0, 0.0, "")
        rank = {"blank": 1, "iri": 2, "literal": 3}[term.kind]
        if term.is_literal:
            if _is_numeric(term):
                return (rank, 0, float(term.value), "")
            key = datetime_sort_key(term.value) if term.datatype == XSD_DATETIME else None
            if key is not None:
                return (rank, 1, key[0] + key[1] / 86400.0, "")
            return (rank, 2, 0.0, term.value)
        return (rank, 0, 0.0, term.value)
