"""Independent oracles used to cross-check the implementation.

Nothing here imports narramap parsing or evaluation code paths: the
Turtle reader is a second, minimal parser good for the serializer's
output shape; closures are plain BFS over edge lists; rule checks are
direct triple scans with stdlib date arithmetic.
"""

from __future__ import annotations

import re
from collections import deque
from datetime import date

WD = "http://www.wikidata.org/entity/"
WDT = "http://www.wikidata.org/prop/direct/"

_TOKEN = re.compile(
    r"""
    (?P<iri><[^>]*>)
  | (?P<literal>"(?:[^"\\]|\\.)*")
  | (?P<pname>[A-Za-z_][A-Za-z0-9_\-]*:[A-Za-z0-9_][A-Za-z0-9_\-.]*|[A-Za-z_][A-Za-z0-9_\-]*:)
  | (?P<blank>_:[A-Za-z0-9_.]+)
  | (?P<number>[+-]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<boolean>\btrue\b|\bfalse\b)
  | (?P<kw_a>\ba\b)
  | (?P<langtag>@[A-Za-z][A-Za-z0-9\-]*)
  | (?P<dtype>\^\^)
  | (?P<punct>[.;,])
    """,
    re.VERBOSE,
)


def minimal_parse(text: str) -> list[tuple]:
    """Parse the deterministic Turtle this project writes.

    Terms come back as plain strings for IRIs/blank nodes and
    ("lit", value, datatype, language) tuples for literals.
    """
    prefixes: dict[str, str] = {}
    triples: list[tuple] = []
    # token stream over the whole document, prefix directives included
    tokens = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("@prefix"):
            m = re.match(r"@prefix\s+([A-Za-z0-9_\-]*):\s*<([^>]*)>\s*\.", stripped)
            if m:
                prefixes[m.group(1)] = m.group(2)
            continue
        if not stripped or stripped.startswith("#"):
            continue
        tokens.extend(_TOKEN.finditer(line))

    def term_of(match) -> object:
        kind = match.lastgroup
        raw = match.group(0)
        if kind == "iri":
            return raw[1:-1]
        if kind == "pname":
            prefix, local = raw.split(":", 1)
            return prefixes[prefix] + local
        if kind == "blank":
            return raw
        if kind == "kw_a":
            return "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
        if kind == "number":
            if "." in raw or "e" in raw or "E" in raw:
                return ("lit", raw, "http://www.w3.org/2001/XMLSchema#decimal", None)
            return ("lit", raw, "http://www.w3.org/2001/XMLSchema#integer", None)
        if kind == "boolean":
            return ("lit", raw, "http://www.w3.org/2001/XMLSchema#boolean", None)
        if kind == "literal":
            value = raw[1:-1]
            value = value.replace('\\"', '"').replace("\\n", "\n").replace("\\\\", "\\")
            return ("lit", value, None, None)
        raise AssertionError(f"unexpected token {raw!r}")

    i = 0
    n = len(tokens)
    while i < n:
        subject = term_of(tokens[i])
        i += 1
        while True:
            predicate = term_of(tokens[i])
            i += 1
            while True:
                obj = term_of(tokens[i])
                i += 1
                # literal suffixes
                if i < n and tokens[i].lastgroup == "langtag":
                    obj = ("lit", obj[1], None, tokens[i].group(0)[1:])
                    i += 1
                elif i < n and tokens[i].lastgroup == "dtype":
                    dtype = term_of(tokens[i + 1])
                    obj = ("lit", obj[1], dtype, None)
                    i += 2
                triples.append((subject, predicate, obj))
                if i < n and tokens[i].group(0) == ",":
                    i += 1
                    continue
                break
            if i < n and tokens[i].group(0) == ";":
                i += 1
                continue
            break
        assert tokens[i].group(0) == ".", f"expected '.' near token {i}"
        i += 1
    return triples


def closure_oracle(
    triples: list[tuple],
    root: str,
    down: str,
    up: str | None = None,
    max_depth: int | None = None,
) -> set[str]:
    """BFS closure: root plus everything down-reachable, plus (when an up
    property is given) everything reaching the root via up edges."""
    down_edges: dict[str, list[str]] = {}
    up_edges: dict[str, list[str]] = {}
    for s, p, o in triples:
        if isinstance(s, tuple) or isinstance(o, tuple):
            continue
        if p == down:
            down_edges.setdefault(s, []).append(o)
        if up is not None and p == up:
            up_edges.setdefault(o, []).append(s)

    def bfs(edges: dict[str, list[str]]) -> set[str]:
        seen = {root}
        queue = deque([(root, 0)])
        while queue:
            node, depth = queue.popleft()
            if max_depth is not None and depth >= max_depth:
                continue
            for nxt in edges.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append((nxt, depth + 1))
        return seen

    members = bfs(down_edges)
    if up is not None:
        members |= bfs(up_edges)
    return members


def _objects(triples, subject: str, prop: str) -> list:
    return [o for s, p, o in triples if s == subject and p == prop]


def _parse_date(value) -> date | None:
    if not isinstance(value, tuple):
        return None
    text = value[1].lstrip("+")
    m = re.match(r"(-?\d{4})-(\d{2})-(\d{2})", text)
    if not m:
        return None
    try:
        return date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError:
        return None


class RuleOracle:
    """Naive per-item checks for the four portrayal rule families."""

    def __init__(self, triples: list[tuple], root: str = WD + "Q362",
                 down: str = WDT + "P527", up: str = WDT + "P361"):
        self.triples = triples
        self.subjects = sorted({s for s, _, _ in triples if isinstance(s, str) and not s.startswith("_:")})
        self.closure = closure_oracle(triples, root, down, up)

    def is_battle(self, subject: str) -> bool:
        return WD + "Q178561" in _objects(self.triples, subject, WDT + "P31")

    def in_closure(self, subject: str) -> bool:
        return subject in self.closure

    def start(self, subject: str) -> date | None:
        values = _objects(self.triples, subject, WDT + "P580")
        return _parse_date(values[0]) if values else None

    def end(self, subject: str) -> date | None:
        values = _objects(self.triples, subject, WDT + "P582")
        return _parse_date(values[0]) if values else None

    def us_battles(self) -> set[str]:
        out = set()
        for subject in self.subjects:
            if (
                self.is_battle(subject)
                and self.in_closure(subject)
                and WD + "Q30" in _objects(self.triples, subject, WDT + "P710")
            ):
                out.add(subject)
        return out

    def many_participant_battles(self, more_than: int = 5) -> set[str]:
        out = set()
        for subject in self.subjects:
            if not (self.is_battle(subject) and self.in_closure(subject)):
                continue
            if len(set(map(str, _objects(self.triples, subject, WDT + "P710")))) > more_than:
                out.add(subject)
        return out

    def long_battles(self, more_than_days: int = 30) -> set[str]:
        out = set()
        for subject in self.subjects:
            if not (self.is_battle(subject) and self.in_closure(subject)):
                continue
            start, end = self.start(subject), self.end(subject)
            if start is None or end is None:
                continue
            if (end - start).days > more_than_days:
                out.add(subject)
        return out

    def battles_started_within(self, lo: date = date(1939, 1, 1), hi: date = date(1940, 1, 1)) -> set[str]:
        out = set()
        for subject in self.subjects:
            if not (self.is_battle(subject) and self.in_closure(subject)):
                continue
            start = self.start(subject)
            if start is not None and lo < start < hi:
                out.add(subject)
        return out
