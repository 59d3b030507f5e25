"""In-memory quad store with named graphs and Turtle interchange.

Quads are deduplicated sets indexed by subject, predicate, and object so
pattern scans stay cheap at the tens-of-thousands-of-triples scale this
tool works at.  Content, alignment, provenance, and derived symbolization
live in separate named graphs so derived data can be dropped and
regenerated without touching source content.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator

from .terms import Quad, Term, blank
from .turtle import TurtleParser, serialize_turtle

GRAPH_CONTENT = "https://narramap.dev/graph/content"
GRAPH_ALIGNMENT = "https://narramap.dev/graph/alignment"
GRAPH_PROVENANCE = "https://narramap.dev/graph/provenance"
GRAPH_SYMBOLIZATION = "https://narramap.dev/graph/symbolization"
GRAPH_DEFAULT = "https://narramap.dev/graph/default"


class GraphStore:
    def __init__(self) -> None:
        self._quads: set[Quad] = set()
        self._by_s: dict[tuple[Term, str], list[Quad]] = defaultdict(list)
        self._by_p: dict[tuple[Term, str], list[Quad]] = defaultdict(list)
        self._by_o: dict[tuple[Term, str], list[Quad]] = defaultdict(list)
        self._by_sp: dict[tuple[Term, Term, str], list[Quad]] = defaultdict(list)
        self._by_po: dict[tuple[Term, Term, str], list[Quad]] = defaultdict(list)
        self._blank_labels: set[str] = set()
        self._graph_names: list[str] = []

    def __len__(self) -> int:
        return len(self._quads)

    def __contains__(self, quad: Quad) -> bool:
        return quad in self._quads

    @property
    def quads(self) -> frozenset[Quad]:
        return frozenset(self._quads)

    def graphs(self) -> list[str]:
        return list(self._graph_names)

    def add(self, subject: Term, predicate: Term, obj: Term, graph: str = GRAPH_DEFAULT) -> bool:
        """Add one quad; returns False when it was already present."""
        quad = Quad(subject, predicate, obj, graph)
        if quad in self._quads:
            return False
        if graph not in self._graph_names:
            self._graph_names.append(graph)
            self._graph_names.sort()
        self._quads.add(quad)
        self._by_s[(subject, graph)].append(quad)
        self._by_p[(predicate, graph)].append(quad)
        self._by_o[(obj, graph)].append(quad)
        self._by_sp[(subject, predicate, graph)].append(quad)
        self._by_po[(predicate, obj, graph)].append(quad)
        for term in (subject, obj):
            if term.is_blank:
                self._blank_labels.add(term.value)
        return True

    def add_all(self, triples: Iterable[tuple[Term, Term, Term]], graph: str = GRAPH_DEFAULT) -> int:
        return sum(1 for s, p, o in triples if self.add(s, p, o, graph))

    def remove_graph(self, graph: str) -> int:
        doomed = [q for q in self._quads if q.graph == graph]
        for quad in doomed:
            self._quads.discard(quad)
        for index in (self._by_s, self._by_p, self._by_o, self._by_sp, self._by_po):
            for key in list(index):
                if key[-1] == graph:
                    del index[key]
        if graph in self._graph_names:
            self._graph_names.remove(graph)
        return len(doomed)

    def match(
        self,
        subject: Term | None = None,
        predicate: Term | None = None,
        obj: Term | None = None,
        graph: str | None = None,
    ) -> Iterator[Quad]:
        """All quads matching the given pattern; None is a wildcard."""
        if graph is None:
            for g in self.graphs():
                yield from self.match(subject, predicate, obj, g)
            return
        if subject is not None and predicate is not None:
            quads = self._by_sp.get((subject, predicate, graph), ())
        elif predicate is not None and obj is not None:
            quads = self._by_po.get((predicate, obj, graph), ())
        elif subject is not None:
            quads = self._by_s.get((subject, graph), ())
        elif predicate is not None:
            quads = self._by_p.get((predicate, graph), ())
        elif obj is not None:
            quads = self._by_o.get((obj, graph), ())
        else:
            quads = [q for q in self._quads if q.graph == graph]
        for quad in quads:
            if obj is not None and quad.object != obj:
                continue
            if subject is not None and quad.subject != subject:
                continue
            yield quad

    def objects(self, subject: Term, predicate: Term, graph: str | None = None) -> list[Term]:
        return [q.object for q in self.match(subject, predicate, None, graph)]

    def subjects(self, predicate: Term, obj: Term, graph: str | None = None) -> list[Term]:
        return [q.subject for q in self.match(None, predicate, obj, graph)]

    def value(self, subject: Term, predicate: Term, graph: str | None = None) -> Term | None:
        for q in self.match(subject, predicate, None, graph):
            return q.object
        return None

    # -- Turtle interchange

    def import_turtle(self, data: str | bytes, graph: str = GRAPH_DEFAULT) -> int:
        """Parse Turtle and add its triples to one named graph.

        Blank node labels are document-scoped, so incoming labels that
        collide with labels already present in the store are renamed with
        a deterministic ``.N`` suffix (skolemization with stable labels).
        """
        triples = TurtleParser(data).parse()
        rename: dict[str, str] = {}

        def skolemize(term: Term) -> Term:
            if not term.is_blank:
                return term
            label = term.value
            if label in rename:
                return blank(rename[label])
            fresh = label
            n = 2
            while fresh in self._blank_labels:
                fresh = f"{label}.{n}"
                n += 1
            rename[label] = fresh
            self._blank_labels.add(fresh)
            return blank(fresh)

        added = 0
        for s, p, o in triples:
            if self.add(skolemize(s), p, skolemize(o), graph):
                added += 1
        return added

    def export_turtle(self, graphs: str | Iterable[str] | None = None) -> bytes:
        """Deterministic Turtle for the selected graph(s), merged."""
        if graphs is None:
            selected = set(self.graphs())
        elif isinstance(graphs, str):
            selected = {graphs}
        else:
            selected = set(graphs)
        triples = {(q.subject, q.predicate, q.object) for q in self._quads if q.graph in selected}
        return serialize_turtle(triples)
