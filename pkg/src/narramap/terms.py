"""RDF atoms: IRIs, literals, blank nodes, and quads.

Terms are immutable and hashable so they can live in sets and serve as
dict keys throughout the store, the query engine, and result tables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATETIME = XSD + "dateTime"
RDF_TYPE = RDF + "type"
RDFS_LABEL = RDFS + "label"
OWL_SAMEAS = OWL + "sameAs"

# Pragmatic absolute-IRI check: a scheme followed by non-space characters.
_ABSOLUTE_IRI = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:\S+$")


def is_absolute_iri(value: str) -> bool:
    return bool(_ABSOLUTE_IRI.match(value)) and "<" not in value and ">" not in value


@dataclass(frozen=True, slots=True)
class Term:
    """One RDF term.

    kind is "iri", "literal", or "blank".  A literal carries at most one
    of datatype / language; plain literals keep both unset.
    """

    kind: str
    value: str
    datatype: str | None = None
    language: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("iri", "literal", "blank"):
            raise ValueError(f"unknown term kind: {self.kind!r}")
        if self.kind != "literal" and (self.datatype or self.language):
            raise ValueError("datatype/language are only valid on literals")
        if self.datatype and self.language:
            raise ValueError("a literal has at most one of datatype/language")

    @property
    def is_iri(self) -> bool:
        return self.kind == "iri"

    @property
    def is_literal(self) -> bool:
        return self.kind == "literal"

    @property
    def is_blank(self) -> bool:
        return self.kind == "blank"

    def local_name(self) -> str:
        """Trailing segment of an IRI after the last '#' or '/'."""
        if not self.is_iri:
            return self.value
        for sep in ("#", "/"):
            if sep in self.value:
                tail = self.value.rsplit(sep, 1)[1]
                if tail:
                    return tail
        return self.value

    def n3(self) -> str:
        """N-Triples-style rendering, used in messages and sort keys."""
        if self.is_iri:
            return f"<{self.value}>"
        if self.is_blank:
            return f"_:{self.value}"
        out = '"' + escape_literal(self.value) + '"'
        if self.language:
            out += f"@{self.language}"
        elif self.datatype and self.datatype != XSD_STRING:
            out += f"^^<{self.datatype}>"
        return out


def iri(value: str) -> Term:
    return Term("iri", value)


def literal(value: str, datatype: str | None = None, language: str | None = None) -> Term:
    return Term("literal", value, datatype=datatype, language=language)


def blank(label: str) -> Term:
    return Term("blank", label)


def typed(value: object) -> Term:
    """Map a Python scalar to the obvious typed literal."""
    if isinstance(value, bool):
        return literal("true" if value else "false", datatype=XSD_BOOLEAN)
    if isinstance(value, int):
        return literal(str(value), datatype=XSD_INTEGER)
    if isinstance(value, float):
        return literal(repr(value), datatype=XSD_DOUBLE)
    return literal(str(value))


_LITERAL_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def escape_literal(text: str) -> str:
    return "".join(_LITERAL_ESCAPES.get(ch, ch) for ch in text)


class Quad(NamedTuple):
    """One statement in a named graph; graph is an IRI string."""

    subject: Term
    predicate: Term
    object: Term
    graph: str


def term_sort_key(term: Term | None) -> tuple:
    """Total order over optional terms: unbound < blank < IRI < literal."""
    if term is None:
        return (0, "", "", "")
    rank = {"blank": 1, "iri": 2, "literal": 3}[term.kind]
    return (rank, term.value, term.datatype or "", term.language or "")
