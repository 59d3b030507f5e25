"""Turtle reading and writing.

The reader is a hand-rolled tokenizer + recursive-descent parser covering
the Turtle constructs that show up in the wild: both directive spellings
(@prefix / PREFIX), prefixed names with local escapes, blank node labels,
anonymous nodes, blank node property lists, collections, numeric and
boolean shorthand, language tags, typed literals, and long strings.
Parse failures carry the 1-based line and column of the offending token.

The writer is deterministic: fixed prefix block, subjects sorted, rdf:type
first (as ``a``), predicates and objects sorted, so the same set of
triples always serializes to the same bytes.
"""

from __future__ import annotations

import re

from .terms import (
    RDF,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    Term,
    blank,
    escape_literal,
    iri,
    literal,
)

RDF_FIRST = RDF + "first"
RDF_REST = RDF + "rest"
RDF_NIL = RDF + "nil"
RDF_TYPE = RDF + "type"


class TurtleParseError(ValueError):
    """Syntax error with the source position where parsing failed."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# Tokenizer


_PUNCT = {".", ";", ",", "[", "]", "(", ")"}
_NUMBER = re.compile(r"[+-]?(?:\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)")
_LANGTAG = re.compile(r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*")
# Characters a prefixed-name local part may contain unescaped (pragmatic set).
_PN_LOCAL_CHAR = re.compile(r"[A-Za-z0-9_\-.:À-￿]")
_PN_LOCAL_ESCAPABLE = set("_~.-!$&'()*+,;=/?#@%")


class _Token:
    __slots__ = ("kind", "value", "line", "column", "extra")

    def __init__(self, kind: str, value, line: int, column: int, extra=None):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column
        self.extra = extra

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"_Token({self.kind}, {self.value!r})"


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def error(self, message: str) -> TurtleParseError:
        return TurtleParseError(message, self.line, self.column)

    def _advance(self, n: int) -> None:
        chunk = self.text[self.pos : self.pos + n]
        newlines = chunk.count("\n")
        if newlines:
            self.line += newlines
            self.column = n - chunk.rfind("\n")
        else:
            self.column += n
        self.pos += n

    def _skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self._advance(1)
            elif ch == "#":
                end = self.text.find("\n", self.pos)
                if end == -1:
                    end = len(self.text)
                self._advance(end - self.pos)
            else:
                return

    def tokens(self):
        while True:
            self._skip_ws()
            if self.pos >= len(self.text):
                yield _Token("eof", None, self.line, self.column)
                return
            yield self._next_token()

    def _next_token(self) -> _Token:
        line, column = self.line, self.column
        text, pos = self.text, self.pos
        ch = text[pos]

        if ch in _PUNCT:
            # '.' may start a number like .5
            if ch == "." and pos + 1 < len(text) and text[pos + 1].isdigit():
                return self._number(line, column)
            self._advance(1)
            return _Token(ch, ch, line, column)

        if ch == "^":
            if text.startswith("^^", pos):
                self._advance(2)
                return _Token("^^", "^^", line, column)
            raise self.error("stray '^'")

        if ch == "<":
            return self._iriref(line, column)
        if ch in "\"'":
            return self._string(line, column)
        if ch == "@":
            return self._at_word(line, column)
        if ch == "_" and text.startswith("_:", pos):
            return self._blank_label(line, column)
        if ch.isdigit() or ch in "+-":
            return self._number(line, column)
        return self._name(line, column)

    def _iriref(self, line: int, column: int) -> _Token:
        end = self.pos + 1
        text = self.text
        out = []
        while True:
            if end >= len(text):
                raise TurtleParseError("unterminated IRI", line, column)
            ch = text[end]
            if ch == ">":
                break
            if ch in " \t\n\r<\"{}|^`":
                raise TurtleParseError(f"illegal character {ch!r} in IRI", line, column)
            if ch == "\\":
                seq, length = self._unicode_escape(text, end, line, column)
                out.append(seq)
                end += length
                continue
            out.append(ch)
            end += 1
        self._advance(end + 1 - self.pos)
        return _Token("iri", "".join(out), line, column)

    @staticmethod
    def _unicode_escape(text: str, pos: int, line: int, column: int) -> tuple[str, int]:
        if text.startswith("\\u", pos):
            hexpart = text[pos + 2 : pos + 6]
            width = 6
        elif text.startswith("\\U", pos):
            hexpart = text[pos + 2 : pos + 10]
            width = 10
        else:
            raise TurtleParseError("only \\u/\\U escapes are allowed in IRIs", line, column)
        try:
            return chr(int(hexpart, 16)), width
        except ValueError:
            raise TurtleParseError(f"bad unicode escape \\u{hexpart}", line, column) from None

    _STRING_ESCAPES = {
        "t": "\t",
        "b": "\b",
        "n": "\n",
        "r": "\r",
        "f": "\f",
        '"': '"',
        "'": "'",
        "\\": "\\",
    }

    def _string(self, line: int, column: int) -> _Token:
        text = self.text
        quote = text[self.pos]
        long = text.startswith(quote * 3, self.pos)
        delim = quote * 3 if long else quote
        end = self.pos + len(delim)
        out = []
        while True:
            if end >= len(text):
                raise TurtleParseError("unterminated string", line, column)
            if text.startswith(delim, end):
                break
            ch = text[end]
            if ch == "\\":
                if end + 1 >= len(text):
                    raise TurtleParseError("unterminated escape", line, column)
                nxt = text[end + 1]
                if nxt in self._STRING_ESCAPES:
                    out.append(self._STRING_ESCAPES[nxt])
                    end += 2
                    continue
                if nxt in "uU":
                    seq, length = self._unicode_escape(text, end, line, column)
                    out.append(seq)
                    end += length
                    continue
                raise TurtleParseError(f"unknown escape \\{nxt}", line, column)
            if not long and ch in "\n\r":
                raise TurtleParseError("newline in single-quoted string", line, column)
            out.append(ch)
            end += 1
        self._advance(end + len(delim) - self.pos)
        return _Token("string", "".join(out), line, column)

    def _at_word(self, line: int, column: int) -> _Token:
        m = _LANGTAG.match(self.text, self.pos)
        if not m:
            raise self.error("malformed @-token")
        word = m.group(0)
        self._advance(len(word))
        if word in ("@prefix", "@base"):
            return _Token(word, word, line, column)
        return _Token("langtag", word[1:], line, column)

    def _blank_label(self, line: int, column: int) -> _Token:
        m = re.compile(r"_:[A-Za-z0-9_][A-Za-z0-9_\-.]*").match(self.text, self.pos)
        if not m:
            raise self.error("malformed blank node label")
        label = m.group(0)[2:].rstrip(".")
        self._advance(2 + len(label))
        return _Token("blank", label, line, column)

    def _number(self, line: int, column: int) -> _Token:
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            raise self.error("malformed number")
        lexical = m.group(0)
        self._advance(len(lexical))
        if "e" in lexical or "E" in lexical:
            dt = XSD_DOUBLE
        elif "." in lexical:
            dt = XSD_DECIMAL
        else:
            dt = XSD_INTEGER
        return _Token("number", lexical, line, column, extra=dt)

    def _name(self, line: int, column: int) -> _Token:
        # Prefixed name, bare keyword (a, true, false, PREFIX, BASE), or
        # a prefixed name with escaped local characters.
        text = self.text
        end = self.pos
        out = []
        colon = -1
        while end < len(text):
            ch = text[end]
            if ch == "\\" and end + 1 < len(text) and text[end + 1] in _PN_LOCAL_ESCAPABLE:
                out.append(text[end + 1])
                end += 2
                continue
            if ch == ":" and colon == -1:
                colon = len("".join(out))
                out.append(ch)
                end += 1
                continue
            if ch == "." and colon >= 0:
                # '.' is legal inside a local name but a trailing '.' ends
                # the statement; look ahead to decide.
                nxt = text[end + 1] if end + 1 < len(text) else " "
                if _PN_LOCAL_CHAR.match(nxt) and nxt != ":":
                    out.append(ch)
                    end += 1
                    continue
                break
            if _PN_LOCAL_CHAR.match(ch) and ch != ".":
                out.append(ch)
                end += 1
                continue
            break
        word = "".join(out)
        if not word:
            raise self.error(f"unexpected character {text[self.pos]!r}")
        self._advance(end - self.pos)
        if colon == -1:
            if word == "a":
                return _Token("a", "a", line, column)
            if word in ("true", "false"):
                return _Token("boolean", word, line, column)
            if word.upper() in ("PREFIX", "BASE"):
                return _Token("@" + word.lower(), word, line, column)
            raise TurtleParseError(f"unexpected bare word {word!r}", line, column)
        prefix, local = word[:colon], word[colon + 1 :]
        return _Token("pname", (prefix, local), line, column)


# ---------------------------------------------------------------------------
# Parser


class TurtleParser:
    """Parses one Turtle document into a list of (s, p, o) triples.

    Blank node labels from the document are preserved; anonymous nodes
    get fresh ``anon<N>`` labels in document order so repeated parses of
    the same bytes yield identical triples.
    """

    def __init__(self, text: str | bytes, base: str | None = None):
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        self._lexer = _Lexer(text)
        self._tokens = self._lexer.tokens()
        self._current: _Token = next(self._tokens)
        self.prefixes: dict[str, str] = {}
        self.base = base
        self.triples: list[tuple[Term, Term, Term]] = []
        self._anon = 0

    # -- token plumbing

    def _next(self) -> _Token:
        tok = self._current
        self._current = next(self._tokens)
        return tok

    def _expect(self, kind: str) -> _Token:
        if self._current.kind != kind:
            raise TurtleParseError(
                f"expected {kind!r}, found {self._current.kind!r}",
                self._current.line,
                self._current.column,
            )
        return self._next()

    def _fail(self, message: str):
        raise TurtleParseError(message, self._current.line, self._current.column)

    # -- entry point

    def parse(self) -> list[tuple[Term, Term, Term]]:
        while self._current.kind != "eof":
            if self._current.kind in ("@prefix", "@base"):
                self._directive()
            else:
                self._statement()
        return self.triples

    def _directive(self) -> None:
        tok = self._next()
        sparql_style = tok.value not in ("@prefix", "@base")
        if tok.kind == "@prefix":
            name = self._expect("pname")
            prefix, local = name.value
            if local:
                self._fail("prefix declaration must end with ':'")
            target = self._expect("iri")
            self.prefixes[prefix] = self._resolve(target.value)
        else:
            target = self._expect("iri")
            self.base = self._resolve(target.value)
        if not sparql_style:
            self._expect(".")

    def _resolve(self, value: str) -> str:
        if self.base and not re.match(r"^[A-Za-z][A-Za-z0-9+.\-]*:", value):
            if value.startswith("#") or not value:
                return self.base + value
            root = self.base.rsplit("/", 1)[0] + "/" if "/" in self.base else self.base
            return root + value
        return value

    def _statement(self) -> None:
        subject = self._subject()
        self._predicate_object_list(subject)
        self._expect(".")

    def _subject(self) -> Term:
        kind = self._current.kind
        if kind in ("iri", "pname"):
            return self._iri_term()
        if kind == "blank":
            return blank(self._next().value)
        if kind == "[":
            return self._blank_property_list()
        if kind == "(":
            return self._collection()
        self._fail(f"cannot start a subject with {kind!r}")

    def _iri_term(self) -> Term:
        tok = self._next()
        if tok.kind == "iri":
            return iri(self._resolve(tok.value))
        prefix, local = tok.value
        if prefix not in self.prefixes:
            raise TurtleParseError(f"undeclared prefix {prefix!r}", tok.line, tok.column)
        return iri(self.prefixes[prefix] + local)

    def _predicate_object_list(self, subject: Term) -> None:
        while True:
            predicate = self._verb()
            self._object_list(subject, predicate)
            if self._current.kind == ";":
                self._next()
                # tolerate trailing ';' before '.' or ']'
                if self._current.kind in (".", "]"):
                    return
                continue
            return

    def _verb(self) -> Term:
        if self._current.kind == "a":
            self._next()
            return iri(RDF_TYPE)
        if self._current.kind in ("iri", "pname"):
            return self._iri_term()
        self._fail(f"expected a predicate, found {self._current.kind!r}")

    def _object_list(self, subject: Term, predicate: Term) -> None:
        while True:
            obj = self._object()
            self.triples.append((subject, predicate, obj))
            if self._current.kind == ",":
                self._next()
                continue
            return

    def _object(self) -> Term:
        kind = self._current.kind
        if kind in ("iri", "pname"):
            return self._iri_term()
        if kind == "blank":
            return blank(self._next().value)
        if kind == "[":
            return self._blank_property_list()
        if kind == "(":
            return self._collection()
        if kind == "string":
            return self._literal()
        if kind == "number":
            tok = self._next()
            return literal(tok.value, datatype=tok.extra)
        if kind == "boolean":
            return literal(self._next().value, datatype=XSD_BOOLEAN)
        self._fail(f"cannot parse an object from {kind!r}")

    def _literal(self) -> Term:
        tok = self._next()
        if self._current.kind == "langtag":
            return literal(tok.value, language=self._next().value)
        if self._current.kind == "^^":
            self._next()
            dt = self._iri_term()
            return literal(tok.value, datatype=dt.value)
        return literal(tok.value)

    def _fresh_blank(self) -> Term:
        self._anon += 1
        return blank(f"anon{self._anon}")

    def _blank_property_list(self) -> Term:
        self._expect("[")
        node = self._fresh_blank()
        if self._current.kind != "]":
            self._predicate_object_list(node)
        self._expect("]")
        return node

    def _collection(self) -> Term:
        self._expect("(")
        items = []
        while self._current.kind != ")":
            items.append(self._object())
        self._expect(")")
        if not items:
            return iri(RDF_NIL)
        head = self._fresh_blank()
        node = head
        for i, item in enumerate(items):
            self.triples.append((node, iri(RDF_FIRST), item))
            if i + 1 < len(items):
                nxt = self._fresh_blank()
                self.triples.append((node, iri(RDF_REST), nxt))
                node = nxt
            else:
                self.triples.append((node, iri(RDF_REST), iri(RDF_NIL)))
        return head


def parse_turtle(text: str | bytes) -> list[tuple[Term, Term, Term]]:
    return TurtleParser(text).parse()


# ---------------------------------------------------------------------------
# Serializer


DEFAULT_PREFIXES: dict[str, str] = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "geo": "http://www.opengis.net/ont/geosparql#",
    "sosa": "http://www.w3.org/ns/sosa/",
    "prov": "http://www.w3.org/ns/prov#",
    "wd": "http://www.wikidata.org/entity/",
    "wdt": "http://www.wikidata.org/prop/direct/",
    "nmc": "https://narramap.dev/ns/content#",
    "nca": "https://narramap.dev/ns/carto#",
    "por": "https://narramap.dev/portrayal/",
}

_PLAIN_INTEGER = re.compile(r"^[+-]?\d+$")
_PLAIN_DECIMAL = re.compile(r"^[+-]?\d*\.\d+$")
_PLAIN_DOUBLE = re.compile(r"^[+-]?(?:\d+\.\d*|\.\d+|\d+)[eE][+-]?\d+$")
_SAFE_LOCAL = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


def _compact(term: Term, prefixes: dict[str, str]) -> str:
    if term.is_blank:
        return f"_:{term.value}"
    if term.is_iri:
        for prefix, ns in prefixes.items():
            if term.value.startswith(ns):
                local = term.value[len(ns) :]
                if _SAFE_LOCAL.match(local):
                    return f"{prefix}:{local}"
        return f"<{term.value}>"
    # literal shorthand where the token grammar allows it
    if term.datatype == XSD_INTEGER and _PLAIN_INTEGER.match(term.value):
        return term.value
    if term.datatype == XSD_DECIMAL and _PLAIN_DECIMAL.match(term.value):
        return term.value
    if term.datatype == XSD_DOUBLE and _PLAIN_DOUBLE.match(term.value):
        return term.value
    if term.datatype == XSD_BOOLEAN and term.value in ("true", "false"):
        return term.value
    out = '"' + escape_literal(term.value) + '"'
    if term.language:
        return out + "@" + term.language
    if term.datatype:
        return out + "^^" + _compact(iri(term.datatype), prefixes)
    return out


def serialize_turtle(
    triples,
    prefixes: dict[str, str] | None = None,
) -> bytes:
    """Deterministic Turtle for a set of triples.

    Subjects sorted (IRIs before blanks), rdf:type first within a subject
    as ``a``, remaining predicates sorted, objects sorted.
    """
    prefixes = dict(DEFAULT_PREFIXES if prefixes is None else prefixes)
    by_subject: dict[Term, dict[Term, set[Term]]] = {}
    for s, p, o in triples:
        by_subject.setdefault(s, {}).setdefault(p, set()).add(o)

    lines = [f"@prefix {name}: <{ns}> ." for name, ns in prefixes.items()]
    lines.append("")

    def subject_key(term: Term):
        return (0 if term.is_iri else 1, term.value)

    def predicate_key(term: Term):
        return (0, "") if term.value == RDF_TYPE else (1, term.value)

    from .terms import term_sort_key

    for subject in sorted(by_subject, key=subject_key):
        s_txt = _compact(subject, prefixes)
        preds = sorted(by_subject[subject], key=predicate_key)
        for i, predicate in enumerate(preds):
            p_txt = "a" if predicate.value == RDF_TYPE else _compact(predicate, prefixes)
            objs = sorted(by_subject[subject][predicate], key=term_sort_key)
            o_txt = ", ".join(_compact(o, prefixes) for o in objs)
            lead = s_txt if i == 0 else " " * len(s_txt)
            tail = " ;" if i + 1 < len(preds) else " ."
            lines.append(f"{lead} {p_txt} {o_txt}{tail}")
        lines.append("")
    return ("\n".join(lines).rstrip("\n") + "\n").encode("utf-8")
