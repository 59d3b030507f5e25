import pytest

from narramap.terms import blank, iri, literal
from narramap.turtle import TurtleParseError, parse_turtle, serialize_turtle

EX = "http://example.org/"


def test_basic_statement():
    triples = parse_turtle(f"<{EX}s> <{EX}p> <{EX}o> .")
    assert triples == [(iri(EX + "s"), iri(EX + "p"), iri(EX + "o"))]


def test_prefixes_both_spellings():
    text = """
    @prefix ex: <http://example.org/> .
    PREFIX two: <http://two.example/>
    ex:a two:b ex:c .
    """
    (triple,) = parse_turtle(text)
    assert triple[0].value == "http://example.org/a"
    assert triple[1].value == "http://two.example/b"


def test_semicolons_commas_and_a():
    text = """
    @prefix ex: <http://example.org/> .
    ex:s a ex:T ;
         ex:p ex:o1, ex:o2 .
    """
    triples = parse_turtle(text)
    assert len(triples) == 3
    assert triples[0][1].value.endswith("#type")


def test_literals_language_and_datatype():
    text = """
    @prefix ex: <http://example.org/> .
    @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
    ex:s ex:label "war"@en ;
         ex:when "1939-09-01T00:00:00Z"^^xsd:dateTime ;
         ex:n 42 ;
         ex:x 4.5 ;
         ex:d 1.0e6 ;
         ex:ok true .
    """
    triples = {t[1].local_name(): t[2] for t in parse_turtle(text)}
    assert triples["label"].language == "en"
    assert triples["when"].datatype.endswith("dateTime")
    assert triples["n"].datatype.endswith("integer")
    assert triples["x"].datatype.endswith("decimal")
    assert triples["d"].datatype.endswith("double")
    assert triples["ok"].value == "true"


def test_string_escapes_and_long_strings():
    text = r'''
    @prefix ex: <http://example.org/> .
    ex:s ex:p "line\nbreak \"quoted\" \\ done" .
    ex:s ex:q """multi
line""" .
    '''
    values = [t[2].value for t in parse_turtle(text)]
    assert 'line\nbreak "quoted" \\ done' in values
    assert "multi\nline" in values


def test_blank_nodes_and_property_lists():
    text = """
    @prefix ex: <http://example.org/> .
    _:x ex:p ex:o .
    ex:s ex:q [ ex:inner ex:o2 ] .
    """
    triples = parse_turtle(text)
    assert triples[0][0] == blank("x")
    anon = [t for t in triples if t[1].value.endswith("inner")][0][0]
    assert anon.is_blank


def test_collections_expand_to_rdf_lists():
    text = """
    @prefix ex: <http://example.org/> .
    ex:s ex:p ( ex:a ex:b ) .
    """
    triples = parse_turtle(text)
    firsts = [t for t in triples if t[1].value.endswith("#first")]
    rests = [t for t in triples if t[1].value.endswith("#rest")]
    assert len(firsts) == 2 and len(rests) == 2
    assert any(t[2].value.endswith("#nil") for t in rests)


def test_iri_unicode_escape():
    (triple,) = parse_turtle("<http://example.org/\\u00e9> <http://e.org/p> 1 .")
    assert triple[0].value == "http://example.org/é"


def test_comments_ignored():
    triples = parse_turtle("# leading\n<http://e/s> <http://e/p> <http://e/o> . # trailing")
    assert len(triples) == 1


def test_error_carries_line_and_column():
    with pytest.raises(TurtleParseError) as err:
        parse_turtle("@prefix ex: <http://example.org/> .\nex:s ex:p .")
    assert err.value.line == 2
    assert err.value.column > 0


def test_undeclared_prefix_fails():
    with pytest.raises(TurtleParseError):
        parse_turtle("nope:s <http://e/p> 1 .")


def test_unterminated_string_fails():
    with pytest.raises(TurtleParseError):
        parse_turtle('<http://e/s> <http://e/p> "open .')


def test_serializer_is_deterministic_and_round_trips():
    text = """
    @prefix ex: <http://example.org/> .
    ex:b ex:p ex:a ; ex:q "v"@en .
    ex:a a ex:T ; ex:n 5 .
    """
    triples = set(parse_turtle(text))
    once = serialize_turtle(triples)
    twice = serialize_turtle(set(parse_turtle(once)))
    assert once == twice
    assert set(parse_turtle(once)) == triples


def test_serializer_orders_subjects_and_predicates():
    triples = [
        (iri(EX + "z"), iri(EX + "p"), literal("1")),
        (iri(EX + "a"), iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), iri(EX + "T")),
        (iri(EX + "a"), iri(EX + "b"), literal("2")),
    ]
    text = serialize_turtle(triples).decode("utf-8")
    lines = [l for l in text.splitlines() if l and not l.startswith("@prefix")]
    assert lines[0].startswith("<http://example.org/a> a ")
    assert "z" in lines[-1] or "z" in lines[-2]
