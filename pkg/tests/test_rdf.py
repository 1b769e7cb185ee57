import pytest
from hypothesis import given
from hypothesis import strategies as st

from linkquery.rdf import (
    BlankNode,
    Iri,
    Literal,
    Triple,
    parse_ntriples,
    scan_term,
    serialize_ntriples,
    term_to_text,
    TermScanError,
)


def T(s, p, o):
    return Triple(s, p, o)


EX = "http://example.org/"


def test_parse_basic_forms():
    text = """
<http://a.example/s> <http://a.example/p> <http://a.example/o> .
<http://a.example/s> <http://a.example/p> "plain" .
<http://a.example/s> <http://a.example/p> "tagged"@en .
<http://a.example/s> <http://a.example/p> "typed"^^<http://www.w3.org/2001/XMLSchema#int> .
_:b0 <http://a.example/p> _:b1 .
# a comment line
"""
    triples, errors = parse_ntriples(text, doc_scope="d")
    assert errors == []
    assert len(triples) == 5
    assert triples[0].object == Iri("http://a.example/o")
    assert triples[1].object == Literal("plain")
    assert triples[2].object == Literal("tagged", language="en")
    assert triples[3].object == Literal("typed", datatype="http://www.w3.org/2001/XMLSchema#int")
    assert triples[4].subject == BlankNode("b0", scope="d")
    assert triples[4].object == BlankNode("b1", scope="d")


def test_parse_reports_bad_lines_and_continues():
    text = "\n".join(
        [
            f"<{EX}s> <{EX}p> <{EX}o> .",
            "this is not a triple",
            f"<{EX}s> <{EX}p> <{EX}o2>",  # missing terminating dot
            f'"literal" <{EX}p> <{EX}o> .',  # literal subject
            f"<{EX}s> <{EX}p> <{EX}o3> .",
        ]
    )
    triples, errors = parse_ntriples(text, doc_scope="d")
    assert len(triples) == 2
    assert sorted(e.line for e in errors) == [2, 3, 4]


def test_parse_accepts_bytes_with_invalid_utf8():
    triples, errors = parse_ntriples(b"<http://a/s> <http://a/p> \xff\xfe .", doc_scope="d")
    assert triples == []
    assert len(errors) == 1


def test_string_escapes_round_trip():
    lit = Literal('tab\there "quote" back\\slash\nnewline')
    text = serialize_ntriples([T(Iri(EX + "s"), Iri(EX + "p"), lit)])
    assert "\\t" in text and '\\"' in text and "\\n" in text
    triples, errors = parse_ntriples(text, doc_scope="d")
    assert errors == []
    assert triples[0].object == lit


def test_numeric_escapes_in_iri_and_literal():
    triples, errors = parse_ntriples(
        "<http://a/s\\u0041> <http://a/p> \"\\U0001F600\" .", doc_scope="d"
    )
    assert errors == []
    assert triples[0].subject == Iri("http://a/sA")
    assert triples[0].object == Literal("\U0001f600")


def test_scan_term_error_carries_position():
    with pytest.raises(TermScanError) as exc:
        scan_term("<http://unterminated", 0, scope="d")
    assert exc.value.pos >= 0


def test_iri_rejects_relative_and_spaces():
    with pytest.raises(ValueError):
        Iri("no-scheme-here")
    with pytest.raises(ValueError):
        Iri("http://a.example/with space")


def test_triple_validation():
    s, p = Iri(EX + "s"), Iri(EX + "p")
    with pytest.raises(ValueError):
        Triple(Literal("x"), p, s)
    with pytest.raises(ValueError):
        Triple(s, Literal("x"), s)
    with pytest.raises(ValueError):
        Triple(s, BlankNode("b", "d"), s)


def test_literal_rejects_datatype_and_language_together():
    with pytest.raises(ValueError):
        Literal("x", datatype=EX + "t", language="en")


# -- hypothesis: serialization round trip and parser totality -------------------

_iri_text = st.text(
    alphabet=st.characters(
        min_codepoint=33,
        max_codepoint=0x2FF,
        blacklist_characters='<>"{}|^`\\',
    ),
    max_size=12,
)
_iris = st.builds(lambda tail: Iri("http://x.example/" + tail), _iri_text)
_bnodes = st.builds(
    lambda label: BlankNode(label, scope="orig"),
    st.from_regex(r"[A-Za-z_][A-Za-z0-9_\-]{0,8}", fullmatch=True),
)
_plain = st.builds(Literal, st.text(max_size=20))
_tagged = st.builds(lambda s, l: Literal(s, language=l), st.text(max_size=10), st.sampled_from(["en", "en-US", "de"]))
_typed = st.builds(lambda s, d: Literal(s, datatype=d.value), st.text(max_size=10), _iris)
_objects = st.one_of(_iris, _bnodes, _plain, _tagged, _typed)
_triples = st.builds(T, st.one_of(_iris, _bnodes), _iris, _objects)


def _same_modulo_bnodes(a, b):
    fwd, back = {}, {}
    for ta, tb in zip(a, b):
        for x, y in zip(ta.terms(), tb.terms()):
            if isinstance(x, BlankNode) != isinstance(y, BlankNode):
                return False
            if isinstance(x, BlankNode):
                if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
                    return False
            elif x != y:
                return False
    return len(a) == len(b)


@given(st.lists(_triples, max_size=8))
def test_round_trip_modulo_bnode_relabeling(triples):
    text = serialize_ntriples(triples)
    parsed, errors = parse_ntriples(text, doc_scope="again")
    assert errors == []
    assert _same_modulo_bnodes(triples, parsed)


@given(st.binary(max_size=400))
def test_parser_is_total_on_arbitrary_bytes(data):
    triples, errors = parse_ntriples(data, doc_scope="d")
    assert isinstance(triples, list) and isinstance(errors, list)
    for t in triples:
        assert isinstance(t, Triple)


@given(_objects)
def test_term_to_text_single_term_round_trip(term):
    if isinstance(term, BlankNode):
        return  # labels are rewritten on serialization; covered above
    text = f"<http://x.example/s> <http://x.example/p> {term_to_text(term)} ."
    parsed, errors = parse_ntriples(text, doc_scope="d")
    assert errors == []
    assert parsed[0].object == term
