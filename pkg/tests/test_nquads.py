import gzip
import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdf_numeric_lint.nquads import (
    RDF_LANGSTRING,
    XSD_STRING,
    BlankNode,
    FailureReason,
    FailureRecord,
    Iri,
    Literal,
    Quad,
    StreamAborted,
    parse_statement_line,
    scan_stream,
)

XSD_FLOAT = "http://www.w3.org/2001/XMLSchema#float"


def good_line(i: int) -> str:
    return f'<http://example.org/s{i}> <http://schema.org/price> "{i}.5"^^<{XSD_FLOAT}> <http://example.org/g> .'


def test_minimal_statement():
    q = parse_statement_line(f'<http://a> <http://b> "0.1"^^<{XSD_FLOAT}> .', "f.nq", 1)
    assert q == Quad(Iri("http://a"), Iri("http://b"), Literal("0.1", XSD_FLOAT), None, 1, "f.nq")


def test_space_in_iri_is_malformed_iri():
    r = parse_statement_line('<http://a> <http://b> "x" <bad iri> .', "f.nq", 7)
    assert isinstance(r, FailureRecord)
    assert (r.reason, r.line_number, r.source_file) == (FailureReason.MALFORMED_IRI, 7, "f.nq")


@pytest.mark.parametrize("line, expected", [
    ('_:b0 <http://p> "plain" .', Literal("plain", XSD_STRING)),
    ('_:b0 <http://p> "hallo"@de-AT .', Literal("hallo", RDF_LANGSTRING, "de-AT")),
    (r'_:b0 <http://p> "a\tb\"c\\dé\U0001F600" .', Literal('a\tb"c\\dé\U0001F600')),
    ('_:b0 <http://p> " 1.50 " .', Literal(" 1.50 ")),
    ('_:b0 <http://p> "" .', Literal("")),
])
def test_literal_forms(line, expected):
    q = parse_statement_line(line, "f", 1)
    assert q.object == expected


def test_terms_and_graphs():
    q = parse_statement_line("_:a.b <http://p> _:c <http://g> .", "f", 1)
    assert q.subject == BlankNode("a.b") and q.object == BlankNode("c") and q.graph == Iri("http://g")
    q = parse_statement_line("<http://s> <http://p> <http://o> _:g . # trailing comment", "f", 1)
    assert q.graph == BlankNode("g")
    q = parse_statement_line("<http://s>\t<http://p>\t<http://o>.", "f", 1)
    assert q.graph is None
    q = parse_statement_line(r"<http://s> <http://p> <http://xé> .", "f", 1)
    assert q.object == Iri("http://xé")


@pytest.mark.parametrize("line", ["", "   ", "# comment", "  # indented comment", "\t"])
def test_blank_lines(line):
    assert parse_statement_line(line, "f", 1) is None


@pytest.mark.parametrize("line, reason", [
    ("<http://a> <http://b> <http://c>", FailureReason.SYNTAX_ERROR),
    ("<http://a> <http://b> .", FailureReason.SYNTAX_ERROR),
    ('"lit" <http://b> <http://c> .', FailureReason.SYNTAX_ERROR),
    ('<http://a> _:p <http://c> .', FailureReason.SYNTAX_ERROR),
    ('<http://a> <http://b> "unterminated .', FailureReason.SYNTAX_ERROR),
    ('<http://a> <http://b> "x"^^xsd:float .', FailureReason.SYNTAX_ERROR),
    ('<http://a> <http://b> "x"@ .', FailureReason.SYNTAX_ERROR),
    (r'<http://a> <http://b> "bad \q escape" .', FailureReason.SYNTAX_ERROR),
    ('<http://a> <http://b> <http://c> . extra', FailureReason.SYNTAX_ERROR),
    ('<http://a> <http://b> "x" "y" .', FailureReason.SYNTAX_ERROR),
    ("<http://a <http://b> <http://c> .", FailureReason.MALFORMED_IRI),
    ("<relative> <http://b> <http://c> .", FailureReason.MALFORMED_IRI),
    ("<http://a> <http://b{}> <http://c> .", FailureReason.MALFORMED_IRI),
    (r"<http://a b> <http://b> <http://c> .", FailureReason.MALFORMED_IRI),
    ('<http://a> <http://b> "x"^^<not absolute> .', FailureReason.MALFORMED_IRI),
    (r'<http://a> <http://b> "\uD800" .', FailureReason.BAD_ENCODING),
])
def test_failure_reasons(line, reason):
    r = parse_statement_line(line, "f", 3)
    assert isinstance(r, FailureRecord)
    assert r.reason is reason
    assert r.snippet == line[:200]


def test_snippet_is_truncated():
    line = "<http://a> <http://b> " + "x" * 500
    r = parse_statement_line(line, "f", 1)
    assert len(r.snippet) == 200 and line.startswith(r.snippet)


def corrupt(line: str, rng: random.Random) -> str:
    kind = rng.randrange(3)
    if kind == 0:
        return line.replace("<http://example.org/s", "<http://example.org/ s", 1)
    if kind == 1:
        return line.rstrip(" .")
    return line.replace("^^<", "^^", 1)


@pytest.mark.parametrize("seed", range(5))
def test_thousand_lines_with_three_corruptions(seed):
    rng = random.Random(seed)
    bad = set(rng.sample(range(1, 1001), 3))
    lines = [corrupt(good_line(i), rng) if i in bad else good_line(i) for i in range(1, 1001)]
    outcomes = [parse_statement_line(l, "f", i) for i, l in enumerate(lines, 1)]
    quads = [o for o in outcomes if isinstance(o, Quad)]
    fails = [o for o in outcomes if isinstance(o, FailureRecord)]
    assert len(quads) == 997 and len(fails) == 3
    assert {f.line_number for f in fails} == bad


def scan_bytes(data: bytes, **kw):
    return list(scan_stream(io.BytesIO(data), "f", **kw))


def test_scan_gzip_transparent():
    data = "\n".join(good_line(i) for i in range(10)).encode() + b"\n"
    plain = scan_bytes(data)
    zipped = scan_bytes(gzip.compress(data))
    assert len(zipped) == 10 and all(isinstance(q, Quad) for q in zipped)
    assert zipped == plain


def test_scan_invalid_utf8_isolated():
    lines = [good_line(i).encode() for i in range(5)]
    lines[2] = lines[2].replace(b".5", b".5\xff\xfe", 1)
    out = scan_bytes(b"\n".join(lines))
    assert [type(o).__name__ for o in out] == ["Quad", "Quad", "FailureRecord", "Quad", "Quad"]
    assert out[2].reason is FailureReason.BAD_ENCODING and out[2].line_number == 3


def test_scan_empty_stream():
    assert scan_bytes(b"") == []


def test_scan_line_numbers_skip_blanks_and_handle_crlf():
    data = b"# header\r\n\r\n" + good_line(1).encode() + b"\r\n\n" + good_line(2).encode()
    out = scan_bytes(data)
    assert [o.line_number for o in out] == [3, 5]
    assert all(isinstance(o, Quad) for o in out)


def test_overlong_line_is_other_failure():
    long_line = b'<http://a> <http://b> "' + b"9" * 5000 + b'" .'
    data = good_line(1).encode() + b"\n" + long_line + b"\n" + good_line(3).encode() + b"\n"
    out = scan_bytes(data, max_line_bytes=1000)
    assert [type(o).__name__ for o in out] == ["Quad", "FailureRecord", "Quad"]
    assert out[1].reason is FailureReason.OTHER and out[1].line_number == 2
    assert [o.line_number for o in out] == [1, 2, 3]


def test_lexical_fidelity():
    for lexical in ["0.10", "+1.0E2", " 7 ", "1e-9", "0001"]:
        q = scan_bytes(f'<http://a> <http://b> "{lexical}"^^<{XSD_FLOAT}> .'.encode())[0]
        assert q.object.lexical == lexical


def test_truncated_gzip_aborts_stream():
    data = gzip.compress(("\n".join(good_line(i) for i in range(2000)) + "\n").encode())
    seen = []
    with pytest.raises(StreamAborted):
        for outcome in scan_stream(io.BytesIO(data[: len(data) // 2]), "f"):
            seen.append(outcome)
    assert seen and all(isinstance(q, Quad) for q in seen)


class _Exploding(io.RawIOBase):
    def __init__(self, payload: bytes):
        self.payload = payload
        self.done = False

    def readable(self):
        return True

    def readinto(self, b):
        if self.done:
            raise OSError("disk on fire")
        self.done = True
        n = len(self.payload)
        b[:n] = self.payload
        return n


def test_io_failure_aborts_with_partial_results():
    stream = _Exploding((good_line(1) + "\n" + good_line(2) + "\n").encode())
    got = []
    with pytest.raises(StreamAborted):
        for o in scan_stream(stream, "f"):
            got.append(o)
    assert len(got) == 2


@settings(max_examples=60, deadline=None)
@given(
    k=st.integers(0, 19),
    garbage=st.binary(min_size=0, max_size=40).filter(lambda b: b"\n" not in b),
)
def test_line_isolation(k, garbage):
    lines = [good_line(i).encode() for i in range(20)]
    baseline = scan_bytes(b"\n".join(lines))
    lines[k] = garbage
    altered = scan_bytes(b"\n".join(lines))
    before = {o.line_number: o for o in baseline}
    after = {o.line_number: o for o in altered}
    for n in range(1, 21):
        if n != k + 1:
            assert before.get(n) == after.get(n)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["good", "bad", "blank", "comment", "binary"]), max_size=40))
def test_count_conservation(kinds):
    rendered = {
        "good": good_line(1).encode(),
        "bad": b"<http://a> <http://b>",
        "blank": b"   ",
        "comment": b"# note",
        "binary": b"\xff\xfe <http://x>",
    }
    data = b"\n".join(rendered[k] for k in kinds)
    out = scan_bytes(data)
    statements = sum(1 for k in kinds if k not in ("blank", "comment"))
    assert len(out) == statements
