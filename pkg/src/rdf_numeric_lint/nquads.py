"""Line-isolated N-Triples / N-Quads reader.

Each physical line is parsed on its own. A broken line becomes a
:class:`FailureRecord` and never affects its neighbours.
"""
from __future__ import annotations

import enum
import gzip
import io
import re
import zlib
from dataclasses import dataclass
from typing import BinaryIO, Iterator, Optional, Union

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_STRING = XSD + "string"
RDF_LANGSTRING = RDF + "langString"

DEFAULT_MAX_LINE_BYTES = 1 << 20
SNIPPET_CHARS = 200
GZIP_MAGIC = b"\x1f\x8b"


class FailureReason(enum.Enum):
    MALFORMED_IRI = "MalformedIri"
    BAD_ENCODING = "BadEncoding"
    SYNTAX_ERROR = "SyntaxError"
    OTHER = "Other"


class StreamAborted(IOError):
    """The underlying byte stream failed; outcomes yielded so far stay valid."""


@dataclass(frozen=True)
class Iri:
    value: str


@dataclass(frozen=True)
class BlankNode:
    label: str


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype_iri: str = XSD_STRING
    language_tag: Optional[str] = None


Term = Union[Iri, BlankNode, Literal]


@dataclass(frozen=True)
class Quad:
    subject: Union[Iri, BlankNode]
    predicate: Iri
    object: Term
    graph: Optional[Union[Iri, BlankNode]]
    line_number: int
    source_file: str


@dataclass(frozen=True)
class FailureRecord:
    source_file: str
    line_number: int
    reason: FailureReason
    snippet: str


class _LineError(Exception):
    def __init__(self, reason: FailureReason, message: str):
        super().__init__(message)
        self.reason = reason


_WS = " \t"
_SCHEME_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")
# characters that may not appear raw inside <...>
_IRI_FORBIDDEN_RE = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_UCHAR_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8}))")
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_LANG_RE = re.compile(r"@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)")
_PN_START = (
    "A-Za-z0-9_\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF"
    "\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD"
    "\U00010000-\U000EFFFF"
)
_PN_MORE = _PN_START + "\\-\u00B7\u0300-\u036F\u203F-\u2040"
_BNODE_RE = re.compile(rf"_:([{_PN_START}](?:[{_PN_MORE}.]*[{_PN_MORE}])?)")


def _code_point(hex_digits: str) -> str:
    cp = int(hex_digits, 16)
    if cp > 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
        raise _LineError(FailureReason.BAD_ENCODING, f"invalid code point U+{cp:X}")
    return chr(cp)


def _unescape_iri(raw: str) -> str:
    def repl(m: re.Match) -> str:
        return _code_point(m.group(1) or m.group(2))

    return _UCHAR_RE.sub(repl, raw)


def _check_iri(raw: str) -> str:
    bad = _IRI_FORBIDDEN_RE.search(_UCHAR_RE.sub("", raw))
    if bad:
        raise _LineError(FailureReason.MALFORMED_IRI, f"illegal character {bad.group()!r} in IRI")
    iri = _unescape_iri(raw)
    if not _SCHEME_RE.match(iri):
        raise _LineError(FailureReason.MALFORMED_IRI, "IRI is not absolute")
    if _IRI_FORBIDDEN_RE.search(iri):
        raise _LineError(FailureReason.MALFORMED_IRI, "escaped IRI contains an illegal character")
    return iri


class _Cursor:
    __slots__ = ("text", "pos")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        n = len(self.text)
        while self.pos < n and self.text[self.pos] in _WS:
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def read_iri(self) -> Iri:
        end = self.text.find(">", self.pos + 1)
        if end < 0:
            raise _LineError(FailureReason.SYNTAX_ERROR, "unterminated IRI")
        raw = self.text[self.pos + 1:end]
        self.pos = end + 1
        return Iri(_check_iri(raw))

    def read_bnode(self) -> BlankNode:
        m = _BNODE_RE.match(self.text, self.pos)
        if not m:
            raise _LineError(FailureReason.SYNTAX_ERROR, "malformed blank node label")
        self.pos = m.end()
        return BlankNode(m.group(1))

    def read_literal(self) -> Literal:
        text, i, n = self.text, self.pos + 1, len(self.text)
        out: list[str] = []
        while True:
            if i >= n:
                raise _LineError(FailureReason.SYNTAX_ERROR, "unterminated literal")
            ch = text[i]
            if ch == '"':
                break
            if ch == "\\":
                nxt = text[i + 1:i + 2]
                if nxt in _ECHAR:
                    out.append(_ECHAR[nxt])
                    i += 2
                    continue
                m = _UCHAR_RE.match(text, i)
                if not m:
                    raise _LineError(FailureReason.SYNTAX_ERROR, "illegal escape in literal")
                out.append(_code_point(m.group(1) or m.group(2)))
                i = m.end()
                continue
            if ch in "\n\r":
                raise _LineError(FailureReason.SYNTAX_ERROR, "raw line break in literal")
            out.append(ch)
            i += 1
        self.pos = i + 1
        lexical = "".join(out)
        if text.startswith("^^", self.pos):
            self.pos += 2
            if self.peek() != "<":
                raise _LineError(FailureReason.SYNTAX_ERROR, "datatype must be an IRI")
            return Literal(lexical, self.read_iri().value)
        if self.peek() == "@":
            m = _LANG_RE.match(text, self.pos)
            if not m:
                raise _LineError(FailureReason.SYNTAX_ERROR, "malformed language tag")
            self.pos = m.end()
            return Literal(lexical, RDF_LANGSTRING, m.group(1))
        return Literal(lexical)

    def read_term(self, allowed: str) -> Term:
        ch = self.peek()
        if ch == "<":
            return self.read_iri()
        if ch == "_" and "b" in allowed:
            return self.read_bnode()
        if ch == '"' and "l" in allowed:
            return self.read_literal()
        raise _LineError(FailureReason.SYNTAX_ERROR, f"unexpected {ch or 'end of line'!r}")


def _is_blank(line: str) -> bool:
    stripped = line.strip(" \t\r")
    return not stripped or stripped.startswith("#")


def _parse(line: str, file: str, line_number: int) -> Quad:
    cur = _Cursor(line)
    cur.skip_ws()
    subject = cur.read_term("b")
    cur.skip_ws()
    if cur.peek() != "<":
        raise _LineError(FailureReason.SYNTAX_ERROR, "predicate must be an IRI")
    predicate = cur.read_iri()
    cur.skip_ws()
    obj = cur.read_term("bl")
    cur.skip_ws()
    graph = None
    if cur.peek() in ("<", "_"):
        graph = cur.read_term("b")
        cur.skip_ws()
    if cur.peek() != ".":
        raise _LineError(FailureReason.SYNTAX_ERROR, "expected '.' at end of statement")
    cur.pos += 1
    rest = cur.text[cur.pos:].strip(" \t\r")
    if rest and not rest.startswith("#"):
        raise _LineError(FailureReason.SYNTAX_ERROR, "trailing content after '.'")
    return Quad(subject, predicate, obj, graph, line_number, file)


def parse_statement_line(line: str, file: str, line_number: int) -> Optional[Union[Quad, FailureRecord]]:
    """Parse one physical line; ``None`` for blank and comment lines."""
    if _is_blank(line):
        return None
    try:
        return _parse(line, file, line_number)
    except _LineError as exc:
        return FailureRecord(file, line_number, exc.reason, line[:SNIPPET_CHARS])


def _open_maybe_gzip(stream: BinaryIO) -> BinaryIO:
    buffered = stream if hasattr(stream, "peek") else io.BufferedReader(stream)  # type: ignore[arg-type]
    if buffered.peek(2)[:2] == GZIP_MAGIC:
        return gzip.GzipFile(fileobj=buffered, mode="rb")  # type: ignore[return-value]
    return buffered


def scan_stream(
    stream: BinaryIO, file: str, max_line_bytes: int = DEFAULT_MAX_LINE_BYTES
) -> Iterator[Union[Quad, FailureRecord]]:
    """Yield one outcome per non-blank line, in line order, in constant memory."""
    try:
        source = _open_maybe_gzip(stream)
        line_number = 0
        while True:
            raw = source.readline(max_line_bytes + 1)
            if not raw:
                return
            line_number += 1
            if len(raw) > max_line_bytes and not raw.endswith(b"\n"):
                head = raw[:SNIPPET_CHARS * 4].decode("utf-8", "replace")[:SNIPPET_CHARS]
                while raw and not raw.endswith(b"\n"):
                    raw = source.readline(max_line_bytes)
                yield FailureRecord(file, line_number, FailureReason.OTHER, head)
                continue
            raw = raw.rstrip(b"\n")
            if raw.endswith(b"\r"):
                raw = raw[:-1]
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError:
                text = raw.decode("utf-8", "replace")
                if not _is_blank(text):
                    yield FailureRecord(file, line_number, FailureReason.BAD_ENCODING, text[:SNIPPET_CHARS])
                continue
            outcome = parse_statement_line(line, file, line_number)
            if outcome is not None:
                yield outcome
    except (OSError, EOFError, zlib.error) as exc:
        raise StreamAborted(f"{file}: {exc}") from exc
