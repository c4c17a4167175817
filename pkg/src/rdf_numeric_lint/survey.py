"""Per-(property, datatype) usage measures over parsed statements."""
from __future__ import annotations

import csv
import enum
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import IO, Iterable, Iterator, Mapping, Optional, Union

from .exactness import (
    BINARY32,
    BINARY64,
    NotationClass,
    classify_lexical,
    lexical_is_exactly_representable,
)
from .nquads import FailureRecord, Iri, Literal, Quad

RDFS_RANGE = "http://www.w3.org/2000/01/rdf-schema#range"
SCHEMA_RANGE_INCLUDES = "http://schema.org/rangeIncludes"

MEASURES_HEADER = ["source", "file", "property", "datatype", "measure", "count"]
FAILURES_HEADER = ["source", "file", "line", "reason", "snippet"]


class Measure(enum.Enum):
    UNPRECISE_REPRESENTABLE_IN_DOUBLE = "UnpreciseRepresentableInDouble"
    UNPRECISE_REPRESENTABLE_IN_FLOAT = "UnpreciseRepresentableInFloat"
    USED_AS_DATATYPE = "UsedAsDatatype"
    USED_AS_PROPERTY_RANGE = "UsedAsPropertyRange"
    VALID_DECIMAL_NOTATION = "ValidDecimalNotation"
    VALID_EXPONENTIAL_NOTATION = "ValidExponentialNotation"
    VALID_INF_OR_NAN_NOTATION = "ValidInfOrNaNNotation"
    VALID_INTEGER_NOTATION = "ValidIntegerNotation"


_NOTATION_MEASURE = {
    NotationClass.INTEGER: Measure.VALID_INTEGER_NOTATION,
    NotationClass.DECIMAL: Measure.VALID_DECIMAL_NOTATION,
    NotationClass.EXPONENTIAL: Measure.VALID_EXPONENTIAL_NOTATION,
    NotationClass.INF_OR_NAN: Measure.VALID_INF_OR_NAN_NOTATION,
}
_NUMERIC_NOTATIONS = (NotationClass.INTEGER, NotationClass.DECIMAL, NotationClass.EXPONENTIAL)

# (source, file, property, datatype, measure)
MeasureKey = tuple[str, str, str, str, Measure]


class SinkFailure(IOError):
    pass


class MalformedMeasuresCsv(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MalformedPrefixMap(ValueError):
    pass


@dataclass(frozen=True)
class CleaningConfig:
    unify_scheme: bool = True
    prefix_map: Mapping[str, str] = field(default_factory=dict)
    apply_prefix_expansion: bool = True
    count_range_includes: bool = False

    def __post_init__(self):
        for label, ns in self.prefix_map.items():
            if ":" not in ns or not ns.endswith(("/", "#")):
                raise ValueError(f"namespace for {label!r} must be an absolute IRI ending in '/' or '#': {ns!r}")


def clean_iri(iri: str, config: CleaningConfig) -> str:
    if config.apply_prefix_expansion and config.prefix_map and "://" not in iri:
        label, sep, local = iri.partition(":")
        if sep and label in config.prefix_map:
            iri = config.prefix_map[label] + local
    if config.unify_scheme and iri.startswith("https://"):
        iri = "http://" + iri[len("https://"):]
    return iri


@lru_cache(maxsize=1 << 16)
def _lexical_measures(lexical: str) -> tuple[Measure, ...]:
    notation = classify_lexical(lexical)
    if notation is NotationClass.INVALID:
        return ()
    found = [_NOTATION_MEASURE[notation]]
    if notation in _NUMERIC_NOTATIONS:
        if not lexical_is_exactly_representable(lexical, BINARY32):
            found.append(Measure.UNPRECISE_REPRESENTABLE_IN_FLOAT)
        if not lexical_is_exactly_representable(lexical, BINARY64):
            found.append(Measure.UNPRECISE_REPRESENTABLE_IN_DOUBLE)
    return tuple(found)


def measure_quad(q: Quad, config: CleaningConfig, source_label: str = "") -> list[tuple[MeasureKey, int]]:
    out: list[tuple[MeasureKey, int]] = []
    prop = clean_iri(q.predicate.value, config)
    obj = q.object
    if isinstance(obj, Literal):
        datatype = clean_iri(obj.datatype_iri, config)
        base = (source_label, q.source_file, prop, datatype)
        out.append(((*base, Measure.USED_AS_DATATYPE), 1))
        for measure in _lexical_measures(obj.lexical):
            out.append(((*base, measure), 1))
    elif isinstance(obj, Iri) and isinstance(q.subject, Iri):
        if prop == RDFS_RANGE or (config.count_range_includes and prop == SCHEMA_RANGE_INCLUDES):
            key = (source_label, q.source_file, clean_iri(q.subject.value, config),
                   clean_iri(obj.value, config), Measure.USED_AS_PROPERTY_RANGE)
            out.append((key, 1))
    return out


class MeasureTable:
    """Mergeable counts keyed by (source, file, property, datatype, measure)."""

    def __init__(self, counts: Optional[Mapping[MeasureKey, int]] = None):
        self.counts: Counter = Counter()
        if counts:
            for key, n in counts.items():
                if n:
                    self.counts[key] += n

    def add(self, key: MeasureKey, n: int = 1) -> None:
        self.counts[key] += n

    def merge(self, other: "MeasureTable") -> "MeasureTable":
        merged = MeasureTable(self.counts)
        merged.counts.update(other.counts)
        return merged

    __add__ = merge

    def __eq__(self, other):
        if not isinstance(other, MeasureTable):
            return NotImplemented
        return +self.counts == +other.counts

    def __len__(self):
        return len(self.counts)

    def __repr__(self):
        return f"MeasureTable({len(self.counts)} keys)"

    def get(self, source: str, file: str, prop: str, datatype: str, measure: Measure) -> int:
        return self.counts.get((source, file, prop, datatype, measure), 0)

    def sorted_items(self) -> list[tuple[MeasureKey, int]]:
        return sorted(self.counts.items(), key=lambda kv: (*kv[0][:4], kv[0][4].value))

    def groups(self) -> dict[tuple[str, str, str, str], dict[Measure, int]]:
        out: dict[tuple[str, str, str, str], dict[Measure, int]] = {}
        for (src, f, p, d, m), n in self.counts.items():
            out.setdefault((src, f, p, d), {})[m] = n
        return out

    def invariant_violations(self) -> list[str]:
        """Rows where the per-group count inequalities do not hold."""
        problems = []
        for group, c in sorted(self.groups().items()):
            g = lambda m: c.get(m, 0)  # noqa: E731
            numeric = (g(Measure.VALID_INTEGER_NOTATION) + g(Measure.VALID_DECIMAL_NOTATION)
                       + g(Measure.VALID_EXPONENTIAL_NOTATION))
            notations = numeric + g(Measure.VALID_INF_OR_NAN_NOTATION)
            if notations > g(Measure.USED_AS_DATATYPE):
                problems.append(f"{group}: notation counts exceed UsedAsDatatype")
            if g(Measure.UNPRECISE_REPRESENTABLE_IN_FLOAT) > numeric:
                problems.append(f"{group}: UnpreciseRepresentableInFloat exceeds numeric notations")
            if g(Measure.UNPRECISE_REPRESENTABLE_IN_DOUBLE) > numeric:
                problems.append(f"{group}: UnpreciseRepresentableInDouble exceeds numeric notations")
            if g(Measure.UNPRECISE_REPRESENTABLE_IN_DOUBLE) > g(Measure.UNPRECISE_REPRESENTABLE_IN_FLOAT):
                problems.append(f"{group}: UnpreciseRepresentableInDouble exceeds ...InFloat")
        return problems


def aggregate(
    outcomes: Iterable[Union[Quad, FailureRecord]], source_label: str, config: CleaningConfig
) -> tuple[MeasureTable, list[FailureRecord]]:
    table = MeasureTable()
    failures: list[FailureRecord] = []
    for outcome in outcomes:
        if isinstance(outcome, FailureRecord):
            failures.append(outcome)
            continue
        for key, n in measure_quad(outcome, config, source_label):
            table.counts[key] += n
    return table, failures


def _writer(sink: IO[str]):
    return csv.writer(sink, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)


def write_measures_csv(t: MeasureTable, sink: IO[str]) -> None:
    try:
        w = _writer(sink)
        w.writerow(MEASURES_HEADER)
        for (src, f, p, d, m), n in t.sorted_items():
            if n:
                w.writerow([src, f, p, d, m.value, n])
    except OSError as exc:
        raise SinkFailure(str(exc)) from exc


def failure_sort_key(source: str, f: FailureRecord) -> tuple:
    return (source, f.source_file, f.line_number)


def write_failures_csv(failures: Iterable[FailureRecord], sink: IO[str], source_label: str = "") -> None:
    try:
        w = _writer(sink)
        w.writerow(FAILURES_HEADER)
        for f in sorted(failures, key=lambda f: failure_sort_key(source_label, f)):
            w.writerow([source_label, f.source_file, f.line_number, f.reason.value, f.snippet])
    except OSError as exc:
        raise SinkFailure(str(exc)) from exc


def read_measures_csv(lines: Iterable[str]) -> MeasureTable:
    """Load a measures CSV, rejecting anything outside the exact schema."""
    by_name = {m.value: m for m in Measure}
    reader: Iterator[list[str]] = csv.reader(lines)
    table = MeasureTable()
    header = next(reader, None)
    if header != MEASURES_HEADER:
        raise MalformedMeasuresCsv(1, f"expected header {','.join(MEASURES_HEADER)}")
    for row in reader:
        line = reader.line_num  # type: ignore[attr-defined]
        if len(row) != len(MEASURES_HEADER):
            raise MalformedMeasuresCsv(line, f"expected 6 fields, got {len(row)}")
        src, f, p, d, m, n = row
        if m not in by_name:
            raise MalformedMeasuresCsv(line, f"unknown measure {m!r}")
        if not n.isdigit():
            raise MalformedMeasuresCsv(line, f"count is not a non-negative integer: {n!r}")
        table.add((src, f, p, d, by_name[m]), int(n))
    return table


def load_prefix_map(lines: Iterable[str]) -> dict[str, str]:
    """Read a ``prefix,namespace`` CSV (header row required)."""
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != ["prefix", "namespace"]:
        raise MalformedPrefixMap("prefix map must start with the header 'prefix,namespace'")
    mapping = {}
    for row in reader:
        if not row:
            continue
        if len(row) != 2:
            raise MalformedPrefixMap(f"line {reader.line_num}: expected 2 fields")
        label, ns = (x.strip() for x in row)
        if ":" not in ns or not ns.endswith(("/", "#")):
            raise MalformedPrefixMap(f"line {reader.line_num}: namespace must end in '/' or '#'")
        mapping[label.rstrip(":")] = ns
    return mapping
