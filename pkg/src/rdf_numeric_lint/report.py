"""Summary tables over a MeasureTable, shaped like the usual survey tables."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .nquads import XSD
from .survey import Measure, MeasureTable

SCHEMA = "http://schema.org/"

DISPLAY_PREFIXES = {
    "dcterms": "http://purl.org/dc/terms/",
    "dv": "http://rdf.data-vocabulary.org/#",
    "gr": "http://purl.org/goodrelations/v1#",
    "rev": "http://purl.org/stuff/rev#",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "schema": SCHEMA,
    "sioc": "http://rdfs.org/sioc/ns#",
    "use": "http://search.yahoo.com/searchmonkey-datatype/use/",
    "vcard": "http://www.w3.org/2006/vcard/ns#",
    "xsd": XSD,
}

_XSD_NUMERIC = (
    "decimal float double integer long int short byte nonNegativeInteger positiveInteger "
    "unsignedLong unsignedInt unsignedShort unsignedByte nonPositiveInteger negativeInteger"
).split()
NUMERIC_DATATYPES = frozenset(
    [XSD + n for n in _XSD_NUMERIC] + [SCHEMA + n for n in ("Number", "Integer", "Float")]
)
SELECTED_DATATYPES = (
    XSD + "decimal", XSD + "double", XSD + "float",
    SCHEMA + "Number", SCHEMA + "Integer", SCHEMA + "Float",
)
DEFAULT_CHOSEN = (XSD + "float", XSD + "double")


@dataclass
class ReportTable:
    title: str
    columns: Sequence[str]
    rows: list[tuple[str, ...]] = field(default_factory=list)
    extra_rows: list[tuple[str, ...]] = field(default_factory=list)


def abbreviate(iri: str) -> str:
    for label, ns in DISPLAY_PREFIXES.items():
        if iri.startswith(ns) and len(iri) > len(ns):
            return f"{label}:{iri[len(ns):]}"
    return iri


def share(n: int, total: int) -> str:
    return f"{n} ({(n / total if total else 0.0):.2f})"


def _top(counter: Counter, n: int) -> list[tuple[str, int]]:
    return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:n]


def _sum_by(t: MeasureTable, measure: Measure, key) -> dict[str, Counter]:
    out: dict[str, Counter] = {}
    for (src, _f, p, d, m), n in t.counts.items():
        if m is measure:
            out.setdefault(src, Counter())[key(p, d)] += n
    return out


def report(
    t: MeasureTable, top_n: int = 10, chosen_datatypes: Iterable[str] = DEFAULT_CHOSEN
) -> list[ReportTable]:
    by_datatype = _sum_by(t, Measure.USED_AS_DATATYPE, lambda p, d: d)
    sources = sorted({key[0] for key in t.counts}) or [None]
    tables: list[ReportTable] = []

    for src in sources:
        label = f" [{src}]" if src else ""
        dt = by_datatype.get(src, Counter()) if src is not None else Counter()
        total = sum(dt.values())
        tab = ReportTable(f"Table 1: datatype occurrences{label}", ("Datatype", "Occurrences (rel)"))
        top = _top(dt, top_n)
        tab.rows = [(abbreviate(d), share(n, total)) for d, n in top]
        shown = {d for d, _ in top}
        tab.extra_rows = [(abbreviate(d), share(dt.get(d, 0), total))
                          for d in SELECTED_DATATYPES if d not in shown]
        tables.append(tab)

    numeric_props: dict[str, Counter] = {}
    for (src, _f, p, d, m), n in t.counts.items():
        if m is Measure.USED_AS_DATATYPE and d in NUMERIC_DATATYPES:
            numeric_props.setdefault(src, Counter())[p] += n
    for src in sources:
        label = f" [{src}]" if src else ""
        props = numeric_props.get(src, Counter())
        total = sum(props.values())
        tab = ReportTable(f"Table 2: properties with numeric datatypes{label}", ("Property", "Occurrences (rel)"))
        tab.rows = [(abbreviate(p), share(n, total)) for p, n in _top(props, top_n)]
        tables.append(tab)

    chosen = list(chosen_datatypes)
    per_pair = _sum_by(t, Measure.USED_AS_DATATYPE, lambda p, d: (p, d))
    for src in sources:
        pairs = per_pair.get(src, Counter())
        present = [d for d in chosen if any(dd == d for (_p, dd) in pairs)]
        if src is None or not present:
            label = f" [{src}]" if src else ""
            tables.append(ReportTable(f"Table 3: properties per datatype{label}", ("Property", "Occurrences (rel)")))
            continue
        for d in present:
            props = Counter({p: n for (p, dd), n in pairs.items() if dd == d})
            total = sum(props.values())
            tab = ReportTable(f"Table 3: properties with {abbreviate(d)} [{src}]", ("Property", "Occurrences (rel)"))
            tab.rows = [(abbreviate(p), share(n, total)) for p, n in _top(props, top_n)]
            tables.append(tab)

    per_dt: dict[tuple[str, str], Counter] = {}
    for (src, _f, _p, d, m), n in t.counts.items():
        if d in NUMERIC_DATATYPES:
            per_dt.setdefault((src, d), Counter())[m] += n

    notation_cols = (
        Measure.VALID_INTEGER_NOTATION, Measure.VALID_DECIMAL_NOTATION,
        Measure.VALID_EXPONENTIAL_NOTATION, Measure.VALID_INF_OR_NAN_NOTATION,
    )
    unprecise_cols = (Measure.UNPRECISE_REPRESENTABLE_IN_FLOAT, Measure.UNPRECISE_REPRESENTABLE_IN_DOUBLE)
    for number, title, cols, names in (
        (4, "numeric notations per datatype", notation_cols, ("Integer", "Decimal", "Exponential", "Inf / NaN")),
        (5, "lexicals without exact representation", unprecise_cols, ("Unprecise in xsd:float", "Unprecise in xsd:double")),
    ):
        for src in sources:
            label = f" [{src}]" if src else ""
            tab = ReportTable(f"Table {number}: {title}{label}", ("Datatype", *names))
            for (s, d), c in sorted(per_dt.items(), key=lambda kv: abbreviate(kv[0][1])):
                if s != src or not c.get(Measure.USED_AS_DATATYPE):
                    continue
                used = c[Measure.USED_AS_DATATYPE]
                tab.rows.append((abbreviate(d), *(share(c.get(m, 0), used) for m in cols)))
            tables.append(tab)
    return tables


def _render_table(tab: ReportTable) -> list[str]:
    body = list(tab.rows) + list(tab.extra_rows)
    widths = [len(c) for c in tab.columns]
    for row in body:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]

    def fmt(row: Sequence[str]) -> str:
        cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        return "  ".join(cells).rstrip()

    rule = "  ".join("-" * w for w in widths)
    out = [tab.title, fmt(tab.columns), rule]
    out += [fmt(r) for r in tab.rows]
    if tab.extra_rows:
        out.append(rule)
        out += [fmt(r) for r in tab.extra_rows]
    if not body:
        out.append("(no data)")
    return out


def render_report(tables: Iterable[ReportTable]) -> str:
    blocks = ["\n".join(_render_table(t)) for t in tables]
    return "\n\n".join(blocks) + "\n"
