"""Smoke run over one slice of a large N-Quads dump (e.g. a Web Data Commons part file).

    python3 scripts/wdc_smoke.py part-00000.gz [more slices...] [--out DIR]

Scans the slices, then checks only that the outputs are well formed and that
every (source, file, property, datatype) group satisfies the measure
inequalities.  It never compares absolute counts; those depend on the slice.
Exit status 0 means the run is structurally sound.
"""
import argparse
import csv
import sys
import tempfile
from pathlib import Path

from rdf_numeric_lint.cli import main as lint_main
from rdf_numeric_lint.nquads import FailureReason
from rdf_numeric_lint.survey import FAILURES_HEADER, MalformedMeasuresCsv, read_measures_csv


def validate(out_dir: Path) -> list[str]:
    problems = []
    try:
        with open(out_dir / "measures.csv", newline="", encoding="utf-8") as fh:
            table = read_measures_csv(fh)
    except MalformedMeasuresCsv as exc:
        return [f"measures.csv line {exc.line}: {exc}"]
    problems += table.invariant_violations()

    reasons = {r.value for r in FailureReason}
    with open(out_dir / "failures.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != list(FAILURES_HEADER):
        problems.append("failures.csv: bad header")
    for n, row in enumerate(rows[1:], 2):
        if len(row) != len(FAILURES_HEADER):
            problems.append(f"failures.csv line {n}: expected {len(FAILURES_HEADER)} fields")
        elif not row[2].isdigit() or row[3] not in reasons:
            problems.append(f"failures.csv line {n}: bad line number or reason")
    return problems


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("inputs", nargs="+")
    ap.add_argument("--source", default="wdc")
    ap.add_argument("--out", type=Path)
    ap.add_argument("-j", "--jobs", default="1")
    args = ap.parse_args(argv)

    with tempfile.TemporaryDirectory() as tmp:
        out_dir = args.out or Path(tmp)
        code = lint_main(["scan", *args.inputs, "--source", args.source, "-o", str(out_dir), "-j", args.jobs])
        if code not in (0, 1):
            print(f"scan failed with exit code {code}", file=sys.stderr)
            return code
        problems = validate(out_dir)
    for p in problems:
        print(p, file=sys.stderr)
    print("ok" if not problems else f"{len(problems)} problem(s)")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
