"""rdf-numeric-lint command line: check, scan, report."""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import IO, Optional, Sequence

from .exactness import FORMATS, NotationClass, distortion_report, display_value
from .nquads import StreamAborted, scan_stream
from .report import render_report, report
from .survey import (
    CleaningConfig,
    MalformedMeasuresCsv,
    MalformedPrefixMap,
    MeasureTable,
    aggregate,
    load_prefix_map,
    read_measures_csv,
    write_failures_csv,
    write_measures_csv,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_DISTORTED = 3
EXIT_USAGE = 64
EXIT_DATA = 65

JOBS_ENV = "RDF_NUMERIC_LINT_JOBS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def default_jobs() -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rdf-numeric-lint", description="Detect numeric RDF literals distorted by binary floating point datatypes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="show how lexical forms map into binary32/binary64")
    c.add_argument("lexicals", nargs="+", metavar="LEXICAL")
    c.add_argument("--format", choices=sorted(FORMATS), default="binary32")
    c.add_argument("--json", action="store_true", help="one JSON object per lexical instead of text")

    s = sub.add_parser("scan", help="measure datatype usage in N-Triples/N-Quads files")
    s.add_argument("inputs", nargs="+", metavar="INPUT", help="files (plain or gzip) or '-' for stdin")
    s.add_argument("--source", dest="source_label", default="", help="source label recorded in every row")
    s.add_argument("--prefix-map", dest="prefix_map_path", type=Path)
    s.add_argument("--no-unify-scheme", dest="unify_scheme", action="store_false")
    s.add_argument("--range-includes", action="store_true", help="also count schema:rangeIncludes statements")
    s.add_argument("-j", "--jobs", type=_positive_int, default=None)
    s.add_argument("-o", "--output-dir", type=Path, default=Path("."))

    r = sub.add_parser("report", help="render summary tables from a measures CSV")
    r.add_argument("measures_csv", type=Path)
    r.add_argument("--top", dest="top_n", type=_positive_int, default=10)
    return p


def _check_fields(rep) -> dict:
    return {
        "lexical": rep.lexical,
        "format": rep.format.name,
        "notation": rep.notation.value,
        "parsed": None if rep.parsed is None else str(rep.parsed),
        "mapped": None if rep.mapped is None else display_value(rep.mapped),
        "mapped_exact": None if rep.mapped_exact is None else str(rep.mapped_exact),
        "distorted": rep.distorted,
        "absolute_error": None if rep.absolute_error is None else str(rep.absolute_error),
    }


def cmd_check(args, out: IO[str]) -> int:
    fmt = FORMATS[args.format]
    status = EXIT_OK
    blocks = []
    for lexical in args.lexicals:
        rep = distortion_report(lexical, fmt)
        fields = _check_fields(rep)
        if rep.notation is NotationClass.INVALID:
            status = EXIT_INVALID
        elif rep.distorted and status == EXIT_OK:
            status = EXIT_DISTORTED
        if args.json:
            blocks.append(json.dumps(fields))
        else:
            lines = []
            for key, value in fields.items():
                if isinstance(value, bool):
                    value = str(value).lower()
                lines.append(f"{key}: {'-' if value is None else value}")
            blocks.append("\n".join(lines))
    out.write(("\n" if args.json else "\n\n").join(blocks) + "\n")
    return status


def _scan_one(path: str, source_label: str, config: CleaningConfig):
    name = "<stdin>" if path == "-" else os.path.basename(path)
    try:
        if path == "-":
            return (*aggregate(scan_stream(sys.stdin.buffer, name), source_label, config), None)
        with open(path, "rb") as fh:
            return (*aggregate(scan_stream(fh, name), source_label, config), None)
    except (OSError, StreamAborted) as exc:
        return MeasureTable(), [], f"{path}: {exc}"


def _atomic_write(path: Path, write) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_scan(args, err: IO[str]) -> int:
    prefix_map = {}
    if args.prefix_map_path is not None:
        try:
            with open(args.prefix_map_path, encoding="utf-8", newline="") as fh:
                prefix_map = load_prefix_map(fh)
        except (OSError, MalformedPrefixMap) as exc:
            err.write(f"rdf-numeric-lint: prefix map: {exc}\n")
            return EXIT_USAGE
    config = CleaningConfig(
        unify_scheme=args.unify_scheme,
        prefix_map=prefix_map,
        apply_prefix_expansion=bool(prefix_map),
        count_range_includes=args.range_includes,
    )
    jobs = args.jobs or default_jobs()
    files = [p for p in args.inputs if p != "-"]
    results = []
    if "-" in args.inputs:
        results.append(_scan_one("-", args.source_label, config))
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(files))) as pool:
            futures = [pool.submit(_scan_one, p, args.source_label, config) for p in files]
            results += [f.result() for f in futures]
    else:
        results += [_scan_one(p, args.source_label, config) for p in files]

    table = MeasureTable()
    failures = []
    status = EXIT_OK
    for part, fails, error in results:
        if error:
            err.write(f"rdf-numeric-lint: {error}\n")
            status = EXIT_IO
        table = table.merge(part)
        failures += fails
    try:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        _atomic_write(args.output_dir / "measures.csv", lambda fh: write_measures_csv(table, fh))
        _atomic_write(args.output_dir / "failures.csv",
                      lambda fh: write_failures_csv(failures, fh, args.source_label))
    except OSError as exc:
        err.write(f"rdf-numeric-lint: cannot write results: {exc}\n")
        return EXIT_IO
    return status


def cmd_report(args, out: IO[str], err: IO[str]) -> int:
    try:
        with open(args.measures_csv, encoding="utf-8", newline="") as fh:
            table = read_measures_csv(fh)
    except OSError as exc:
        err.write(f"rdf-numeric-lint: {exc}\n")
        return EXIT_IO
    except (MalformedMeasuresCsv, UnicodeDecodeError) as exc:
        err.write(f"rdf-numeric-lint: {args.measures_csv}: {exc}\n")
        return EXIT_DATA
    out.write(render_report(report(table, top_n=args.top_n)))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args, sys.stdout)
    if args.command == "scan":
        return cmd_scan(args, sys.stderr)
    return cmd_report(args, sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
