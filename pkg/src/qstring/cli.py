"""Command-line harness: ``verify`` runs a suite, ``table`` exports string functions."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import cache
from .errors import InvalidLabel, QSeriesError, UnknownSuite
from .stringfn import Level, check_label, curly_C
from .suites import SUITES, InvalidParams, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TABLE_COLUMNS = ["p", "pprime", "m", "ell", "n", "coefficient"]


def _rational(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def stringfn_rows(p: int, pprime: int, ell: int, ms: Sequence[int], order: int) -> List[list]:
    """Rows ``(p, p', m, ell, n, coefficient)`` of curly C below ``order``, sorted."""
    lv = Level(p, pprime)
    for m in ms:
        check_label(lv, m, ell)
    rows = []
    for m in sorted(set(ms)):
        series = curly_C(lv, m, ell, order)
        for n in range(0, order):
            rows.append([p, pprime, m, ell, n, _rational(series.coefficient(n))])
    return rows


def export_stringfn_table(p: int, pprime: int, ell: int, ms: Sequence[int], order: int,
                          fmt: str = "json", out=None) -> str:
    """Render the table as JSON or CSV; write it to ``out`` when given."""
    rows = stringfn_rows(p, pprime, ell, ms, order)
    if fmt == "json":
        text = json.dumps({"columns": TABLE_COLUMNS, "rows": rows}, indent=1) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TABLE_COLUMNS)
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out is not None:
        Path(out).write_text(text)
    return text


def _parse_ms(text: str) -> List[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qstring", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, help="one of: " + ", ".join(SUITES))
    v.add_argument("--order", type=int, help="truncation order (suite default if omitted)")
    v.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    v.add_argument("--params", help="JSON object overriding suite parameter axes")
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--cache", help=f"series cache directory (default ${cache.ENV_VAR})")
    v.add_argument("--jobs", type=int, default=1, help="worker processes")
    v.add_argument("--quiet", action="store_true", help="print only the summary line")

    t = sub.add_parser("table", help="export string-function coefficients")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--pprime", type=int, required=True)
    t.add_argument("--ell", type=int, required=True)
    t.add_argument("--m", type=_parse_ms, default=[], help="comma-separated m values")
    t.add_argument("--order", type=int, default=50)
    t.add_argument("--format", choices=("json", "csv"), default="json")
    t.add_argument("--out", help="output file (stdout if omitted)")

    sub.add_parser("list", help="list suites and their default orders")
    return parser


def _cmd_verify(args) -> int:
    try:
        params = json.loads(args.params) if args.params else None
        if params is not None and not isinstance(params, dict):
            raise InvalidParams("--params must be a JSON object")
        report = run_suite(args.suite, args.order, args.seed, params, args.report,
                           args.cache, args.jobs)
    except (json.JSONDecodeError, InvalidParams, UnknownSuite) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    counts = report.counts()
    if not args.quiet:
        for case in report.cases:
            if case.status != "pass":
                print(json.dumps(case.to_json()))
    rej = sum(report.rejections.values())
    print(f"{report.suite} order={report.order} seed={report.seed} "
          + " ".join(f"{k}={v}" for k, v in counts.items())
          + f" rejected={rej} elapsed={report.elapsed:.1f}s")
    return report.exit_code


def _cmd_table(args) -> int:
    if args.order < 0:
        print("error: order must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        text = export_stringfn_table(args.p, args.pprime, args.ell, args.m, args.order,
                                     args.format, args.out)
    except (InvalidLabel, QSeriesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_list(args) -> int:
    for s in SUITES.values():
        print(f"{s.name:22s} order={s.default_order:<4d} {s.description}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return {"verify": _cmd_verify, "table": _cmd_table, "list": _cmd_list}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
