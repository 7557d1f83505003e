"""Command-line front end: ``logacsv analyze ...``."""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .backend import DEFAULT_PRECISION_BITS
from .errors import ParseError
from .pipeline import EXAMPLES, AnalysisRequest, emit, parse_spec, run
from .polysys import Direction


def _targets(text: str) -> list[tuple[int, int]]:
    out = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        r, sep, s = item.partition(":")
        try:
            out.append((int(r), int(s) if sep else 0))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad target {item!r}; expected R:S") from None
    if not out:
        raise argparse.ArgumentTypeError("no targets given")
    return out


def _box(text: str) -> tuple[int, int]:
    try:
        rx, sy = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad box {text!r}; expected RX,SY") from None
    return rx, sy


def _direction(text: str) -> Direction:
    try:
        return Direction.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="logacsv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="estimate coefficients of a generating function")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", metavar="FILE", help="JSON generating-function spec")
    src.add_argument("--example", choices=EXAMPLES, help="built-in example")
    a.add_argument("--ell", type=Fraction, help="example parameter (sets the default direction)")
    a.add_argument("--m", type=int, default=2, help="power of the log for catalan-log")
    a.add_argument("--rpower", type=int, default=1, help="power of the log for narayana-log")
    a.add_argument("--kmax", type=int, default=5,
                   help="necklace terms k <= KMAX enter the critical-point analysis")
    a.add_argument("--direction", type=_direction, metavar="R1/R2")
    a.add_argument("--targets", type=_targets, required=True, metavar="r1:s1,r2:s2,...")
    a.add_argument("--oracle", action="store_true", help="compare with exact coefficients")
    a.add_argument("--oracle-box", type=_box, metavar="RX,SY")
    a.add_argument("--precision", type=int, default=DEFAULT_PRECISION_BITS, metavar="BITS")
    a.add_argument("--grid", type=int, default=64, metavar="N", help="minimality grid size")
    a.add_argument("--format", choices=("table", "json", "csv"), default="table")
    a.add_argument("--out", metavar="FILE")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = parse_spec(args.spec) if args.spec else None
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if spec is not None and args.direction is None:
        print("error: --direction is required with --spec", file=sys.stderr)
        return 2
    try:
        req = AnalysisRequest(spec=spec, example=args.example, direction=args.direction,
                              targets=args.targets, oracle=args.oracle, oracle_box=args.oracle_box,
                              precision_bits=args.precision, minimality_grid=args.grid,
                              ell=args.ell, m=args.m, rpower=args.rpower, kmax=args.kmax)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run(req)
    text = emit(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not report.ok:
        d = report.diagnostic
        print(f"analysis failed at stage '{d['stage']}': {d['error']}: {d['message']}",
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
