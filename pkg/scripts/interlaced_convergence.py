"""Relative error of the interlaced estimate along (1, l), as CSV."""
import argparse
import sys

from logacsv.pipeline import AnalysisRequest, emit, run
from logacsv.polysys import Direction


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell", type=int, default=1)
    ap.add_argument("--r", type=int, nargs="+", default=[10, 25, 50, 100, 200, 400])
    args = ap.parse_args()
    rep = run(AnalysisRequest(example="interlaced", direction=Direction(1, args.ell),
                              targets=[(r, args.ell * r) for r in args.r], oracle=True))
    if not rep.ok:
        sys.exit(f"analysis failed: {rep.diagnostic}")
    sys.stdout.write(emit(rep, "csv"))


if __name__ == "__main__":
    main()
