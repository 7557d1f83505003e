"""Necklace coefficients [x^(ln) y^n] against the asymptotic estimate, as CSV."""
import argparse
import sys

from logacsv.pipeline import AnalysisRequest, emit, run
from logacsv.polysys import Direction


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell", type=int, default=3)
    ap.add_argument("--n", type=int, nargs="+", default=[15, 30, 45, 60, 75])
    args = ap.parse_args()
    req = AnalysisRequest(example="necklace", direction=Direction(args.ell, 1),
                          targets=[(args.ell * n, n) for n in args.n], oracle=True)
    rep = run(req)
    if not rep.ok:
        sys.exit(f"analysis failed: {rep.diagnostic}")
    sys.stdout.write(emit(rep, "csv"))


if __name__ == "__main__":
    main()
