"""[z^n] log^m of the Catalan generating function against m log^(m-1)2/(2 sqrt(pi)) n^(-3/2) 4^n."""
import argparse
import sys

from logacsv.pipeline import AnalysisRequest, emit, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--n", type=int, nargs="+", default=[50, 100, 250, 500, 1000])
    args = ap.parse_args()
    rep = run(AnalysisRequest(example="catalan-log", m=args.m,
                              targets=[(n, 0) for n in args.n], oracle=True))
    if not rep.ok:
        sys.exit(f"analysis failed: {rep.diagnostic}")
    sys.stdout.write(emit(rep, "csv"))


if __name__ == "__main__":
    main()
