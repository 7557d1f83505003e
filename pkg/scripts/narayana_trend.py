"""Oracle coefficients of log N(z, t) along (2, 1) divided by the read-off formula
(1/(2 pi)) n^-2 2^(4n-1); prints n, ratio, |ratio - 1| as CSV."""
import argparse
import csv
import sys

import mpmath

from logacsv.backend import ExactRational
from logacsv.oracle import narayana_log_spec


def stated(n):
    return mpmath.mpf(2) ** (4 * n - 1) / (2 * mpmath.pi * n**2)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[10, 20, 30, 40, 50, 60])
    args = ap.parse_args()
    top = max(args.n)
    T = narayana_log_spec(1, 2 * top, top, ExactRational())
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "ratio", "gap"])
    with mpmath.workprec(256):
        for n in args.n:
            v = T[2 * n, n]
            ratio = mpmath.mpf(v.numerator) / v.denominator / stated(n)
            w.writerow([n, mpmath.nstr(ratio, 12), mpmath.nstr(abs(ratio - 1), 6)])


if __name__ == "__main__":
    main()
