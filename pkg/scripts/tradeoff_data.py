#!/usr/bin/env python3
"""Load and log2(F) versus memory ratio for K users, as CSV.

By default K = 7843 = 11 * 23 * 31 and the ratios are every z/q in lowest
terms with q in {11, 23, 31}, plus the two endpoints 0 and 1. Rows that
Scheme C cannot serve are listed on stderr.

Usage: python3 scripts/tradeoff_data.py [--users K] [--q 11 23 31] [-o FILE]
"""

import argparse
import sys
from fractions import Fraction
from math import gcd

from pdakit.bench import tradeoff_table


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--users", type=int, default=7843)
    ap.add_argument("--q", type=int, nargs="+", default=[11, 23, 31])
    ap.add_argument("-o", "--output")
    a = ap.parse_args()
    ratios = {Fraction(0), Fraction(1)}
    ratios |= {Fraction(z, q) for q in a.q for z in range(1, q) if gcd(z, q) == 1}
    res = tradeoff_table(a.users, sorted(ratios))
    text = res.to_csv()
    if a.output:
        with open(a.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for x, why in res.skipped:
        print(f"skipped {x}: {why}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
