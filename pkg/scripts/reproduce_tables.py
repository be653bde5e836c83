#!/usr/bin/env python3
"""Print the Scheme A / Scheme B comparison rows as CSV for several m.

Usage: python3 scripts/reproduce_tables.py [--m 1 2 3] [--out-dir DIR]
"""

import argparse
import sys
from pathlib import Path

from pdakit import bench


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--out-dir", type=Path, help="write table3_m<M>.csv / table4_m<M>.csv here")
    a = ap.parse_args()
    for table in (3, 4):
        for m in a.m:
            text = bench.render_compare(bench.compare_table(table, m))
            if a.out_dir:
                a.out_dir.mkdir(parents=True, exist_ok=True)
                (a.out_dir / f"table{table}_m{m}.csv").write_text(text)
            else:
                sys.stdout.write(f"# table {table}, m={m}\n{text}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
