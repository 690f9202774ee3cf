#!/usr/bin/env python3
"""Write the standard boundary-family curves as CSV tables.

The four standard members all pass through (1, 0) with slope -1; extra
members can be appended with repeated --a values (c=-1, d=0).
"""

import argparse
from pathlib import Path

from detconvex.cli import _slug
from detconvex.odelimit import export_family_curves
from detconvex.scalarfun import FamilyA


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="out/curves", type=Path)
    ap.add_argument("--s-min", type=float, default=0.05)
    ap.add_argument("--s-max", type=float, default=8.0)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument(
        "--a", type=float, action="append", default=[], help="extra family member exponents"
    )
    args = ap.parse_args()

    extras = [FamilyA(a=a, c=-1.0, d=0.0, n=3) for a in args.a]
    curves = export_family_curves(extras, (args.s_min, args.s_max), args.count)
    args.outdir.mkdir(parents=True, exist_ok=True)
    for i, curve in enumerate(curves):
        path = args.outdir / f"curve{i:02d}_{_slug(curve.label)}.csv"
        path.write_text(curve.to_csv())
        print(f"wrote {path} ({len(curve.xs)} rows)")


if __name__ == "__main__":
    main()
