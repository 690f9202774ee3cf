#!/usr/bin/env python3
"""Certify a spread of scalar functions and print a verdict table.

Shows the grid verdict next to the randomized quadratic-form minimum, so
certified and refuted cases can be compared at a glance.
"""

import argparse

from detconvex.certifier import GridSpec, certify, sample_convexity
from detconvex.scalarfun import FamilyA, NeoHookeVolumetric, PowerLaw, parse

CASES = [
    ("-ln(s)", parse("-ln(s)")),
    ("s", parse("s")),
    ("-s", parse("-s")),
    ("-sqrt(s)", parse("-sqrt(s)")),
    ("s^(1/3) (increasing)", parse("s^(1/3)")),
    ("neo-hooke mu=2", NeoHookeVolumetric(mu=2.0)),
    ("family a=0", FamilyA(a=0.0, c=-1.0, d=0.0, n=3)),
    ("family a=2", FamilyA(a=2.0, c=-1.0, d=0.0, n=3)),
    ("power p=0.5 c=-1", PowerLaw(c=-1.0, p=0.5, d=0.0)),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--samples", type=int, default=300)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    grid = GridSpec(1e-3, 1e3, 500)
    print(f"{'function':<24} {'verdict':<16} {'witness':<20} {'min D2g over samples'}")
    for label, f in CASES:
        if isinstance(f, FamilyA) and f.n != args.dim:
            f = FamilyA(a=f.a, c=f.c, d=f.d, n=args.dim)
        rep = certify(f, args.dim, grid)
        kinds = ",".join(w.kind for w in rep.witnesses) or "-"
        diag = sample_convexity(f, args.dim, args.samples, args.seed)
        print(f"{label:<24} {rep.verdict:<16} {kinds:<20} {diag.min_hess_form:+.3e}")


if __name__ == "__main__":
    main()
