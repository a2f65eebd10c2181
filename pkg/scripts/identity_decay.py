"""Decay of the trace-identity terms and of the residual with the truncation N.

Usage: python3 scripts/identity_decay.py [--b 0.7] [--n-max 400] [--csv out.csv]
"""

import argparse
import csv

import numpy as np

from slspec import spectrum as S
from slspec.potential import Potential

POTENTIALS = {
    "cos(pi x)": lambda x: np.cos(np.pi * x),
    "0.5cos(2pi x)": lambda x: 0.5 * np.cos(2 * np.pi * x),
    "1+sin(3pi x)+x^2": lambda x: 1 + np.sin(3 * np.pi * x) + x**2,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=float, default=0.7)
    ap.add_argument("--n-max", type=int, default=400)
    ap.add_argument("--csv")
    args = ap.parse_args()

    rows = []
    print(f"{'potential':>18} {'N':>5} {'raw residual':>14} {'with tail':>14} {'term slope':>10}")
    for name, f in POTENTIALS.items():
        q = Potential.from_function(f)
        recs = S.eigenvalues(q, args.b, args.n_max)
        terms = S.identity_terms(recs)
        half = args.n_max // 2
        slope = np.polyfit(np.log(np.arange(half, args.n_max) + 0.5), np.log(np.abs(terms[half:])), 1)[0]
        for N in sorted({n for n in (25, 50, 100, 200) if n < args.n_max} | {args.n_max}):
            raw = args.b - terms[:N].sum()
            fitted = S.identity_residual(q, args.b, N, records=recs[:N])
            print(f"{name:>18} {N:5d} {raw:14.3e} {fitted:14.3e} {slope:10.3f}")
            rows.append((name, N, raw, fitted, slope))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("potential", "N", "raw_residual", "tail_residual", "term_slope"))
            w.writerows(rows)


if __name__ == "__main__":
    main()
