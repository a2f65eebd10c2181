"""Observed finite-difference order of every gradient row against the perturbation size.

Central differences of the spectral coordinates along a fixed direction are
compared with the analytic pairings at two step sizes; the ratio gives the
order.  A larger direction scale lifts the O(h^2) error above round-off.

Usage: python3 scripts/gradient_fd_order.py [--scales 1 5 20] [--n 6]
"""

import argparse

import numpy as np

from slspec import frechet as F
from slspec import spectrum as S
from slspec.potential import Potential


def coordinates(q, b, N):
    recs = S.eigenvalues(q, b, N)
    d = S.spectral_data(q, b, N, records=recs)
    return np.concatenate([[d.c], d.mu, d.dnu, [r.lam for r in recs]])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scales", type=float, nargs="+", default=[1.0, 5.0, 20.0])
    ap.add_argument("--steps", type=float, nargs=2, default=[1e-3, 1e-4])
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--b", type=float, default=0.3)
    args = ap.parse_args()

    q = Potential.from_function(lambda x: np.cos(np.pi * x))
    rows = F.gradient_rows(q, args.b, args.n, with_lambda=True)
    labels = ["c"] + [f"mu{n}" for n in range(args.n)] + [f"nu{n}" for n in range(args.n)] + [
        f"lam{n}" for n in range(args.n)]
    for s in args.scales:
        p = Potential.from_function(lambda x: s * (np.sin(3 * np.pi * x) + x))
        bdir = 0.7 * s
        probe = F.GradientRow("probe", 0, p.samples, bdir, p.slopes)
        exact = np.array([F.pair(r, probe, q.h) for r in rows])
        errs = []
        for h in args.steps:
            plus = coordinates(q + p * h, args.b + h * bdir, args.n)
            minus = coordinates(q - p * h, args.b - h * bdir, args.n)
            errs.append(np.abs((plus - minus) / (2 * h) - exact))
        order = np.log(errs[0] / errs[1]) / np.log(args.steps[0] / args.steps[1])
        print(f"scale {s:g}: min order {np.min(order[1:]):.3f} (row {labels[1 + int(np.argmin(order[1:]))]}),"
              f" c-row error {errs[0][0]:.1e}")
        for lab, o, e in zip(labels, order, errs[1]):
            print(f"  {lab:>6} order {o:7.3f}  error at h={args.steps[1]:g}: {e:.2e}")


if __name__ == "__main__":
    main()
