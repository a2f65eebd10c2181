"""Newton inversion against the explicit isospectral step, scanning N and the guard modes.

The target is the flat spectral data with nu_3 raised by 0.7; the exact
answer is the Darboux transform of (0, 0).

Usage: python3 scripts/darboux_oracle_scan.py [--sizes 30 60] [--guards 5 20 40]
"""

import argparse
import time

import numpy as np

from slspec import inverse as I
from slspec import spectrum as S
from slspec.darboux import DarbouxStep, darboux_transform
from slspec.errors import NoConvergence
from slspec.potential import Potential, l2_norm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[30, 60])
    ap.add_argument("--guards", type=int, nargs="+", default=[5, 20, 40])
    ap.add_argument("--index", type=int, default=3)
    ap.add_argument("--t", type=float, default=0.7)
    args = ap.parse_args()

    flat = Potential.zero()
    qt, bt = darboux_transform(flat, 0.0, DarbouxStep(args.index, args.t))
    print(f"exact endpoint: ||q_t|| = {l2_norm(qt):.3f}, b_t = {bt:.6f}")
    print(f"{'N':>4} {'guard':>6} {'L2xR error':>12} {'iters':>6} {'time':>7}")
    for N in args.sizes:
        data = S.spectral_data(flat, 0.0, N)
        dnu = data.dnu.copy()
        dnu[args.index] += args.t
        target = data.replace(dnu=dnu)
        for g in args.guards:
            t0 = time.perf_counter()
            try:
                q, b, diag = I.newton_invert(target, opts=I.NewtonOptions(guard_modes=g))
                err, it = float(np.hypot(l2_norm(q - qt), b - bt)), diag.iterations
            except NoConvergence as exc:
                err, it = float("nan"), exc.diagnostics.get("iterations", -1)
            print(f"{N:4d} {g:6d} {err:12.3e} {it:6d} {time.perf_counter() - t0:6.1f}s")


if __name__ == "__main__":
    main()
