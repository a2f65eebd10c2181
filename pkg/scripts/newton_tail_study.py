"""Round-trip error of Newton inversion against N for the two tail models.

With ``zero`` the coordinates beyond N are set to zero; ``fit`` extends them
by fitted C/(n+1/2)^2 + D/(n+1/2)^4 laws and steers the iterate's tail.

Usage: python3 scripts/newton_tail_study.py [--sizes 10 20 40] [--b 0.2]
"""

import argparse
import time

import numpy as np

from slspec import inverse as I
from slspec import spectrum as S
from slspec.errors import NoConvergence
from slspec.potential import Potential, l2_norm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40])
    ap.add_argument("--b", type=float, default=0.2)
    ap.add_argument("--amplitude", type=float, default=0.3)
    args = ap.parse_args()

    qs = Potential.from_function(lambda x: args.amplitude * np.cos(np.pi * x))
    print(f"{'N':>4} {'model':>6} {'L2xR error':>12} {'iters':>6} {'time':>7}")
    for N in args.sizes:
        data = S.spectral_data(qs, args.b, N)
        for model, control in (("zero", False), ("fit", True)):
            opts = I.NewtonOptions(tail_model=model, tail_control=control)
            t0 = time.perf_counter()
            try:
                q, b, diag = I.newton_invert(data, opts=opts)
                err = float(np.hypot(l2_norm(q - qs), b - args.b))
                it = diag.iterations
            except NoConvergence as exc:
                err, it = float("nan"), exc.diagnostics.get("iterations", -1)
            print(f"{N:4d} {model:>6} {err:12.3e} {it:6d} {time.perf_counter() - t0:6.1f}s")


if __name__ == "__main__":
    main()
