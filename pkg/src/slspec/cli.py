"""Command-line front end: ``slspec {forward,identity,darboux,invert}``.

Exit codes: 0 success, 2 bad input, 3 solver failure, 4 Newton did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import general_bc, inverse, spectrum
from .darboux import DarbouxStep, darboux_transform
from .errors import InterlacingViolation, NoConvergence, PotentialFormatError, SpectralError
from .potential import DEFAULT_GRID, Potential, read_csv, write_csv

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_NOCONV = 0, 2, 3, 4


class InputError(Exception):
    """Malformed or inconsistent user input."""


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("SLSPEC_THREADS", "1")))
    except ValueError:
        return 1


def _parse_a(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "dirichlet"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--a expects a number or 'inf', got {text!r}") from None


def _load_potential(path) -> Potential:
    try:
        return read_csv(path)
    except PotentialFormatError as exc:
        raise InputError(str(exc)) from exc


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


# --------------------------------------------------------------------------


def cmd_forward(args) -> int:
    q = _load_potential(args.potential)
    if math.isinf(args.a):
        recs = spectrum.eigenvalues(q, args.b, args.n, threads=args.threads)
        data = spectrum.spectral_data(q, args.b, args.n, records=recs)
        rows = [(r.n, r.lam, r.nu) for r in recs]
        names = ("n", "lambda", "nu")
    else:
        recs = general_bc.general_eigen(q, args.a, args.b, args.n, threads=args.threads)
        data = general_bc.general_spectral_data(q, args.a, args.b, args.n, records=recs)
        rows = [(r.n, r.sigma, r.kappa) for r in recs]
        names = ("n", "sigma", "kappa")
    print(f"{names[0]:>5} {names[1]:>24} {names[2]:>24}")
    for n, lam, nu in rows:
        print(f"{n:5d} {lam:24.15g} {nu:24.15g}")
    if args.out:
        data.save(args.out)
        print(f"wrote {args.out}")
    if args.plot:
        tidy = [(n, names[1], _fmt(lam)) for n, lam, _ in rows] + [(n, names[2], _fmt(nu)) for n, _, nu in rows]
        _write_rows(args.plot, ("n", "quantity", "value"), tidy)
    return EXIT_OK


def cmd_identity(args) -> int:
    q = _load_potential(args.potential)
    tidy = []
    if math.isinf(args.a):
        recs = spectrum.eigenvalues(q, args.b, args.n, threads=args.threads)
        res = spectrum.identity_residual(q, args.b, args.n, records=recs)
        terms = spectrum.identity_terms(recs)
        print(f"residual {res:.6e}")
        tidy += [(n, "plus", _fmt(t)) for n, t in enumerate(terms)]
    else:
        recs = general_bc.general_eigen(q, args.a, args.b, args.n, threads=args.threads)
        rp, rm = general_bc.general_identity_residuals(q, args.a, args.b, args.n, records=recs)
        kap = np.array([r.kappa for r in recs])
        wd = np.abs([r.wdot for r in recs])
        print(f"residual_plus {rp:.6e}")
        print(f"residual_minus {rm:.6e}")
        tidy += [(n, "plus", _fmt(2.0 - math.exp(k) / w)) for n, (k, w) in enumerate(zip(kap, wd))]
        tidy += [(n, "minus", _fmt(2.0 - math.exp(-k) / w)) for n, (k, w) in enumerate(zip(kap, wd))]
    if args.plot:
        _write_rows(args.plot, ("n", "identity", "term"), tidy)
    else:
        # short decay table: every term for small n, then sparser
        shown = sorted({n for n, _, _ in tidy if n < 10 or n % max(1, args.n // 10) == 0})
        print(f"{'n':>5} {'identity':>9} {'term':>14}")
        for n, kind, t in tidy:
            if n in shown:
                print(f"{n:5d} {kind:>9} {float(t):14.6e}")
    return EXIT_OK


def cmd_darboux(args) -> int:
    q = _load_potential(args.potential)
    try:
        step = DarbouxStep(args.index, args.t)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    qt, bt = darboux_transform(q, args.b, step)
    write_csv(qt, args.out)
    print(f"b {_fmt(bt)}")
    return EXIT_OK


def cmd_invert(args) -> int:
    try:
        data = spectrum.SpectralData.load(args.data)
    except InterlacingViolation as exc:
        raise InputError(f"InterlacingViolation: {exc}") from exc
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    if not data.mixed:
        raise InputError("invert handles data of the mixed problem (bc.a = inf) only")
    b0 = None
    if args.b_fixed is not None:
        mu0 = inverse.recover_mu0(args.b_fixed, data.c, data.mu[1:], data.dnu)
        print(f"recovered mu_0 {_fmt(mu0)} (stored {_fmt(data.mu[0])})")
        data = data.replace(mu=np.concatenate([[mu0], data.mu[1:]]))
        b0 = args.b_fixed
    opts = inverse.NewtonOptions(
        tol=args.tol, max_iter=args.max_iter, guard_modes=args.guard_modes, grid=args.grid, threads=args.threads
    )
    try:
        q, b, diag = inverse.newton_invert(data, b0=b0, opts=opts)
    except NoConvergence as exc:
        print(f"NoConvergence: {exc}", file=sys.stderr)
        print(json.dumps(exc.diagnostics), file=sys.stderr)
        return EXIT_NOCONV
    for i, r in enumerate(diag.residuals):
        print(f"iter {i:3d} residual {r:.6e}")
    write_csv(q, args.out)
    print(f"wrote {args.out}")
    if args.b_fixed is None:
        print(f"b {_fmt(b)}")
    else:
        print(f"b fixed at {_fmt(args.b_fixed)} (iterate drift {b - args.b_fixed:.3e})")
    if args.plot:
        _write_rows(args.plot, ("iteration", "residual"), [(i, _fmt(r)) for i, r in enumerate(diag.residuals)])
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slspec", description="Spectral data of -y'' + q y = lam y on [0, 1].")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, potential=True):
        if potential:
            sp.add_argument("--potential", required=True, help="CSV file with header x,q on an equispaced grid")
        sp.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads over eigenvalue index (default: $SLSPEC_THREADS or 1)")
        sp.add_argument("--plot", help="also write tidy CSV plot data to this path")

    f = sub.add_parser("forward", help="compute spectral data")
    common(f)
    f.add_argument("--b", type=float, required=True)
    f.add_argument("--a", type=_parse_a, default=math.inf, help="left boundary constant, or 'inf' for psi(0)=0")
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--out", help="SpectralData JSON output")
    f.set_defaults(func=cmd_forward)

    i = sub.add_parser("identity", help="check the trace identities")
    common(i)
    i.add_argument("--b", type=float, required=True)
    i.add_argument("--a", type=_parse_a, default=math.inf)
    i.add_argument("--n", type=int, required=True)
    i.set_defaults(func=cmd_identity)

    d = sub.add_parser("darboux", help="shift one norming constant isospectrally")
    common(d)
    d.add_argument("--b", type=float, required=True)
    d.add_argument("--index", type=int, required=True)
    d.add_argument("--t", type=float, required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_darboux)

    v = sub.add_parser("invert", help="reconstruct (q, b) from spectral data")
    common(v, potential=False)
    v.add_argument("--data", required=True)
    v.add_argument("--out", required=True)
    v.add_argument("--b-fixed", type=float, default=None, help="known b; mu_0 is then recomputed from the trace identity")
    v.add_argument("--max-iter", type=int, default=30)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--guard-modes", type=int, default=5)
    v.add_argument("--grid", type=int, default=DEFAULT_GRID)
    v.set_defaults(func=cmd_invert)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", 1) is not None and getattr(args, "n", 1) < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SpectralError as exc:
        print(f"solver error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OverflowError as exc:
        print(f"solver error (OverflowError): {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
