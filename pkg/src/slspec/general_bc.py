"""Boundary conditions psi'(0) - a psi(0) = 0, psi'(1) + b psi(1) = 0.

The shooting solution is y = theta + a phi, the Wronskian is
w = y'(1) + b y(1), and the spectral coordinates are
sigma_n = pi^2 n^2 + Q0 + 2a + 2b + tau_n and kappa_n = log[(-1)^n y(1, sigma_n)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _hadamard
from .errors import InterlacingViolation, NoBracket, SignError
from .potential import Potential, mean
from .shooting import solve_forward
from .spectrum import SpectralData, _map, _Problem, tail_estimate


@dataclass(frozen=True)
class GeneralEigenRecord:
    n: int
    sigma: float
    kappa: float
    wdot: float
    tau: float


def _problem(q: Potential, a: float, b: float) -> _Problem:
    return _Problem(q=q, b=float(b), y0=1.0, yp0=float(a), offset=0.0, shift=mean(q) + 2.0 * a + 2.0 * b)


def general_wronskian(q: Potential, a: float, b: float, lam: float) -> tuple[float, float]:
    """w(lam) = (theta' + a phi' + b(theta + a phi))(1, lam) and its lam-derivative."""
    _, w, wd = _problem(q, a, b).end_values(solve_forward(q, lam, b=b))
    return float(w), float(wd)


def general_eigen(q: Potential, a: float, b: float, N: int, *, threads: int = 1) -> list[GeneralEigenRecord]:
    """Lowest N eigenvalues with their norming constants."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("a and b must be finite")
    prob = _problem(q, a, b)
    shift = prob.shift

    def one(n):
        sol, _, wd = prob.solve(n)
        y1, _, _ = prob.end_values(sol)
        s = (-1) ** n * y1
        if s <= 0.0:
            raise SignError(f"(-1)^n y(1) = {s:.3e} <= 0 at n={n}")
        sig = sol.lam
        return GeneralEigenRecord(n, float(sig), math.log(s), float(wd), float(sig - np.pi**2 * n * n - shift))

    return _map(one, range(N), threads)


def general_spectral_data(q: Potential, a: float, b: float, N: int, *, records=None, threads: int = 1) -> SpectralData:
    recs = records if records is not None else general_eigen(q, a, b, N, threads=threads)
    return SpectralData(
        c=mean(q) + 2.0 * a + 2.0 * b,
        mu=[r.tau for r in recs[:N]],
        dnu=[r.kappa for r in recs[:N]],
        b=b,
        a=a,
    )


def _identity_sums(kappa: np.ndarray, wdot: np.ndarray) -> tuple[float, float]:
    """-1 + sum (2 - e^{+-kappa_n}/|w'|) for both signs, each with its fitted tail."""
    out = []
    for sgn in (1.0, -1.0):
        t = 2.0 - np.exp(sgn * kappa) / np.abs(wdot)
        out.append(float(-1.0 + t.sum() + tail_estimate(t, offset=0.0)))
    return out[0], out[1]


def general_identity_residuals(q: Potential, a: float, b: float, N: int, *, records=None,
                               threads: int = 1) -> tuple[float, float]:
    """Residuals (b - S_plus, a - S_minus) of the two trace identities."""
    recs = records if records is not None else general_eigen(q, a, b, N, threads=threads)
    kap = np.array([r.kappa for r in recs])
    wd = np.array([r.wdot for r in recs])
    sp, sm = _identity_sums(kap, wd)
    return float(b - sp), float(a - sm)


# --------------------------------------------------------------------------
# recovery of the index-0 coordinates


class Tau0Functions:
    """F(tau_0) and G_+-(tau_0) for fixed c, tau_1.., kappa_1.. .

    F = 1/|W'(sigma_0)| and G_+- = -1 + sum_{n>=1} (e^{+-kappa_n}/|W'(sigma_n)| - 2),
    with W the Hadamard product of the general problem.  The admissible range
    is tau_0 < upper = pi^2 + tau_1 (the ordering sigma_0 < sigma_1).
    """

    def __init__(self, c: float, tau_rest, kappa_rest):
        self.c = float(c)
        self.tau_rest = np.asarray(tau_rest, dtype=float)
        self.kappa_rest = np.asarray(kappa_rest, dtype=float)
        if self.tau_rest.size == 0 or self.tau_rest.size != self.kappa_rest.size:
            raise ValueError("tau_rest and kappa_rest must be non-empty and of equal length")
        lam = np.pi**2 * np.arange(1, self.tau_rest.size + 1) ** 2 + self.tau_rest
        if np.any(np.diff(lam) <= 0.0):
            raise InterlacingViolation("tau_rest does not give increasing eigenvalues")
        self.upper = float(np.pi**2 + self.tau_rest[0])

    def __call__(self, tau0: float) -> tuple[float, float, float]:
        if not tau0 < self.upper:
            raise InterlacingViolation(f"tau_0 = {tau0:.12g} is not below {self.upper:.12g}")
        tau = np.concatenate([[tau0], self.tau_rest])
        wd = np.abs(_hadamard.derivative_at_roots(self.c, tau, 0.0))
        F = 1.0 / wd[0]
        G = []
        for sgn in (1.0, -1.0):
            t = np.exp(sgn * self.kappa_rest) / wd[1:] - 2.0
            G.append(float(-1.0 + t.sum() + tail_estimate(t, offset=0.0, start=1)))
        return float(F), G[0], G[1]

    def F(self, tau0: float) -> float:
        return self(tau0)[0]

    def G_plus(self, tau0: float) -> float:
        return self(tau0)[1]

    def G_minus(self, tau0: float) -> float:
        return self(tau0)[2]


def _lower_bracket(fn, start: float, width: float) -> float:
    """Move down from ``start`` until fn < 0."""
    lo = start - width
    for _ in range(60):
        if fn(lo) < 0.0:
            return lo
        width *= 2.0
        lo = start - width
    raise NoBracket("no sign change found below the admissible interval")


def _upper_bracket(fn, top: float, lo: float) -> float:
    """Approach ``top`` from below until fn > 0."""
    eps = 1e-3 * (top - lo)
    while eps > 1e-14 * max(1.0, abs(top)):
        hi = top - eps
        if fn(hi) > 0.0:
            return hi
        eps *= 0.1
    raise NoBracket("no sign change found below the eigenvalue coalescence point")


def recover_tau0_kappa0(a: float, b: float, c: float, tau_rest, kappa_rest, *,
                        xtol: float = 1e-13) -> tuple[float, float]:
    """The unique (tau_0, kappa_0) making both trace identities hold.

    Solves F^2 = (a + G_-)(b + G_+) for tau_0 below the first zero of either
    factor, then kappa_0 = log|F/(a + G_-)|.
    """
    fun = Tau0Functions(c, tau_rest, kappa_rest)
    top = fun.upper
    width = 10.0 * (1.0 + abs(a) + abs(b) + abs(c))
    start = float(fun.tau_rest[0])

    def root(g):
        lo = _lower_bracket(g, start, width)
        hi = _upper_bracket(g, top, lo)
        return optimize.brentq(g, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)

    t_minus = root(lambda t: a + fun.G_minus(t))
    t_plus = root(lambda t: b + fun.G_plus(t))
    t_star = min(t_minus, t_plus)

    def h(t):
        F, gp, gm = fun(t)
        return F * F - (a + gm) * (b + gp)

    if not h(t_star) > 0.0 and h(t_star) != 0.0:
        raise NoBracket("F^2 - (a + G_-)(b + G_+) is not positive at the upper end")
    lo = _lower_bracket(h, min(start, t_star), width)
    tau0 = optimize.brentq(h, lo, t_star, xtol=xtol, rtol=4 * np.finfo(float).eps)
    F, _, gm = fun(tau0)
    return float(tau0), float(math.log(abs(F / (a + gm))))


def scan_tau0(a: float, b: float, c: float, tau_rest, kappa_rest, points: int = 50):
    """F^2 and (a + G_-)(b + G_+) on a grid below the first zero of the factors.

    Returns (tau_grid, F2, G); used to check the monotone structure that
    makes the recovery well posed.
    """
    fun = Tau0Functions(c, tau_rest, kappa_rest)
    width = 10.0 * (1.0 + abs(a) + abs(b) + abs(c))
    start = float(fun.tau_rest[0])

    def first_zero(g):
        lo = _lower_bracket(g, start, width)
        return optimize.brentq(g, lo, _upper_bracket(g, fun.upper, lo))

    t_star = min(first_zero(lambda t: a + fun.G_minus(t)), first_zero(lambda t: b + fun.G_plus(t)))
    grid = np.linspace(t_star - width, t_star, points + 1)[:-1]
    vals = np.array([fun(t) for t in grid])
    F2 = vals[:, 0] ** 2
    G = (a + vals[:, 2]) * (b + vals[:, 1])
    return grid, F2, G
