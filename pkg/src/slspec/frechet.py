"""Gradients of the spectral coordinates and the biorthogonal dual basis.

Vectors live in L^2(0,1) x R and pair as <(f; g), (p; h)> = int f p + g h.
Every vector carries the x-derivative of its function part, obtained from
the ODE rather than by differencing, so pairings can use the corrected
trapezoid rule of :mod:`slspec.potential`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .potential import Potential, integrate
from .shooting import chi_from_solution, solve_forward
from .spectrum import EigenRecord, eigenvalues

ROW_KINDS = ("C", "Lambda", "Mu", "Nu")
DUAL_KINDS = ("One", "Z", "T")


@dataclass(frozen=True)
class GradientRow:
    kind: str
    n: int
    func: np.ndarray = field(repr=False)
    boundary: float
    dfunc: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DualVector:
    kind: str
    m: int
    func: np.ndarray = field(repr=False)
    boundary: float
    dfunc: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ModeFunctions:
    """psi_n, chi_n and their first derivatives on the grid."""

    n: int
    lam: float
    psi: np.ndarray
    dpsi: np.ndarray
    chi: np.ndarray
    dchi: np.ndarray


def mode_functions(q: Potential, b: float, rec: EigenRecord) -> ModeFunctions:
    sol = rec.sol if rec.sol is not None else solve_forward(q, rec.lam, b=b)
    chi, dchi = chi_from_solution(sol, with_derivative=True)
    return ModeFunctions(n=rec.n, lam=rec.lam, psi=rec.psi, dpsi=rec.psi_prime, chi=chi, dchi=dchi)


def pair(u, v, h: float) -> float:
    """<u, v> for any two vectors with func/dfunc/boundary."""
    f = u.func * v.func
    df = u.dfunc * v.func + u.func * v.dfunc
    return integrate(f, h, df[0], df[-1]) + u.boundary * v.boundary


def _rows_for(mf: ModeFunctions):
    p, dp, c, dc = mf.psi, mf.dpsi, mf.chi, mf.dchi
    p2, dp2 = p * p, 2.0 * p * dp
    pc, dpc = p * c, dp * c + p * dc
    lam_row = GradientRow("Lambda", mf.n, p2, float(p2[-1]), dp2)
    mu_row = GradientRow("Mu", mf.n, p2 - 1.0, float(p2[-1] - 2.0), dp2)
    nu_row = GradientRow("Nu", mf.n, pc, float(pc[-1]), dpc)
    return lam_row, mu_row, nu_row


def constant_row(M: int) -> GradientRow:
    """Gradient (1; 2) of c = Q0 + 2b."""
    return GradientRow("C", -1, np.ones(M + 1), 2.0, np.zeros(M + 1))


def _records(q, b, N, records):
    recs = records if records is not None else eigenvalues(q, b, N)
    if len(recs) < N:
        raise ValueError(f"need {N} eigen records, got {len(recs)}")
    return recs[:N]


def gradient_rows(q: Potential, b: float, N: int, *, records=None, with_lambda: bool = False) -> list[GradientRow]:
    """Rows (1;2), X_0..X_{N-1}, Y_0..Y_{N-1} (and the lambda rows if asked)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    recs = _records(q, b, N, records)
    trip = [_rows_for(mode_functions(q, b, r)) for r in recs]
    rows = [constant_row(q.grid_size)] + [t[1] for t in trip] + [t[2] for t in trip]
    if with_lambda:
        rows += [t[0] for t in trip]
    return rows


def _duals_for(mf: ModeFunctions, qs: np.ndarray):
    p, dp, c, dc = mf.psi, mf.dpsi, mf.chi, mf.dchi
    v = qs - mf.lam  # psi'' = v psi and chi'' = v chi
    pc = p * c
    dpc = dp * c + p * dc
    ddpc = 2.0 * v * pc + 2.0 * dp * dc
    dp2 = 2.0 * p * dp
    ddp2 = 2.0 * (dp * dp + v * p * p)
    Z = DualVector("Z", mf.n, -2.0 * dpc, float(pc[-1]), -2.0 * ddpc)
    T = DualVector("T", mf.n, 2.0 * dp2, float(-p[-1] ** 2), 2.0 * ddp2)
    return Z, T


def dual_basis(q: Potential, b: float, N: int, *, records=None) -> list[DualVector]:
    """Dual vectors (1;0), Z_0..Z_{N-1}, T_0..T_{N-1}."""
    if N < 1:
        raise ValueError("N must be >= 1")
    recs = _records(q, b, N, records)
    M = q.grid_size
    pairs = [_duals_for(mode_functions(q, b, r), q.samples) for r in recs]
    one = DualVector("One", -1, np.ones(M + 1), 0.0, np.zeros(M + 1))
    return [one] + [z for z, _ in pairs] + [t for _, t in pairs]


def gram(rows, duals, h: float) -> np.ndarray:
    """Matrix of pairings <rows[i], duals[j]>."""
    return np.array([[pair(r, d, h) for d in duals] for r in rows])


def combine(duals, coeffs) -> tuple[np.ndarray, float]:
    """sum_j coeffs[j] * duals[j] as (function samples, boundary value)."""
    coeffs = np.asarray(coeffs, dtype=float)
    func = np.zeros_like(duals[0].func)
    bnd = 0.0
    for a, d in zip(coeffs, duals):
        if a != 0.0:
            func += a * d.func
            bnd += a * d.boundary
    return func, bnd


def tail_directions(K: int, M: int, c: float = 0.0, q: Potential | None = None,
                    span: int | None = None) -> tuple[DualVector, DualVector]:
    """Large-index sums sum_{n>=K} Z_n/(n+1/2)^2 and sum_{n>=K} T_n/(n+1/2)^2.

    The leading parts Z_n ~ (-2 cos 2k_n x; 0) and T_n ~ (4 k_n sin 2k_n x; -2)
    are summed in closed form on [0, 1].  The first ``span`` terms (default M)
    are then replaced by WKB forms with phase a = 2 kap x - int_0^x q / kap,
    kap = sqrt(k_n^2 + c).  To first order the two vectors move the
    coefficients C, A of mu_n ~ C/(n+1/2)^2 and nu_n - nu_n^0 ~ A/(n+1/2)^2
    for n >= K and leave lower modes alone.
    """
    x = np.linspace(0.0, 1.0, M + 1)
    j = 2 * np.arange(K) + 1.0
    arg = np.pi * np.outer(x, j)
    cos_sum = np.cos(arg) @ (1.0 / j**2)
    sin_sum = np.sin(arg) @ (1.0 / j)
    cos_raw = np.cos(arg).sum(axis=1)
    pi2 = np.pi**2
    mu_func = -pi2 * (1.0 - 2.0 * x) + 8.0 * cos_sum
    mu_dfunc = 2.0 * pi2 - 8.0 * np.pi * sin_sum
    # the square wave sums to pi/4 inside (0, 1); its interior value is used
    # at the end nodes too, which keeps the sampled function continuous
    nu_func = 2.0 * pi2 - 8.0 * np.pi * sin_sum
    nu_dfunc = -8.0 * pi2 * cos_raw
    nu_bnd = -2.0 * float(special.polygamma(1, K + 0.5))
    if span is None or span > 0:
        n = np.arange(K, K + (span if span is not None else M)) + 0.5
        k0 = np.pi * n
        k1 = np.sqrt(k0 * k0 + c)
        w = n**-2.0
        if q is None:
            qs = dqs = Qx = np.zeros_like(x)
        else:
            qs, dqs = q.samples, q.slopes
            Qx = np.concatenate([[0.0], np.cumsum(0.5 * (qs[1:] + qs[:-1]) * q.h
                                                  - (dqs[1:] - dqs[:-1]) * q.h**2 / 12.0)])
        a0 = 2.0 * np.outer(x, k0)
        a1 = 2.0 * np.outer(x, k1) - np.outer(Qx, 1.0 / k1)
        d1 = 2.0 * k1[None, :] - np.outer(qs, 1.0 / k1)  # phase derivative
        dd1 = -np.outer(dqs, 1.0 / k1)
        c0, s0, c1, s1 = np.cos(a0), np.sin(a0), np.cos(a1), np.sin(a1)
        # Z ~ (2 sin(a) - cos(a) a') / kap, T ~ 2 sin(a) a'
        z1 = (2.0 * s1 - c1 * d1) / k1
        dz1 = (2.0 * c1 * d1 + s1 * d1 * d1 - c1 * dd1) / k1
        t1 = 2.0 * s1 * d1
        dt1 = 2.0 * (c1 * d1 * d1 + s1 * dd1)
        mu_func += (z1 + 2.0 * c0) @ w
        mu_dfunc += (dz1 - 4.0 * s0 * k0) @ w
        nu_func += (t1 - 4.0 * s0 * k0) @ w
        nu_dfunc += (dt1 - 8.0 * c0 * k0 * k0) @ w
    return (
        DualVector("TailMu", K, mu_func, 0.0, mu_dfunc),
        DualVector("TailNu", K, nu_func, nu_bnd, nu_dfunc),
    )
