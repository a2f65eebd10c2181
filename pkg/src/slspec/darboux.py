"""Isospectral transformation shifting a single norming constant."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PositivityError
from .potential import Potential, integrate_tail
from .spectrum import EigenRecord, eigenvalue

# steps with |t| above this are split into pieces of size at most 2
MAX_SINGLE_SHIFT = 10.0


@dataclass(frozen=True)
class DarbouxStep:
    n: int
    t: float

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise ValueError("t must be finite")
        if self.n < 0:
            raise ValueError("n must be >= 0")


def eta(rec: EigenRecord, t: float, h: float) -> np.ndarray:
    """eta(x) = 1 + (e^t - 1) int_x^1 psi_n^2."""
    p, dp = rec.psi, rec.psi_prime
    return 1.0 + math.expm1(t) * integrate_tail(p * p, 2.0 * p * dp, h)


def _single(q: Potential, b: float, n: int, t: float, rec: EigenRecord | None):
    if rec is None or rec.psi.size != q.grid_size + 1:
        rec = eigenvalue(q, b, n)
    p, dp = rec.psi, rec.psi_prime
    e = math.expm1(t)
    et = eta(rec, t, q.h)
    if not np.all(et > 0.0):
        raise PositivityError(f"eta has minimum {et.min():.3e} <= 0 for n={n}, t={t}")
    v = q.samples - rec.lam
    d1 = -e * p * p
    d2 = -2.0 * e * p * dp
    d3 = -2.0 * e * (dp * dp + v * p * p)
    # g = eta'/eta; q_t = q - 2 g', q_t' = q' - 2 g''
    g = d1 / et
    g1 = d2 / et - g * g
    g2 = d3 / et - d2 * d1 / (et * et) - 2.0 * g * g1
    new_b = b - e * p[-1] ** 2
    return Potential.with_slopes(q.samples - 2.0 * g1, q.slopes - 2.0 * g2), float(new_b)


def darboux_transform(q: Potential, b: float, step: DarbouxStep, *, record: EigenRecord | None = None):
    """Pair (q_t, b_t) with the same spectrum and nu_n shifted by t."""
    if step.t == 0.0:
        return q, float(b)
    pieces = math.ceil(abs(step.t) / 2.0) if abs(step.t) > MAX_SINGLE_SHIFT else 1
    dt = step.t / pieces
    for i in range(pieces):
        q, b = _single(q, b, step.n, dt, record if i == 0 else None)
    return q, b
