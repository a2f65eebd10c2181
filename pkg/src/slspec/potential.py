"""Sampled real potentials on [0, 1] and the quadrature used repo-wide.

A :class:`Potential` stores samples ``q_j = q(j/M)``.  Between nodes it is the
piecewise cubic Hermite interpolant whose nodal slopes come from fourth-order
finite differences, so the interpolant is C^1 and O(h^4) accurate.  Integrals
use the endpoint-corrected trapezoid rule

    int_0^1 f = h * sum' f_j - h^2/12 * (f'(1) - f'(0)) + O(h^4),

which integrates that interpolant exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import PotentialFormatError

DEFAULT_GRID = 1024
MIN_GRID = 16

# Gauss-Legendre nodes on [0, 1] used by the sixth-order Magnus stepper.
GAUSS3 = np.array([0.5 - np.sqrt(15.0) / 10.0, 0.5, 0.5 + np.sqrt(15.0) / 10.0])


def fd_slopes(f: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative of equispaced samples."""
    f = np.asarray(f, dtype=float)
    n = f.size
    if n < 5:
        raise PotentialFormatError("need at least 5 samples for slopes")
    d = np.empty(n)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / 12.0
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / 12.0
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / 12.0
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / 12.0
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / 12.0
    return d / h


def integrate(f: np.ndarray, h: float, df0: float, df1: float) -> float:
    """Endpoint-corrected trapezoid rule for samples ``f`` on a uniform grid."""
    f = np.asarray(f)
    trap = h * (f.sum() - 0.5 * (f[0] + f[-1]))
    return float(trap - h * h / 12.0 * (df1 - df0))


def integrate_tail(f: np.ndarray, df: np.ndarray, h: float) -> np.ndarray:
    """Return ``int_x^1 f`` at every node, cell by cell with Hermite corrections."""
    cells = 0.5 * h * (f[:-1] + f[1:]) + h * h / 12.0 * (df[:-1] - df[1:])
    out = np.zeros_like(f, dtype=float)
    out[:-1] = np.cumsum(cells[::-1])[::-1]
    return out


def hermite_eval(samples: np.ndarray, slopes: np.ndarray, h: float, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    M = samples.size - 1
    j = np.clip(np.floor(x / h).astype(int), 0, M - 1)
    t = x / h - j
    t2, t3 = t * t, t * t * t
    return (
        (2 * t3 - 3 * t2 + 1) * samples[j]
        + (t3 - 2 * t2 + t) * h * slopes[j]
        + (-2 * t3 + 3 * t2) * samples[j + 1]
        + (t3 - t2) * h * slopes[j + 1]
    )


@dataclass(frozen=True, eq=False)
class Potential:
    """Real potential sampled at ``x_j = j/M``, ``j = 0..M``."""

    samples: np.ndarray
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        q = np.array(self.samples, dtype=float)
        if q.ndim != 1 or q.size - 1 < MIN_GRID:
            raise PotentialFormatError(f"need a 1-D array of at least {MIN_GRID + 1} samples")
        if not np.all(np.isfinite(q)):
            raise PotentialFormatError("samples must be finite")
        q.setflags(write=False)
        object.__setattr__(self, "samples", q)

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], M: int = DEFAULT_GRID) -> "Potential":
        x = np.linspace(0.0, 1.0, M + 1)
        return cls(np.broadcast_to(np.asarray(func(x), dtype=float), x.shape).copy())

    @classmethod
    def with_slopes(cls, samples: np.ndarray, slopes: np.ndarray) -> "Potential":
        """Potential whose Hermite slopes are supplied instead of differenced."""
        q = cls(samples)
        d = np.array(slopes, dtype=float)
        if d.shape != q.samples.shape or not np.all(np.isfinite(d)):
            raise PotentialFormatError("slopes must be finite and match the samples")
        d.setflags(write=False)
        q._cache["slopes"] = d
        return q

    @classmethod
    def constant(cls, c: float, M: int = DEFAULT_GRID) -> "Potential":
        return cls(np.full(M + 1, float(c)))

    @classmethod
    def zero(cls, M: int = DEFAULT_GRID) -> "Potential":
        return cls.constant(0.0, M)

    @property
    def grid_size(self) -> int:
        return self.samples.size - 1

    @property
    def h(self) -> float:
        return 1.0 / self.grid_size

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_size + 1)

    @property
    def slopes(self) -> np.ndarray:
        if "slopes" not in self._cache:
            d = fd_slopes(self.samples, self.h)
            d.setflags(write=False)
            self._cache["slopes"] = d
        return self._cache["slopes"]

    def __call__(self, x) -> np.ndarray:
        return hermite_eval(self.samples, self.slopes, self.h, x)

    def gauss_values(self, substeps: int = 1) -> np.ndarray:
        """Interpolated q at the three Gauss nodes of every (sub)cell, shape (M*substeps, 3)."""
        key = ("gauss", substeps)
        if key not in self._cache:
            hs = self.h / substeps
            left = np.arange(self.grid_size * substeps) * hs
            pts = left[:, None] + hs * GAUSS3[None, :]
            vals = np.ascontiguousarray(self(pts.ravel()).reshape(pts.shape))
            vals.setflags(write=False)
            self._cache[key] = vals
        return self._cache[key]

    def reflected(self) -> "Potential":
        """The potential x -> q(1 - x)."""
        return Potential(self.samples[::-1].copy())

    def __add__(self, other):
        if isinstance(other, Potential):
            return Potential(self.samples + other.samples)
        return Potential(self.samples + float(other))

    def __sub__(self, other):
        if isinstance(other, Potential):
            return Potential(self.samples - other.samples)
        return Potential(self.samples - float(other))

    def __mul__(self, s):
        return Potential(self.samples * float(s))

    __rmul__ = __mul__


def mean(q: Potential) -> float:
    """Q0 = int_0^1 q."""
    d = q.slopes
    return integrate(q.samples, q.h, d[0], d[-1])


def l2_norm(q: Potential) -> float:
    d = q.slopes
    f = q.samples
    val = integrate(f * f, q.h, 2 * f[0] * d[0], 2 * f[-1] * d[-1])
    return float(np.sqrt(max(val, 0.0)))


def inner(f: np.ndarray, g: np.ndarray, h: float, dfg0: float, dfg1: float) -> float:
    """int f g given endpoint derivatives of the product."""
    return integrate(f * g, h, dfg0, dfg1)


def fourier_mixed(q: Potential, n: int) -> tuple[float, float]:
    """(int q cos 2k x, int q sin 2k x) with k = pi (n + 1/2)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    k2 = 2.0 * np.pi * (n + 0.5)
    x, f, d = q.x, q.samples, q.slopes
    c, s = np.cos(k2 * x), np.sin(k2 * x)
    dc = d * c - k2 * f * s
    ds = d * s + k2 * f * c
    return (
        integrate(f * c, q.h, dc[0], dc[-1]),
        integrate(f * s, q.h, ds[0], ds[-1]),
    )


def read_csv(path) -> Potential:
    """Read a potential from a two-column ``x,q`` CSV file."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise PotentialFormatError(f"cannot read {path}: {exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["x", "q"]:
        raise PotentialFormatError(f"{path}: header must be 'x,q'")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise PotentialFormatError(f"{path}: non-numeric field ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != 2:
        raise PotentialFormatError(f"{path}: every row needs exactly two fields")
    x, q = data[:, 0], data[:, 1]
    M = x.size - 1
    if M < MIN_GRID:
        raise PotentialFormatError(f"{path}: need at least {MIN_GRID + 1} rows")
    if abs(x[0]) > 1e-12 or abs(x[-1] - 1.0) > 1e-12:
        raise PotentialFormatError(f"{path}: nodes must span [0, 1]")
    if np.max(np.abs(x - np.linspace(0.0, 1.0, M + 1))) > 1e-9:
        raise PotentialFormatError(f"{path}: nodes must be equispaced")
    return Potential(q)


def write_csv(q: Potential, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "q"])
        for xi, qi in zip(q.x, q.samples):
            w.writerow([f"{xi:.17g}", f"{qi:.17g}"])
