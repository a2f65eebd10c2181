"""Eigenvalues, norming constants, Hadamard surrogate and the trace identity."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from . import _hadamard, _magnus
from .errors import BracketFailure, ContourThroughRoot, InterlacingViolation, SignError
from .potential import Potential, l2_norm, mean
from .shooting import FundamentalSolution, lambda_floor, phi_norm2, solve_forward, substeps_for

TOL_ROOT = 1e-11
MAX_BISECT = 200
MAX_NEWTON = 60


def base_eigenvalue(n) -> np.ndarray | float:
    """Unperturbed eigenvalue pi^2 (n + 1/2)^2."""
    return np.pi**2 * (np.asarray(n) + 0.5) ** 2


def base_norming(n) -> np.ndarray | float:
    """Unperturbed norming constant -log(pi (n + 1/2))."""
    return -np.log(np.pi * (np.asarray(n) + 0.5))


@dataclass(frozen=True)
class EigenRecord:
    n: int
    lam: float
    nu: float
    wdot: float
    mu: float
    psi: np.ndarray = field(repr=False)
    psi_prime: np.ndarray = field(repr=False)
    sol: FundamentalSolution | None = field(default=None, repr=False, compare=False)

    @property
    def psi_prime0(self) -> float:
        return float(self.psi_prime[0])


# --------------------------------------------------------------------------
# shared root machinery; the solution y = y0*theta + yp0*phi is shot from 0


@dataclass(frozen=True)
class _Problem:
    q: Potential
    b: float
    y0: float
    yp0: float
    offset: float  # base roots pi^2 (n + offset)^2
    shift: float  # asymptotic centre shift

    def end_values(self, sol: FundamentalSolution) -> tuple[float, float, float]:
        """y(1), w and w-dot from a fundamental solution."""
        y1 = self.y0 * sol.theta[-1] + self.yp0 * sol.phi[-1]
        yp1 = self.y0 * sol.theta_prime[-1] + self.yp0 * sol.phi_prime[-1]
        dy1 = self.y0 * sol.dtheta[-1] + self.yp0 * sol.dphi[-1]
        dyp1 = self.y0 * sol.dtheta_prime[-1] + self.yp0 * sol.dphi_prime[-1]
        return y1, yp1 + self.b * y1, dyp1 + self.b * dy1

    def root_tol(self, lam: float, wd: float) -> float:
        """Acceptance level for |w|; w grows like sqrt(lam) when y(0) != 0."""
        return TOL_ROOT * max(1.0, abs(wd), abs(self.y0) * math.sqrt(abs(lam)))

    def count_below(self, lam: float) -> int:
        """Number of eigenvalues strictly below ``lam`` (Pruefer angle count)."""
        q = self.q
        k = math.sqrt(max(lam, 1.0))
        sub = substeps_for(q, lam)
        ang = _magnus.prufer_angle(q.gauss_values(sub), q.h, float(lam), sub, self.y0, self.yp0, k)
        beta = math.atan2(k, -self.b)
        return max(0, math.ceil((ang - beta) / math.pi))

    def bracket(self, n: int) -> tuple[float, float]:
        center = np.pi**2 * (n + self.offset) ** 2 + self.shift
        step = np.pi**2 * (n + 1) / 2.0
        floor = lambda_floor(self.q, self.b)
        lo = hi = max(center, floor)
        clo = chi = self.count_below(lo)
        s = step
        while clo > n:
            if lo <= floor:
                raise BracketFailure(f"no lower bracket for n={n} above the integration floor")
            lo = max(lo - s, floor)
            clo = self.count_below(lo)
            s *= 2.0
        s = step
        while chi < n + 1:
            hi = hi + s
            chi = self.count_below(hi)
            s *= 2.0
        for _ in range(MAX_BISECT):
            # also shrink wide brackets so polish never starts far below the root
            if clo == n and chi == n + 1 and hi - lo <= 4.0 * step:
                return lo, hi
            mid = 0.5 * (lo + hi)
            cm = self.count_below(mid)
            if cm <= n:
                lo, clo = mid, cm
            else:
                hi, chi = mid, cm
        raise BracketFailure(f"could not isolate eigenvalue n={n} in [{lo:.12g}, {hi:.12g}]")

    def polish(self, n: int, lo: float, hi: float) -> tuple[FundamentalSolution, float, float]:
        """Safeguarded Newton on w inside a bracket holding exactly one root."""
        q = self.q
        sol = solve_forward(q, lo, b=self.b)
        _, w, wd = self.end_values(sol)
        if abs(w) <= self.root_tol(lo, wd):
            # the root sits on the lower edge of the bracket
            return self._newton_touchup(sol, w, wd)
        slo = np.sign(w)
        x = float(np.clip(np.pi**2 * (n + self.offset) ** 2 + self.shift, lo, hi))
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        for _ in range(MAX_NEWTON):
            sol = solve_forward(q, x, b=self.b)
            _, w, wd = self.end_values(sol)
            if w == 0.0:
                return sol, w, wd
            if np.sign(w) == slo:
                lo = x
            else:
                hi = x
            dx = -w / wd if wd != 0.0 else np.inf
            xn = x + dx
            if not lo < xn < hi:
                xn = 0.5 * (lo + hi)
            if abs(xn - x) <= 1e-15 * max(1.0, abs(x)) or hi - lo <= 4e-16 * max(1.0, abs(x)):
                x = xn
                break
            x = xn
        sol = solve_forward(q, x, b=self.b)
        _, w, wd = self.end_values(sol)
        if abs(w) > self.root_tol(x, wd):
            raise BracketFailure(f"Newton did not converge for n={n}: |w|={abs(w):.3e}")
        return sol, w, wd

    def _newton_touchup(self, sol, w, wd):
        for _ in range(3):
            if w == 0.0 or wd == 0.0:
                break
            cand = solve_forward(self.q, sol.lam - w / wd, b=self.b)
            _, wc, wdc = self.end_values(cand)
            if abs(wc) >= abs(w):
                break
            sol, w, wd = cand, wc, wdc
        return sol, w, wd

    def solve(self, n: int):
        lo, hi = self.bracket(n)
        return self.polish(n, lo, hi)


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _mixed_problem(q: Potential, b: float) -> _Problem:
    return _Problem(q=q, b=float(b), y0=0.0, yp0=1.0, offset=0.5, shift=mean(q) + 2.0 * b)


# --------------------------------------------------------------------------


def wronskian(q: Potential, b: float, lam: float) -> tuple[float, float]:
    """w(lam) = phi'(1) + b phi(1) and its lam-derivative."""
    sol = solve_forward(q, lam, b=b)
    _, w, wd = _mixed_problem(q, b).end_values(sol)
    return float(w), float(wd)


def eigencount(q: Potential, b: float, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam``."""
    return _mixed_problem(q, b).count_below(lam)


def _record(prob: _Problem, n: int, Q0: float) -> EigenRecord:
    sol, _, wd = prob.solve(n)
    y1, _, _ = prob.end_values(sol)
    s = (-1) ** n * y1
    if s <= 0.0:
        raise SignError(f"(-1)^n phi(1) = {s:.3e} <= 0 at n={n}")
    norm = math.sqrt(phi_norm2(sol))
    lam = sol.lam
    return EigenRecord(
        n=n,
        lam=lam,
        nu=math.log(s),
        wdot=float(wd),
        mu=float(lam - base_eigenvalue(n) - Q0 - 2.0 * prob.b),
        psi=sol.phi / norm,
        psi_prime=sol.phi_prime / norm,
        sol=sol,
    )


def _check_windows(q: Potential, b: float, recs) -> None:
    size = l2_norm(q)
    if size > 30.0:
        return  # the window index is astronomically large
    n0 = math.ceil(2.0 * (size + abs(b)) * math.exp(size))
    for r in recs:
        if r.n > n0 and abs(math.sqrt(max(r.lam, 0.0)) - np.pi * (r.n + 0.5)) >= np.pi / 4:
            raise BracketFailure(f"eigenvalue n={r.n} left its asymptotic window; integration too coarse")


def eigenvalues(q: Potential, b: float, N: int, *, threads: int = 1) -> list[EigenRecord]:
    """The N lowest eigenvalues of the mixed problem with their norming data."""
    if N < 1:
        raise ValueError("N must be >= 1")
    prob = _mixed_problem(q, b)
    Q0 = mean(q)
    recs = _map(lambda n: _record(prob, n, Q0), range(N), threads)
    _check_windows(q, b, recs)
    return recs


def eigenvalue(q: Potential, b: float, n: int) -> EigenRecord:
    return _record(_mixed_problem(q, b), n, mean(q))


def norming_constant(q: Potential, b: float, eig) -> float:
    """nu_n = log[(-1)^n phi(1, lam_n)]."""
    sol = getattr(eig, "sol", None)
    if sol is None or sol.theta.size != q.grid_size + 1:
        sol = solve_forward(q, eig.lam, b=b)
    s = (-1) ** eig.n * sol.phi[-1]
    if s <= 0.0:
        raise SignError(f"(-1)^n phi(1) = {s:.3e} <= 0 at n={eig.n}")
    return math.log(s)


# --------------------------------------------------------------------------
# root counting on circles


def _contour_count(q: Potential, end_fn, R: float) -> int:
    sub = substeps_for(q, R)
    qg = q.gauss_values(sub)
    k = math.sqrt(R)
    prev = None
    for P in (64, 128, 256, 512, 1024, 2048):
        th = np.linspace(0.0, np.pi, P + 1)
        vals = np.empty(P + 1)
        for i, t in enumerate(th):
            lam = R * complex(math.cos(t), math.sin(t))
            w, wd = end_fn(_magnus.propagate_end_complex(qg, q.h, lam, sub))
            scale = math.exp(abs(np.sqrt(lam).imag)) * max(1.0, k)
            if abs(w) < 1e-10 * scale:
                raise ContourThroughRoot(f"|w| = {abs(w):.3e} on |lambda| = {R:.6g}")
            vals[i] = (wd / w * lam).real
        weights = np.full(P + 1, 1.0)
        weights[[0, -1]] = 0.5
        total = float(np.sum(weights * vals) * (np.pi / P) / np.pi)
        if prev is not None and abs(total - prev) < 1e-6 and abs(total - round(total)) < 1e-3:
            return int(round(total))
        prev = total
    raise ContourThroughRoot(f"argument integral did not settle on |lambda| = {R:.6g} (last {prev:.6f})")


def count_roots(q: Potential, b: float, radius_index: int) -> int:
    """Roots of w inside |lambda| = pi^2 N^2 by the argument principle."""
    if radius_index < 1:
        raise ValueError("radius_index must be >= 1")

    def end_fn(r):
        # r = (theta, phi, theta', phi') at 1, then their lam-derivatives
        return r[3] + b * r[1], r[7] + b * r[5]

    return _contour_count(q, end_fn, np.pi**2 * radius_index**2)


# --------------------------------------------------------------------------
# spectral data


@dataclass(frozen=True)
class SpectralData:
    """Truncated spectral coordinates; entries beyond N are taken as zero.

    With ``a = inf`` the coordinates are (c, mu_n, nu_n - nu_n^0) of the mixed
    problem and c = Q0 + 2b.  With finite ``a`` they are (c, tau_n, kappa_n) of
    the general problem and c = Q0 + 2a + 2b.
    """

    c: float
    mu: np.ndarray
    dnu: np.ndarray
    b: float
    a: float = math.inf

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        dnu = np.array(self.dnu, dtype=float)
        if mu.ndim != 1 or mu.shape != dnu.shape or mu.size == 0:
            raise ValueError("mu and dnu must be non-empty 1-D arrays of equal length")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(dnu)) and math.isfinite(self.c) and math.isfinite(self.b)):
            raise ValueError("spectral data must be finite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "dnu", dnu)
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "a", float(self.a))
        lam = self.eigenvalues
        bad = np.nonzero(np.diff(lam) <= 0.0)[0]
        if bad.size:
            i = int(bad[0])
            raise InterlacingViolation(f"eigenvalues {i} and {i + 1} are not strictly increasing: {lam[i]:.12g} >= {lam[i + 1]:.12g}")

    @property
    def N(self) -> int:
        return self.mu.size

    @property
    def mixed(self) -> bool:
        return math.isinf(self.a)

    @property
    def offset(self) -> float:
        return 0.5 if self.mixed else 0.0

    @property
    def eigenvalues(self) -> np.ndarray:
        return _hadamard.base_roots(self.N, self.offset) + self.c + self.mu

    @property
    def nu(self) -> np.ndarray:
        """Absolute norming constants (nu_n, or kappa_n in the general case)."""
        return base_norming(np.arange(self.N)) + self.dnu if self.mixed else self.dnu.copy()

    def weighted_norm(self) -> float:
        """c-error-style product norm: |c| + ||mu|| + ||(n+1) dnu||."""
        n = np.arange(self.N) + 1.0
        return float(abs(self.c) + np.linalg.norm(self.mu) + np.linalg.norm(n * self.dnu))

    def replace(self, **kw) -> "SpectralData":
        d = dict(c=self.c, mu=self.mu, dnu=self.dnu, b=self.b, a=self.a)
        d.update(kw)
        return SpectralData(**d)

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "mu": self.mu.tolist(),
            "dnu": self.dnu.tolist(),
            "N": self.N,
            "bc": {"a": "inf" if self.mixed else self.a, "b": self.b},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralData":
        try:
            bc = d["bc"]
            a = bc.get("a", "inf")
            a = math.inf if a == "inf" else float(a)
            data = cls(c=float(d["c"]), mu=d["mu"], dnu=d["dnu"], b=float(bc["b"]), a=a)
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed spectral data document: {exc!r}") from exc
        if "N" in d and int(d["N"]) != data.N:
            raise ValueError(f"N={d['N']} does not match {data.N} stored modes")
        return data

    def dumps(self) -> str:
        return _dumps17(self.to_dict())

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def load(cls, path) -> "SpectralData":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(doc)


def _dumps17(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_dumps17(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_dumps17(v) for v in obj) + "]"
    if isinstance(obj, float):
        return f"{obj:.17g}"
    return json.dumps(obj)


def spectral_data(q: Potential, b: float, N: int, *, records=None, threads: int = 1) -> SpectralData:
    """Phi(q, b) truncated to N modes."""
    recs = records if records is not None else eigenvalues(q, b, N, threads=threads)
    n = np.arange(len(recs))
    return SpectralData(
        c=mean(q) + 2.0 * b,
        mu=np.array([r.mu for r in recs]),
        dnu=np.array([r.nu for r in recs]) - base_norming(n),
        b=b,
    )


def hadamard_w(data: SpectralData, lam: float) -> tuple[float, float]:
    """W(lam) and W'(lam) from the truncated product with closed-form tail."""
    return _hadamard.evaluate(lam, data.c, data.mu, data.offset)


def hadamard_wdot_at_roots(data: SpectralData) -> np.ndarray:
    """W'(lam_n) at every stored eigenvalue."""
    return _hadamard.derivative_at_roots(data.c, data.mu, data.offset)


# --------------------------------------------------------------------------
# trace identity


def identity_terms(recs) -> np.ndarray:
    """2 - e^{nu_n}/|w'(lam_n)| for each record."""
    return np.array([2.0 - math.exp(r.nu) / abs(r.wdot) for r in recs])


def fit_inverse_square(values, start: int = 0, offset: float = 0.5, terms: int = 1):
    """Least-squares C in values[j] ~ C/(start + j + offset)^2.

    With ``terms=2`` a D/(start + j + offset)^4 correction is fitted as well
    and (C, D) is returned.
    """
    values = np.asarray(values, dtype=float)
    z = np.arange(values.size) + start + offset
    if terms == 1:
        basis = z**-2.0
        return float(np.dot(values, basis) / np.dot(basis, basis))
    A = np.stack([z**-2.0, z**-4.0], axis=1)
    coef = np.linalg.lstsq(A, values, rcond=None)[0]
    return float(coef[0]), float(coef[1])


def tail_estimate(terms: np.ndarray, offset: float = 0.5, start: int = 0) -> float:
    """Sum over n >= len(terms) of C/(n+offset)^2 fitted to the last quarter.

    ``start`` is the index of terms[0].
    """
    terms = np.asarray(terms, dtype=float)
    N = terms.size
    if N < 8:
        return 0.0
    i0 = N - N // 4
    C = fit_inverse_square(terms[i0:], start + i0, offset)
    return C * float(special.zeta(2.0, N + start + offset))


def identity_residual(q: Potential, b: float, N: int, *, records=None, threads: int = 1) -> float:
    """b minus the truncated trace sum minus its fitted tail."""
    recs = records if records is not None else eigenvalues(q, b, N, threads=threads)
    t = identity_terms(recs)
    return float(b - t.sum() - tail_estimate(t))
