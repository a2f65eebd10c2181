"""Reconstruction of (q, b) from spectral data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import frechet
from .darboux import DarbouxStep, darboux_transform
from .errors import DomainError, InterlacingViolation, NoBracket, NoConvergence, SpectralError
from .potential import DEFAULT_GRID, Potential
from .spectrum import (
    SpectralData,
    base_norming,
    eigenvalue,
    eigenvalues,
    fit_inverse_square,
    hadamard_wdot_at_roots,
    spectral_data,
    tail_estimate,
)


@dataclass
class NewtonOptions:
    """Settings for :func:`newton_invert`.

    ``tail_model`` selects how coordinates beyond the stored N are modelled:
    ``"fit"`` extends mu_n and nu_n - nu_n^0 by C/(n+1/2)^2 laws fitted to
    the last quarter of the data, ``"zero"`` takes them as zero.  With
    ``tail_control`` the iteration also steers the C, A coefficients of the
    iterate's own tail towards the model, measuring them on ``tail_window``
    modes starting at ``probe_factor`` times the number of matched modes.
    """

    tol: float = 1e-9
    max_iter: int = 30
    guard_modes: int = 5
    max_halvings: int = 8
    grid: int = DEFAULT_GRID
    threads: int = 1
    tail_model: str = "fit"
    tail_control: bool = True
    tail_window: int = 8
    probe_factor: float = 2.0


@dataclass
class NewtonDiagnostics:
    residuals: list[float] = field(default_factory=list)
    step_scales: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    def as_dict(self) -> dict:
        return {
            "residuals": list(self.residuals),
            "step_scales": list(self.step_scales),
            "iterations": self.iterations,
            "converged": self.converged,
        }


def tail_coefficients(data: SpectralData, model: str = "fit") -> tuple[np.ndarray, np.ndarray]:
    """(C, D) pairs for mu_n and for nu_n - nu_n^0 beyond N.

    Both sequences are modelled as C/(n+1/2)^2 + D/(n+1/2)^4.
    """
    if model == "zero" or data.N < 8:
        return np.zeros(2), np.zeros(2)
    if model != "fit":
        raise ValueError(f"unknown tail model {model!r}")
    i0 = data.N - max(data.N // 4, 4)
    return (
        np.array(fit_inverse_square(data.mu[i0:], i0, data.offset, terms=2)),
        np.array(fit_inverse_square(data.dnu[i0:], i0, data.offset, terms=2)),
    )


def extended_targets(data: SpectralData, K: int, model: str = "fit"):
    """mu and nu - nu^0 for modes 0..K-1, continuing past N with the tail model."""
    cm, cn = tail_coefficients(data, model)
    mu = np.empty(K)
    dnu = np.empty(K)
    n = min(K, data.N)
    mu[:n], dnu[:n] = data.mu[:n], data.dnu[:n]
    g = (np.arange(n, K) + data.offset) ** -2.0
    mu[n:] = cm[0] * g + cm[1] * g * g
    dnu[n:] = cn[0] * g + cn[1] * g * g
    return mu, dnu


def data_residual(dc: float, dmu: np.ndarray, ddnu: np.ndarray) -> float:
    """|dc| + ||dmu|| + ||(n+1) ddnu||."""
    n = np.arange(ddnu.size) + 1.0
    return float(abs(dc) + np.linalg.norm(dmu) + np.linalg.norm(n * ddnu))


def _tail_weights(K: int) -> tuple[float, float]:
    """l2 norms of (n+1/2)^-2 and (n+1)(n+1/2)^-2 over n >= K."""
    z = K + 0.5
    wc = math.sqrt(special.zeta(4.0, z))
    wa = math.sqrt(special.zeta(2.0, z) + special.zeta(3.0, z) + 0.25 * special.zeta(4.0, z))
    return wc, wa


class _State:
    """Iterate (q, b) with its data on modes < K and on the probe window."""

    def __init__(self, q: Potential, b: float, K: int, probes: range, threads: int):
        self.q, self.b = q, float(b)
        self.K = K
        self.records = eigenvalues(q, b, K, threads=threads)
        self.data = spectral_data(q, b, K, records=self.records)
        recs = [eigenvalue(q, b, n) for n in probes]
        self.probe_n = np.array(probes, dtype=int)
        self.probe_mu = np.array([r.mu for r in recs])
        self.probe_dnu = np.array([r.nu - base_norming(r.n) for r in recs])


class _Target:
    def __init__(self, data: SpectralData, K: int, opts: NewtonOptions):
        self.c = data.c
        self.mu, self.dnu = extended_targets(data, K, opts.tail_model)
        self.cm, self.cn = tail_coefficients(data, opts.tail_model)
        self.control = opts.tail_control
        self.wc, self.wa = _tail_weights(K)

    def mismatch(self, st: _State):
        K = st.K
        d = st.data
        dC = dA = 0.0
        if self.control and st.probe_n.size:
            g = (st.probe_n + 0.5) ** -2.0
            L = int(st.probe_n[0])
            dC = fit_inverse_square(self.cm[0] * g + self.cm[1] * g * g - st.probe_mu, L)
            dA = fit_inverse_square(self.cn[0] * g + self.cn[1] * g * g - st.probe_dnu, L)
        return self.c - d.c, self.mu - d.mu, self.dnu - d.dnu, dC, dA

    def residual(self, dc, dmu, ddnu, dC, dA) -> float:
        n = np.arange(ddnu.size) + 1.0
        rmu = math.hypot(np.linalg.norm(dmu), dC * self.wc)
        rnu = math.hypot(np.linalg.norm(n * ddnu), dA * self.wa)
        return float(abs(dc) + rmu + rnu)


def newton_invert(target: SpectralData, q0: Potential | None = None, b0: float | None = None,
                  opts: NewtonOptions | None = None):
    """Damped Newton iteration for Phi(q, b) = target using the dual basis.

    Each step is (dq; db) = dc (1;0) + sum dmu_m Z_m + sum dnu_m T_m over the
    stored and guard modes, plus the two tail directions when tail control
    is on.  Returns (q, b, diagnostics).
    """
    if not target.mixed:
        raise ValueError("newton_invert handles the mixed problem (a = inf) only")
    opts = opts or NewtonOptions()
    K = target.N + opts.guard_modes
    L = int(round(opts.probe_factor * K))
    probes = range(L, L + opts.tail_window) if opts.tail_control else range(0)
    goal = _Target(target, K, opts)
    q = q0 if q0 is not None else Potential.zero(opts.grid)
    b = float(b0) if b0 is not None else 0.5 * target.c
    diag = NewtonDiagnostics()

    state = _State(q, b, K, probes, opts.threads)
    mis = goal.mismatch(state)
    r = goal.residual(*mis)
    diag.residuals.append(r)
    while r > opts.tol:
        if diag.iterations >= opts.max_iter:
            raise NoConvergence(f"no convergence after {opts.max_iter} iterations (residual {r:.3e})", diag.as_dict())
        dc, dmu, ddnu, dC, dA = mis
        duals = frechet.dual_basis(state.q, state.b, K, records=state.records)
        tails = frechet.tail_directions(K, state.q.grid_size, state.data.c, state.q) if len(probes) else ()
        duals = duals + list(tails)
        coeffs = np.concatenate([[dc], dmu, ddnu, [dC, dA][: len(tails)]])
        dfunc, dbnd = frechet.combine(duals, coeffs)
        ddfunc = np.zeros_like(dfunc)
        for a, d in zip(coeffs, duals):
            if a != 0.0:
                ddfunc += a * d.dfunc
        scale = 1.0
        for _ in range(opts.max_halvings + 1):
            trial_q = Potential.with_slopes(state.q.samples + scale * dfunc, state.q.slopes + scale * ddfunc)
            try:
                trial = _State(trial_q, state.b + scale * dbnd, K, probes, opts.threads)
            except SpectralError:
                trial = None
            if trial is not None:
                tmis = goal.mismatch(trial)
                tr = goal.residual(*tmis)
                if tr < r:
                    break
            scale *= 0.5
        else:
            raise NoConvergence(f"step halving floor reached at residual {r:.3e}", diag.as_dict())
        state, mis, r = trial, tmis, tr
        diag.iterations += 1
        diag.step_scales.append(scale)
        diag.residuals.append(r)
    diag.converged = True
    return state.q, state.b, diag


# --------------------------------------------------------------------------
# Darboux chains


def shift_norming_constants(q: Potential, b: float, shifts) -> tuple[Potential, float]:
    """Shift nu_k by shifts[k], applying the steps from the highest index down."""
    shifts = np.asarray(shifts, dtype=float)
    for k in range(shifts.size - 1, -1, -1):
        if shifts[k] != 0.0:
            q, b = darboux_transform(q, b, DarbouxStep(k, float(shifts[k])))
    return q, b


def flow_norming_constants(q0: Potential, b0: float, target_dnu) -> tuple[Potential, float]:
    """Move nu_k - nu_k^0 to target_dnu[k] for every k by a Darboux chain.

    The current value is recomputed right before each step, so the shift
    absorbs any drift left by earlier steps.
    """
    target = np.asarray(target_dnu, dtype=float)
    q, b = q0, float(b0)
    for k in range(target.size - 1, -1, -1):
        rec = eigenvalues(q, b, k + 1)[k]
        t = float(target[k] - (rec.nu - base_norming(k)))
        if t != 0.0:
            q, b = darboux_transform(q, b, DarbouxStep(k, t), record=rec)
    return q, b


# --------------------------------------------------------------------------
# scalar recoveries


def _trace_sum(data: SpectralData, nu: np.ndarray, skip: int | None = None) -> float:
    """sum_n (2 - e^{nu_n}/|W'(lam_n)|) plus fitted tail, optionally leaving out one index."""
    wd = np.abs(hadamard_wdot_at_roots(data))
    terms = 2.0 - np.exp(nu) / wd
    if skip is not None:
        terms[skip] = 0.0
        fit = terms.copy()
        if skip >= fit.size - fit.size // 4:
            fit[skip] = terms[skip - 1] if skip > 0 else 0.0
        return float(terms.sum() + tail_estimate(fit))
    return float(terms.sum() + tail_estimate(terms))


def trace_function(b: float, c: float, mu0: float, mu_rest, dnu) -> float:
    """B(c, mu_0, nu) evaluated through the Hadamard product."""
    del b  # B does not depend on b; kept for a uniform signature
    mu = np.concatenate([[mu0], np.asarray(mu_rest, dtype=float)])
    data = SpectralData(c=c, mu=mu, dnu=dnu, b=0.0)
    return _trace_sum(data, data.nu)


def mu0_upper_bound(mu_rest) -> float:
    """Largest admissible mu_0: lam_0 must stay below lam_1."""
    return float(np.pi**2 * (1.5**2 - 0.5**2) + mu_rest[0])


def recover_mu0(b: float, c: float, mu_rest, dnu, *, tol: float = 1e-12) -> float:
    """The unique mu_0 with B(c, mu_0, nu) = b."""
    mu_rest = np.asarray(mu_rest, dtype=float)
    dnu = np.asarray(dnu, dtype=float)
    if mu_rest.size + 1 != dnu.size:
        raise ValueError("need len(dnu) == len(mu_rest) + 1")
    if np.any(np.diff(np.pi**2 * (np.arange(1, dnu.size) + 0.5) ** 2 + mu_rest) <= 0):
        raise InterlacingViolation("mu_rest does not give increasing eigenvalues")
    top = mu0_upper_bound(mu_rest)

    def f(m):
        return trace_function(b, c, m, mu_rest, dnu) - b

    span = 10.0 * (1.0 + abs(b) + abs(c))
    lo = top - span
    for _ in range(60):
        if f(lo) > 0.0:
            break
        span *= 2.0
        lo = top - span
    else:
        raise NoBracket("B stays below b as mu_0 decreases")
    eps = 1e-3 * (top - lo)
    hi = top - eps
    for _ in range(60):
        if f(hi) < 0.0:
            break
        eps *= 0.1
        hi = top - eps
        if eps < 1e-14 * max(1.0, abs(top)):
            raise NoBracket("B stays above b up to eigenvalue coalescence")
    else:
        raise NoBracket("B stays above b up to eigenvalue coalescence")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def recover_nu_m(b: float, data: SpectralData, m: int, nu_rest=None) -> float:
    """nu_m from the other norming constants through the trace identity.

    ``nu_rest`` holds nu_n (absolute) for n != m; by default it is read from
    ``data``.  Returns the absolute nu_m.
    """
    if not 0 <= m < data.N:
        raise ValueError(f"m must lie in [0, {data.N})")
    if nu_rest is None:
        nu_rest = np.delete(data.nu, m)
    nu_rest = np.asarray(nu_rest, dtype=float)
    if nu_rest.size != data.N - 1:
        raise ValueError(f"nu_rest must have {data.N - 1} entries")
    nu = np.insert(nu_rest, m, 0.0)
    wd = np.abs(hadamard_wdot_at_roots(data))
    arg = 2.0 - b + _trace_sum(data, nu, skip=m)
    if not arg > 0.0:
        raise DomainError(f"log argument {arg:.3e} <= 0: data outside the admissible set")
    return float(math.log(wd[m]) + math.log(arg))
