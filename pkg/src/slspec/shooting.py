"""Fundamental solutions of -psi'' + q psi = lam psi and quantities built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _magnus
from .errors import NotAnEigenvalue
from .potential import Potential, integrate, l2_norm

# largest k*h per Magnus substep before the grid cell is subdivided
MAX_PHASE_PER_STEP = 1.2


@dataclass(frozen=True)
class FundamentalSolution:
    """theta, phi (theta(0)=phi'(0)=1, theta'(0)=phi(0)=0) and their lam-derivatives."""

    lam: float
    theta: np.ndarray
    theta_prime: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    dtheta: np.ndarray
    dtheta_prime: np.ndarray
    dphi: np.ndarray
    dphi_prime: np.ndarray

    @property
    def h(self) -> float:
        return 1.0 / (self.theta.size - 1)

    def wronskian_error(self) -> float:
        return float(np.max(np.abs(self.theta * self.phi_prime - self.theta_prime * self.phi - 1.0)))


@dataclass(frozen=True)
class BackwardSolution:
    """xi_b with xi_b(1) = -1, xi_b'(1) = b."""

    lam: float
    b: float
    xi: np.ndarray
    xi_prime: np.ndarray


def substeps_for(q: Potential, lam) -> int:
    k = math.sqrt(max(abs(lam), 1.0))
    return max(1, math.ceil(k * q.h / MAX_PHASE_PER_STEP))


def lambda_floor(q: Potential, b: float = 0.0) -> float:
    """Most negative lam accepted by the integrator."""
    return -((l2_norm(q) + abs(b) + 20.0) ** 2)


def _check_lambda(q: Potential, lam: float, b: float = 0.0) -> None:
    if not math.isfinite(lam):
        raise ValueError(f"lambda must be finite, got {lam}")
    if lam < lambda_floor(q, b):
        raise OverflowError(f"lambda={lam:.6g} below the integration floor {lambda_floor(q, b):.6g}")


def _run(q: Potential, lam: float, substeps: int | None = None):
    sub = substeps or substeps_for(q, lam)
    M = q.grid_size
    out = np.empty((M + 1, 4))
    dout = np.empty((M + 1, 4))
    if not _magnus.propagate(q.gauss_values(sub), q.h, float(lam), sub, out, dout):
        raise OverflowError(f"solution overflow at lambda={lam:.6g}")
    return out, dout


def endpoint(q: Potential, lam: float, substeps: int | None = None):
    """(theta, phi, theta', phi') at x=1 and their lam-derivatives."""
    out, dout = _run(q, lam, substeps)
    return out[-1].copy(), dout[-1].copy()


def solve_forward(q: Potential, lam: float, *, b: float = 0.0, substeps: int | None = None) -> FundamentalSolution:
    _check_lambda(q, lam, b)
    out, dout = _run(q, lam, substeps)
    return FundamentalSolution(
        lam=float(lam),
        theta=out[:, 0], phi=out[:, 1], theta_prime=out[:, 2], phi_prime=out[:, 3],
        dtheta=dout[:, 0], dphi=dout[:, 1], dtheta_prime=dout[:, 2], dphi_prime=dout[:, 3],
    )


def estimate_error(q: Potential, lam: float) -> float:
    """Richardson-style estimate: change in the x=1 data when the step is halved."""
    sub = substeps_for(q, lam)
    a, da = endpoint(q, lam, sub)
    b, db = endpoint(q, lam, 2 * sub)
    return float(max(np.max(np.abs(a - b)), np.max(np.abs(da - db)) * max(1.0, abs(lam)) ** 0.5))


def solve_backward(q: Potential, b: float, lam: float, *, substeps: int | None = None) -> BackwardSolution:
    _check_lambda(q, lam, b)
    sub = substeps or substeps_for(q, lam)
    out = np.empty((q.grid_size + 1, 2))
    if not _magnus.propagate_backward(q.gauss_values(sub), q.h, float(lam), sub, -1.0, float(b), out):
        raise OverflowError(f"solution overflow at lambda={lam:.6g}")
    return BackwardSolution(lam=float(lam), b=float(b), xi=out[:, 0], xi_prime=out[:, 1])


def backward_from_reflection(q: Potential, b: float, lam: float) -> BackwardSolution:
    """xi_b(x) = -theta(1-x, q*) - b phi(1-x, q*) with q*(x) = q(1-x)."""
    sol = solve_forward(q.reflected(), lam, b=b)
    xi = -sol.theta[::-1] - b * sol.phi[::-1]
    xi_prime = sol.theta_prime[::-1] + b * sol.phi_prime[::-1]
    return BackwardSolution(lam=float(lam), b=float(b), xi=xi, xi_prime=xi_prime)


def wronskian_value(q: Potential, b: float, lam: float) -> tuple[float, float]:
    _check_lambda(q, lam, b)
    y, dy = endpoint(q, lam)
    return y[3] + b * y[1], dy[3] + b * dy[1]


def phi_norm2(sol: FundamentalSolution) -> float:
    p, dp = sol.phi, sol.phi_prime
    return integrate(p * p, sol.h, 2 * p[0] * dp[0], 2 * p[-1] * dp[-1])


def eigenfunction(q: Potential, b: float, lambda_n: float, n: int, *, tol: float = 1e-7):
    """Normalized eigenfunction psi_n = phi/||phi|| and psi_n'(0) = 1/||phi||."""
    sol = solve_forward(q, lambda_n, b=b)
    w = sol.phi_prime[-1] + b * sol.phi[-1]
    wdot = sol.dphi_prime[-1] + b * sol.dphi[-1]
    if abs(w) > tol * max(1.0, abs(wdot) * max(1.0, abs(lambda_n))):
        raise NotAnEigenvalue(f"|w({lambda_n:.12g})| = {abs(w):.3e} for n={n}")
    norm = math.sqrt(phi_norm2(sol))
    return sol.phi / norm, 1.0 / norm


def theta_phi_overlap(sol: FundamentalSolution) -> float:
    """int_0^1 phi theta at the solution's lam."""
    f = sol.phi * sol.theta
    df = sol.phi_prime * sol.theta + sol.phi * sol.theta_prime
    return integrate(f, sol.h, df[0], df[-1])


def chi_from_solution(sol: FundamentalSolution, *, with_derivative: bool = False):
    """chi_n = theta/psi_n'(0) - psi_n int(phi theta) at an eigenvalue solution."""
    norm = math.sqrt(phi_norm2(sol))
    psi, dpsi = sol.phi / norm, sol.phi_prime / norm
    c = theta_phi_overlap(sol)
    chi = sol.theta * norm - psi * c
    if not with_derivative:
        return chi
    return chi, sol.theta_prime * norm - dpsi * c


def chi(q: Potential, b: float, n: int, eig, *, with_derivative: bool = False):
    """Companion solution chi_n with {chi_n, psi_n} = 1 and int psi_n chi_n = 0.

    ``eig`` is an EigenRecord (or anything with ``lam`` and ``sol`` attributes).
    """
    sol = getattr(eig, "sol", None)
    if sol is None or sol.theta.size != q.grid_size + 1:
        sol = solve_forward(q, eig.lam, b=b)
    w = sol.phi_prime[-1] + b * sol.phi[-1]
    wdot = sol.dphi_prime[-1] + b * sol.dphi[-1]
    if abs(w) > 1e-7 * max(1.0, abs(wdot) * max(1.0, abs(eig.lam))):
        raise NotAnEigenvalue(f"|w({eig.lam:.12g})| = {abs(w):.3e} for n={n}")
    return chi_from_solution(sol, with_derivative=with_derivative)
