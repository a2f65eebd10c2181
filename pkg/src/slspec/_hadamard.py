"""Truncated Hadamard products with a closed-form tail.

Both boundary-value problems share the structure

    W(lam) = prod_{k<N} (s_k + m_k - u) / d_k  *  T_N(u),   u = lam - c,

where s_k = pi^2 (k + offset)^2 are the unperturbed roots, m_k the stored
remainders, d_k = s_k (or 1 when s_k = 0) and the tail is

    T_N(u) = prod_{k>=N} (1 - u/s_k) = Gamma(N+offset)^2 / (Gamma(N+offset-a) Gamma(N+offset+a)),

a = sqrt(u)/pi.  offset=1/2 reproduces cos(sqrt u) for m = 0 (mixed problem),
offset=0 reproduces -sqrt(u) sin(sqrt u) (general problem).  Working with u
absorbs the tail shift c exactly and leaves no removable singularities.
"""

from __future__ import annotations

import numpy as np
from scipy import special


def base_roots(N: int, offset: float) -> np.ndarray:
    return np.pi**2 * (np.arange(N) + offset) ** 2


def _norms(s: np.ndarray) -> np.ndarray:
    return np.where(s == 0.0, 1.0, s)


def _tail(u: float, N: int, offset: float) -> tuple[float, float, float]:
    """log|T_N(u)|, sign T_N(u) and T_N'(u)/T_N(u)."""
    a = np.sqrt(complex(u)) / np.pi
    z = N + offset
    logt = 2 * special.loggamma(complex(z)) - special.loggamma(z - a) - special.loggamma(z + a)
    sign = float(np.sign(np.cos(logt.imag))) if np.isfinite(logt.real) else 0.0
    if abs(a) < 1e-7:
        ssum = special.polygamma(1, z) / np.pi**2
    else:
        ssum = ((special.psi(z + a) - special.psi(z - a)) / (2 * a * np.pi**2)).real
    return float(logt.real), sign, float(-ssum)


def evaluate(lam: float, c: float, m: np.ndarray, offset: float) -> tuple[float, float]:
    """W(lam) and W'(lam) for remainders ``m`` (length N)."""
    m = np.asarray(m, dtype=float)
    N = m.size
    s = base_roots(N, offset)
    d = _norms(s)
    u = lam - c
    logt, sign_t, dlogt = _tail(u, N, offset)
    if sign_t == 0.0:
        # u sits on a tail root s_k: move factors N..k out of the closed form
        k = int(round(np.sqrt(max(u, 0.0)) / np.pi - offset))
        return evaluate(lam, c, np.concatenate([m, np.zeros(k + 1 - N)]), offset)
    if N == 0:
        t = sign_t * np.exp(logt)
        return float(t), float(t * dlogt)
    g = (s + m - u) / d
    j = int(np.argmin(np.abs(g)))
    rest = np.delete(g, j)
    drest = -1.0 / np.delete(d, j)
    sign = np.prod(np.sign(rest)) * sign_t
    # R*T with R the product over the factors other than j
    RT = sign * np.exp(np.sum(np.log(np.abs(rest))) + logt)
    dlog_rest = np.sum(drest / rest)
    W = g[j] * RT
    dW = -RT / d[j] + g[j] * RT * (dlog_rest + dlogt)
    return float(W), float(dW)


def derivative_at_roots(c: float, m: np.ndarray, offset: float) -> np.ndarray:
    """W'(lam_n) at every stored root lam_n = s_n + c + m_n."""
    m = np.asarray(m, dtype=float)
    N = m.size
    s = base_roots(N, offset)
    d = _norms(s)
    un = s + m
    G = (s[None, :] + m[None, :] - un[:, None]) / d[None, :]
    np.fill_diagonal(G, 1.0)
    sign = np.prod(np.sign(G), axis=1)
    logr = np.sum(np.log(np.abs(G)), axis=1)
    out = np.empty(N)
    # far-separated roots overflow to inf, the correct limit for 1/|W'|
    with np.errstate(over="ignore"):
        for n in range(N):
            logt, sign_t, _ = _tail(un[n], N, offset)
            out[n] = -sign[n] * sign_t * np.exp(logr[n] + logt) / d[n]
    return out
