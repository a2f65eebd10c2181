"""Sixth-order Magnus propagation for -y'' + q y = lam y.

The first-order system (y, y')' = A(x) (y, y') has A = [[0, 1], [q - lam, 0]].
Each step applies exp(Omega) with the three-point Gauss-Legendre Magnus
truncation; Omega is a traceless 2x2 matrix, so exp(Omega) = C(z) I + S(z) Omega
with z = -det(Omega).  The lam-derivative of the step is differentiated
exactly, which makes dw/dlam the derivative of the discrete Wronskian.

2x2 matrices are passed around as 4-tuples (m11, m12, m21, m22).
"""

import cmath
import math

import numpy as np
from numba import njit

SQ15 = math.sqrt(15.0)


@njit(cache=True, inline="always")
def _mul(a, b):
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


@njit(cache=True, inline="always")
def _comm(a, b):
    p = _mul(a, b)
    r = _mul(b, a)
    return (p[0] - r[0], p[1] - r[1], p[2] - r[2], p[3] - r[3])


@njit(cache=True, inline="always")
def _axpy(s, a, b):
    return (s * a[0] + b[0], s * a[1] + b[1], s * a[2] + b[2], s * a[3] + b[3])


@njit(cache=True)
def _cs_real(z):
    """C = cosh(sqrt z), S = sinh(sqrt z)/sqrt z, dS/dz for real z."""
    if abs(z) < 0.05:
        c = 1.0 + z * (0.5 + z * (1 / 24 + z * (1 / 720 + z * (1 / 40320 + z / 3628800))))
        s = 1.0 + z * (1 / 6 + z * (1 / 120 + z * (1 / 5040 + z * (1 / 362880 + z / 39916800))))
        ds = 1 / 6 + z * (2 / 120 + z * (3 / 5040 + z * (4 / 362880 + z * (5 / 39916800 + z * 6 / 6227020800))))
        return c, s, ds
    if z > 0.0:
        r = math.sqrt(z)
        c = math.cosh(r)
        s = math.sinh(r) / r
    else:
        r = math.sqrt(-z)
        c = math.cos(r)
        s = math.sin(r) / r
    return c, s, (c - s) / (2.0 * z)


@njit(cache=True)
def _cs_complex(z):
    if abs(z) < 0.05:
        c = 1.0 + z * (0.5 + z * (1 / 24 + z * (1 / 720 + z * (1 / 40320 + z / 3628800))))
        s = 1.0 + z * (1 / 6 + z * (1 / 120 + z * (1 / 5040 + z * (1 / 362880 + z / 39916800))))
        ds = 1 / 6 + z * (2 / 120 + z * (3 / 5040 + z * (4 / 362880 + z * (5 / 39916800 + z * 6 / 6227020800))))
        return c, s, ds
    r = cmath.sqrt(z)
    c = cmath.cosh(r)
    s = cmath.sinh(r) / r
    return c, s, (c - s) / (2.0 * z)


@njit(cache=True, inline="always")
def _omega(q1, q2, q3, lam, h):
    """Magnus-6 exponent and its lam-derivative for one step of signed length h."""
    one = lam * 0.0 + 1.0
    A1 = (0.0 * one, one, q1 - lam, 0.0 * one)
    A2 = (0.0 * one, one, q2 - lam, 0.0 * one)
    A3 = (0.0 * one, one, q3 - lam, 0.0 * one)
    D = (0.0 * one, 0.0 * one, -one, 0.0 * one)
    a1 = (h * A2[0], h * A2[1], h * A2[2], h * A2[3])
    f2 = SQ15 * h / 3.0
    a2 = (0.0 * one, 0.0 * one, f2 * (A3[2] - A1[2]), 0.0 * one)
    f3 = 10.0 * h / 3.0
    a3 = (0.0 * one, 0.0 * one, f3 * (A3[2] - 2.0 * A2[2] + A1[2]), 0.0 * one)
    da1 = (h * D[0], h * D[1], h * D[2], h * D[3])

    C1 = _comm(a1, a2)
    dC1 = _comm(da1, a2)
    inner = _axpy(2.0, a3, C1)
    C2 = _comm(a1, inner)
    C2 = (-C2[0] / 60.0, -C2[1] / 60.0, -C2[2] / 60.0, -C2[3] / 60.0)
    t1 = _comm(da1, inner)
    t2 = _comm(a1, dC1)
    dC2 = (-(t1[0] + t2[0]) / 60.0, -(t1[1] + t2[1]) / 60.0, -(t1[2] + t2[2]) / 60.0, -(t1[3] + t2[3]) / 60.0)

    L = (-20.0 * a1[0] - a3[0] + C1[0], -20.0 * a1[1] - a3[1] + C1[1],
         -20.0 * a1[2] - a3[2] + C1[2], -20.0 * a1[3] - a3[3] + C1[3])
    dL = _axpy(-20.0, da1, dC1)
    R = (a2[0] + C2[0], a2[1] + C2[1], a2[2] + C2[2], a2[3] + C2[3])
    K = _comm(L, R)
    dK = _comm(dL, R)
    dK2 = _comm(L, dC2)

    om = (a1[0] + a3[0] / 12.0 + K[0] / 240.0, a1[1] + a3[1] / 12.0 + K[1] / 240.0,
          a1[2] + a3[2] / 12.0 + K[2] / 240.0, a1[3] + a3[3] / 12.0 + K[3] / 240.0)
    dom = (da1[0] + (dK[0] + dK2[0]) / 240.0, da1[1] + (dK[1] + dK2[1]) / 240.0,
           da1[2] + (dK[2] + dK2[2]) / 240.0, da1[3] + (dK[3] + dK2[3]) / 240.0)
    return om, dom


@njit(cache=True, inline="always")
def _expm(om, dom, c, s, ds):
    z = om[0] * om[0] + om[1] * om[2]
    dz = 2.0 * om[0] * dom[0] + dom[1] * om[2] + om[1] * dom[2]
    E = (c + s * om[0], s * om[1], s * om[2], c + s * om[3])
    g = 0.5 * s * dz
    k = ds * dz
    dE = (g + k * om[0] + s * dom[0], k * om[1] + s * dom[1],
          k * om[2] + s * dom[2], g + k * om[3] + s * dom[3])
    return E, dE


@njit(cache=True)
def propagate(qg, h, lam, sub, out, dout):
    """Forward fundamental matrix on the grid.

    qg: (M*sub, 3) potential at Gauss nodes of the substeps; h: grid step.
    out/dout: (M+1, 4) arrays receiving (theta, phi, theta', phi') and their
    lam-derivatives at the grid nodes.
    """
    n = qg.shape[0]
    hs = h / sub
    Y = (1.0, 0.0, 0.0, 1.0)
    dY = (0.0, 0.0, 0.0, 0.0)
    out[0, 0] = 1.0
    out[0, 1] = 0.0
    out[0, 2] = 0.0
    out[0, 3] = 1.0
    for k in range(4):
        dout[0, k] = 0.0
    for i in range(n):
        om, dom = _omega(qg[i, 0], qg[i, 1], qg[i, 2], lam, hs)
        z = om[0] * om[0] + om[1] * om[2]
        c, s, ds = _cs_real(z)
        E, dE = _expm(om, dom, c, s, ds)
        nY = _mul(E, Y)
        a = _mul(dE, Y)
        b = _mul(E, dY)
        dY = (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])
        Y = nY
        if (i + 1) % sub == 0:
            j = (i + 1) // sub
            # rows of Y: (theta, phi), (theta', phi')
            out[j, 0] = Y[0]
            out[j, 1] = Y[1]
            out[j, 2] = Y[2]
            out[j, 3] = Y[3]
            dout[j, 0] = dY[0]
            dout[j, 1] = dY[1]
            dout[j, 2] = dY[2]
            dout[j, 3] = dY[3]
            if not (abs(Y[0]) < 1e290 and abs(Y[1]) < 1e290 and abs(Y[2]) < 1e290 and abs(Y[3]) < 1e290):
                return False
    return True


@njit(cache=True)
def propagate_backward(qg, h, lam, sub, y1, dy1, out):
    """Integrate a single solution from x=1 down to x=0 with data (y, y')(1) = (y1, dy1)."""
    n = qg.shape[0]
    hs = -h / sub
    y = y1
    yp = dy1
    M = n // sub
    out[M, 0] = y
    out[M, 1] = yp
    for i in range(n - 1, -1, -1):
        om, dom = _omega(qg[i, 2], qg[i, 1], qg[i, 0], lam, hs)
        z = om[0] * om[0] + om[1] * om[2]
        c, s, ds = _cs_real(z)
        E, dE = _expm(om, dom, c, s, ds)
        y, yp = E[0] * y + E[1] * yp, E[2] * y + E[3] * yp
        if i % sub == 0:
            j = i // sub
            out[j, 0] = y
            out[j, 1] = yp
            if not (abs(y) < 1e290 and abs(yp) < 1e290):
                return False
    return True


@njit(cache=True)
def propagate_end_complex(qg, h, lam, sub):
    """Fundamental matrix and lam-derivative at x=1 for complex lam."""
    n = qg.shape[0]
    hs = h / sub
    one = complex(1.0, 0.0)
    zero = complex(0.0, 0.0)
    Y = (one, zero, zero, one)
    dY = (zero, zero, zero, zero)
    for i in range(n):
        om, dom = _omega(qg[i, 0] * one, qg[i, 1] * one, qg[i, 2] * one, lam, hs)
        z = om[0] * om[0] + om[1] * om[2]
        c, s, ds = _cs_complex(z)
        E, dE = _expm(om, dom, c, s, ds)
        nY = _mul(E, Y)
        a = _mul(dE, Y)
        b = _mul(E, dY)
        dY = (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])
        Y = nY
    res = np.empty(8, dtype=np.complex128)
    for k in range(4):
        res[k] = Y[k]
        res[4 + k] = dY[k]
    return res


@njit(cache=True)
def prufer_angle(qg, h, lam, sub, y0, yp0, scale):
    """Continuous angle of (y', scale*y) at x=1 for the solution with data (y0, yp0) at 0.

    The angle is unwrapped substep by substep, so scale*h/sub must stay well
    below pi.
    """
    n = qg.shape[0]
    hs = h / sub
    y = y0
    yp = yp0
    ang = math.atan2(scale * y, yp)
    for i in range(n):
        om, dom = _omega(qg[i, 0], qg[i, 1], qg[i, 2], lam, hs)
        z = om[0] * om[0] + om[1] * om[2]
        c, s, ds = _cs_real(z)
        E, dE = _expm(om, dom, c, s, ds)
        ny = E[0] * y + E[1] * yp
        nyp = E[2] * y + E[3] * yp
        # rotation from (yp, scale*y) to (nyp, scale*ny)
        cross = yp * scale * ny - scale * y * nyp
        dot = yp * nyp + scale * scale * y * ny
        ang += math.atan2(cross, dot)
        r = abs(ny) + abs(nyp)
        if r > 1e100:
            ny /= r
            nyp /= r
        y = ny
        yp = nyp
    return ang
