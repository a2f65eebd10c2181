import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from slspec import shooting as sh
from slspec import spectrum as sp
from slspec.errors import InterlacingViolation, SignError
from slspec.potential import Potential, integrate

from conftest import pot


def test_unperturbed_spectrum():
    recs = sp.eigenvalues(Potential.zero(512), 0.0, 50)
    n = np.arange(50)
    lam = np.array([r.lam for r in recs])
    nu = np.array([r.nu for r in recs])
    assert np.max(np.abs(lam - np.pi**2 * (n + 0.5) ** 2)) < 1e-8
    assert np.max(np.abs(nu + np.log(np.pi * (n + 0.5)))) < 1e-8


@pytest.mark.parametrize("c", [-4.0, 2.5, 30.0])
def test_constant_potential_shift(c):
    recs = sp.eigenvalues(Potential.constant(c, 256), 0.0, 12)
    lam = np.array([r.lam for r in recs])
    assert np.allclose(lam, np.pi**2 * (np.arange(12) + 0.5) ** 2 + c, atol=1e-9)
    assert np.allclose([r.mu for r in recs], 0.0, atol=1e-9)


def test_robin_end_transcendental():
    """q = 0, b = 1: eigenvalues s^2 with tan s = -s."""
    recs = sp.eigenvalues(Potential.zero(512), 1.0, 8)
    for r in recs:
        n = r.n
        s = optimize.brentq(lambda s: math.tan(s) + s, np.pi * (n + 0.5) + 1e-9, np.pi * (n + 1) - 1e-12)
        assert r.lam == pytest.approx(s * s, abs=1e-9)


def test_negative_ground_state():
    """b < -1 pushes lambda_0 below zero; with k = sqrt(-lambda_0), k cosh k + b sinh k = 0."""
    b = -3.0
    r = sp.eigenvalue(Potential.zero(512), b, 0)
    assert r.lam < 0
    k = math.sqrt(-r.lam)
    assert k * math.cosh(k) + b * math.sinh(k) == pytest.approx(0.0, abs=1e-9)


def test_wdot_sign_alternates(bumpy):
    for r in sp.eigenvalues(bumpy, -0.4, 15):
        assert (-1) ** (r.n + 1) * r.wdot > 0


def test_norming_constant_consistent(cos_pi):
    for r in sp.eigenvalues(cos_pi, 0.3, 6):
        assert sp.norming_constant(cos_pi, 0.3, r) == pytest.approx(r.nu, abs=1e-13)


def test_norming_constant_sign_error(cos_pi):
    r = sp.eigenvalue(cos_pi, 0.3, 2)
    wrong = type("E", (), {"n": 1, "lam": r.lam})()
    with pytest.raises(SignError):
        sp.norming_constant(cos_pi, 0.3, wrong)


@pytest.mark.parametrize("qf,b", [(lambda x: np.cos(np.pi * x), 0.7), (lambda x: 1 + np.sin(3 * np.pi * x) + x**2, -0.4)])
def test_norm_identities(qf, b):
    q = pot(qf)
    for r in sp.eigenvalues(q, b, 21):
        s = r.sol
        bw = sh.solve_backward(q, b, r.lam)
        xi2 = integrate(bw.xi**2, q.h, 2 * bw.xi[0] * bw.xi_prime[0], 2 * bw.xi[-1] * bw.xi_prime[-1])
        assert sh.phi_norm2(s) == pytest.approx(-s.phi[-1] * r.wdot, abs=1e-7)
        assert xi2 == pytest.approx(-r.wdot / s.phi[-1], abs=1e-7)
        assert np.max(np.abs(r.psi**2 - s.phi * bw.xi / r.wdot)) < 1e-7


def test_eigencount_and_interlacing(bumpy):
    recs = sp.eigenvalues(bumpy, 0.2, 10)
    lam = np.array([r.lam for r in recs])
    assert np.all(np.diff(lam) > 0)
    for r in recs:
        assert sp.eigencount(bumpy, 0.2, r.lam - 1e-6) == r.n
        assert sp.eigencount(bumpy, 0.2, r.lam + 1e-6) == r.n + 1


def test_threads_agree(cos_pi):
    a = sp.eigenvalues(cos_pi, 0.1, 20, threads=1)
    b = sp.eigenvalues(cos_pi, 0.1, 20, threads=3)
    assert [r.lam for r in a] == [r.lam for r in b]


@pytest.mark.parametrize(
    "qf,b,N",
    [(lambda x: 0 * x, 0.0, 3), (lambda x: np.cos(np.pi * x), 0.7, 5), (lambda x: 20 * x - 10, -1.5, 4)],
)
def test_count_roots_matches_enumeration(qf, b, N):
    q = pot(qf, 512)
    inside = [r for r in sp.eigenvalues(q, b, N + 2) if abs(r.lam) < np.pi**2 * N**2]
    assert sp.count_roots(q, b, N) == len(inside) == N


def test_count_roots_rejects_bad_radius():
    with pytest.raises(ValueError):
        sp.count_roots(Potential.zero(64), 0.0, 0)


# -- Hadamard product ----------------------------------------------------------


def test_hadamard_unperturbed_is_cosine():
    data = sp.SpectralData(c=0.0, mu=np.zeros(40), dnu=np.zeros(40), b=0.0)
    for lam in (-20.0, 0.3, 17.0, 300.0):
        w, wd = sp.hadamard_w(data, lam)
        if lam > 0:
            k = math.sqrt(lam)
            assert w == pytest.approx(math.cos(k), abs=1e-12)
            assert wd == pytest.approx(-math.sin(k) / (2 * k), abs=1e-12)
        else:
            assert w == pytest.approx(math.cosh(math.sqrt(-lam)), rel=1e-12)


def test_hadamard_constant_shift():
    data = sp.SpectralData(c=5.0, mu=np.zeros(30), dnu=np.zeros(30), b=0.0)
    for lam in (1.0, 5.0, 40.0, 250.0):
        z = lam - 5.0
        expected = math.cos(math.sqrt(z)) if z >= 0 else math.cosh(math.sqrt(-z))
        assert sp.hadamard_w(data, lam)[0] == pytest.approx(expected, abs=1e-12)


def test_hadamard_matches_shooting(cos_pi):
    b = 0.7
    data = sp.spectral_data(cos_pi, b, 60)
    for lam in (-3.0, 10.0, 55.0, 123.4, 400.0):
        w, wd = sh.wronskian_value(cos_pi, b, lam)
        assert sp.hadamard_w(data, lam)[0] == pytest.approx(w, abs=1e-4)
        assert sp.hadamard_w(data, lam)[1] == pytest.approx(wd, abs=1e-4)


def test_hadamard_wdot_at_roots(cos_pi):
    recs = sp.eigenvalues(cos_pi, 0.7, 60)
    data = sp.spectral_data(cos_pi, 0.7, 60, records=recs)
    wd = sp.hadamard_wdot_at_roots(data)
    assert np.allclose(wd[:20], [r.wdot for r in recs[:20]], rtol=1e-5, atol=0)


# -- trace identity ------------------------------------------------------------


@pytest.mark.parametrize("b", [0.0, 0.7, -0.7])
def test_identity_residual(cos_pi, b):
    assert abs(sp.identity_residual(cos_pi, b, 200)) < 1e-5


def test_identity_terms_decay(cos_pi):
    t = sp.identity_terms(sp.eigenvalues(cos_pi, 0.4, 80))
    n = np.arange(40, 80) + 0.5
    slope = np.polyfit(np.log(n), np.log(np.abs(t[40:])), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.15)


def test_tail_estimate_exact_for_inverse_square():
    n = np.arange(100)
    t = 3.0 / (n + 0.5) ** 2
    tail = sp.tail_estimate(t)
    from scipy.special import zeta

    assert tail == pytest.approx(3.0 * zeta(2.0, 100.5), rel=1e-12)
    assert sp.tail_estimate(t[:5]) == 0.0


def test_fit_inverse_square_two_terms():
    z = np.arange(10, 40) + 0.5
    C, D = sp.fit_inverse_square(2.0 / z**2 - 7.0 / z**4, start=10, terms=2)
    assert (C, D) == (pytest.approx(2.0, rel=1e-10), pytest.approx(-7.0, rel=1e-8))


# -- SpectralData --------------------------------------------------------------


def test_spectral_data_json_round_trip(tmp_path, cos_pi):
    data = sp.spectral_data(cos_pi, 0.3, 10)
    path = tmp_path / "d.json"
    data.save(path)
    doc = json.loads(path.read_text())
    assert doc["N"] == 10 and doc["bc"] == {"a": "inf", "b": 0.3}
    back = sp.SpectralData.load(path)
    assert back.c == data.c
    assert np.array_equal(back.mu, data.mu) and np.array_equal(back.dnu, data.dnu)


def test_spectral_data_fields(cos_pi):
    recs = sp.eigenvalues(cos_pi, 0.3, 10)
    data = sp.spectral_data(cos_pi, 0.3, 10, records=recs)
    assert data.c == pytest.approx(0.6, abs=1e-12)
    assert np.allclose(data.eigenvalues, [r.lam for r in recs], atol=1e-12)
    assert np.allclose(data.nu, [r.nu for r in recs], atol=1e-12)
    assert data.mixed and data.offset == 0.5


def test_spectral_data_interlacing_violation():
    mu = np.zeros(5)
    mu[2] = -50.0  # lam_2 = 6.25 pi^2 - 50 < lam_1 = 2.25 pi^2
    with pytest.raises(InterlacingViolation):
        sp.SpectralData(c=0.0, mu=mu, dnu=np.zeros(5), b=0.0)


@pytest.mark.parametrize(
    "doc",
    [
        {"c": 0.0, "mu": [0.0], "dnu": [0.0, 1.0], "bc": {"a": "inf", "b": 0.0}},
        {"c": 0.0, "mu": [0.0], "dnu": [0.0], "N": 3, "bc": {"a": "inf", "b": 0.0}},
        {"c": 0.0, "mu": [0.0], "dnu": [0.0]},
        {"c": float("nan"), "mu": [0.0], "dnu": [0.0], "bc": {"b": 0.0}},
    ],
)
def test_spectral_data_rejects_malformed(doc):
    with pytest.raises(ValueError):
        sp.SpectralData.from_dict(doc)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ValueError):
        sp.SpectralData.load(p)


# -- properties ----------------------------------------------------------------


@settings(max_examples=10, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_mu_square_summable(a1, a2, b):
    """mu_n shrinks like n^-2 for smooth q (after the mean shift)."""
    q = pot(lambda x: a1 * np.cos(np.pi * x) + a2 * np.sin(2 * np.pi * x), 256)
    recs = sp.eigenvalues(q, b, 30)
    mu = np.abs([r.mu for r in recs])
    bound = (abs(a1) + abs(a2) + abs(b) + 1.0) ** 2 * 5.0
    assert np.all(mu[10:] * (np.arange(10, 30) + 0.5) ** 2 < bound)


@settings(max_examples=10, deadline=None)
@given(st.floats(-3, 3), st.floats(-2, 2))
def test_constant_shift_moves_spectrum(c, b):
    """q + c shifts every eigenvalue by c and leaves nu unchanged."""
    base = pot(lambda x: np.cos(np.pi * x), 256)
    r0 = sp.eigenvalues(base, b, 5)
    r1 = sp.eigenvalues(base + Potential.constant(c, 256), b, 5)
    for a, s in zip(r0, r1):
        assert s.lam - a.lam == pytest.approx(c, abs=1e-9)
        assert s.nu == pytest.approx(a.nu, abs=1e-9)
        assert s.mu == pytest.approx(a.mu, abs=1e-9)
