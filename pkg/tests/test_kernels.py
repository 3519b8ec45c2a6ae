import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad, quad

from tor.kernels import (
    SERIES_THRESHOLD,
    KernelDomainError,
    KernelParams,
    coefficients,
    legendre_moments,
    log_V,
    position_kernels,
    radical_R,
    scalar_forms,
    velocity_kernels,
)

RHOS = (0.1, 0.5, 1.0, 3.0)
SIGMAS = (-0.9, -0.5, 0.0, 0.5, 0.9)
TIMES = (0.1, 0.5, 1.0, 2.0, 5.0)
GRID = [(r, s, t) for r in RHOS for s in SIGMAS for t in TIMES]
H = 1e-6


def _fd(f, t):
    return (f(t + H) - f(t - H)) / (2 * H)


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


class TestRadical:
    def test_zero_rho(self):
        assert radical_R(KernelParams(0.0, 0.3), 5.0) == 1.0

    def test_pythagorean(self):
        assert radical_R(KernelParams(1.0, 0.0), 1.0) == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_vector_norm(self):
        # xi, eta with |eta| = 1, |xi| = 1, (xi, eta) = 0.5
        xi = np.array([0.5, math.sqrt(0.75)])
        eta = np.array([1.0, 0.0])
        assert radical_R(KernelParams(1.0, 0.5), 1.0) == pytest.approx(np.linalg.norm(-xi + eta), abs=1e-15)

    def test_starts_at_one(self):
        assert radical_R(KernelParams(2.3, -0.4), 0.0) == 1.0

    def test_rejects_negative_time(self):
        with pytest.raises(KernelDomainError):
            radical_R(KernelParams(1.0, 0.0), -1.0)

    def test_rejects_bad_params(self):
        with pytest.raises(KernelDomainError):
            KernelParams(-1.0, 0.0)
        with pytest.raises(KernelDomainError):
            KernelParams(1.0, 1.5)


class TestLogV:
    def test_examples(self):
        assert log_V(KernelParams(1.0, 0.0), 0.0) == pytest.approx(0.0, abs=1e-15)
        assert log_V(KernelParams(1.0, 0.0), 1.0) == pytest.approx(math.log(1 + math.sqrt(2)), abs=1e-14)
        assert log_V(KernelParams(2.0, -0.5), 0.0) == pytest.approx(math.log(1.5), abs=1e-15)

    def test_matches_quadrature(self):
        val, _ = quad(lambda s: 1.0 / math.hypot(s, 1.0), 0.0, 1.0, epsabs=1e-14)
        assert log_V(KernelParams(1.0, 0.0), 1.0) == pytest.approx(val, abs=1e-12)

    def test_rejects_collinear_sigma(self):
        with pytest.raises(KernelDomainError):
            log_V(KernelParams(1.0, 1.0), 0.5)


class TestVelocityKernels:
    def test_zero_time(self):
        assert velocity_kernels(KernelParams(0.7, 0.2), 0.0) == (0.0, 0.0)

    def test_unit_case(self):
        vx, ve = velocity_kernels(KernelParams(1.0, 0.0), 1.0)
        assert vx == pytest.approx(-(math.sqrt(2) - 1), abs=1e-14)
        assert ve == pytest.approx(math.log(1 + math.sqrt(2)), abs=1e-14)

    def test_constant_control_limit(self):
        vx, ve = velocity_kernels(KernelParams(1e-9, 0.0), 2.0)
        assert vx == pytest.approx(-2.0, abs=1e-8)
        assert ve == pytest.approx(2.0, abs=1e-8)


class TestPositionKernels:
    def test_zero_time(self):
        assert position_kernels(KernelParams(0.7, 0.2), 0.0) == (0.0, 0.0)

    def test_unit_case_double_quadrature(self):
        p = KernelParams(1.0, 0.0)
        R = lambda s: math.hypot(s, 1.0)
        xx, _ = dblquad(lambda s, t: -s / R(s), 0.0, 1.0, 0.0, lambda t: t, epsabs=1e-13, epsrel=1e-13)
        xe, _ = dblquad(lambda s, t: 1.0 / R(s), 0.0, 1.0, 0.0, lambda t: t, epsabs=1e-13, epsrel=1e-13)
        got = position_kernels(p, 1.0)
        assert got[0] == pytest.approx(xx, abs=1e-10)
        assert got[1] == pytest.approx(xe, abs=1e-10)

    def test_constant_control_limit(self):
        xx, xe = position_kernels(KernelParams(1e-9, 0.0), 2.0)
        assert xx == pytest.approx(-4.0 / 3.0, abs=1e-7)
        assert xe == pytest.approx(2.0, abs=1e-7)


@pytest.mark.parametrize("rho,sigma,t", GRID)
def test_derivative_identities(rho, sigma, t):
    p = KernelParams(rho, sigma)
    R = radical_R(p, t)
    assert _rel(_fd(lambda s: log_V(p, s), t) * R, rho) <= 1e-6
    assert _rel(_fd(lambda s: velocity_kernels(p, s)[0], t), -t / R) <= 1e-6
    assert _rel(_fd(lambda s: velocity_kernels(p, s)[1], t), 1.0 / R) <= 1e-6
    vx, ve = velocity_kernels(p, t)
    assert _rel(_fd(lambda s: position_kernels(p, s)[0], t), vx) <= 1e-6
    assert _rel(_fd(lambda s: position_kernels(p, s)[1], t), ve) <= 1e-6


@pytest.mark.parametrize("rho,sigma,t", GRID)
def test_quadrature_equivalence(rho, sigma, t):
    p = KernelParams(rho, sigma)
    R = lambda s: math.sqrt(max((rho * s) ** 2 - 2 * sigma * rho * s + 1.0, 0.0))
    opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    ivx = lambda s: quad(lambda r: -r / R(r), 0.0, s, **opts)[0]
    ive = lambda s: quad(lambda r: 1.0 / R(r), 0.0, s, **opts)[0]
    vx, ve = velocity_kernels(p, t)
    assert vx == pytest.approx(ivx(t), abs=1e-9)
    assert ve == pytest.approx(ive(t), abs=1e-9)
    # x(t) = int_0^t (t - s) f(s) ds
    xx = quad(lambda s: -(t - s) * s / R(s), 0.0, t, **opts)[0]
    xe = quad(lambda s: (t - s) / R(s), 0.0, t, **opts)[0]
    px, pe = position_kernels(p, t)
    assert px == pytest.approx(xx, abs=1e-9)
    assert pe == pytest.approx(xe, abs=1e-9)


class TestCoefficients:
    def test_mu_zero(self):
        co = coefficients(0.0, 0.3)
        assert co.a == 0.0 and co.b == 0.0
        assert co.a_eta == 0.5 and co.b_eta == -1.0
        assert co.a_zeta == pytest.approx(-1.0 / 3.0, abs=1e-15)

    def test_unit_case(self):
        co = coefficients(1.0, 0.0)
        ln = math.log(1 + math.sqrt(2))
        assert co.a == pytest.approx(math.sqrt(2) - 1, abs=1e-15)
        assert co.b == pytest.approx(ln, abs=1e-15)
        # int_0^1 s^2 / sqrt(1 + s^2) ds = (sqrt 2 - asinh 1) / 2
        assert co.a_zeta == pytest.approx(-(math.sqrt(2) - ln) / 2, abs=1e-14)
        assert co.a_zeta == pytest.approx(-0.2664199876767761, abs=1e-14)
        assert co.a_eta == co.b_zeta == pytest.approx(math.sqrt(2) - 1, abs=1e-14)
        assert co.b_eta == pytest.approx(-ln, abs=1e-14)

    @pytest.mark.parametrize("mu", [1e-4, 1e-5, 1e-6])
    def test_small_mu_limits(self, mu):
        co = coefficients(mu, 0.0)
        assert co.a_zeta == pytest.approx(-1.0 / 3.0, abs=1e-4)
        assert co.a_eta == pytest.approx(0.5, abs=1e-4)
        assert co.b_eta == pytest.approx(-1.0, abs=1e-4)

    @pytest.mark.parametrize("sigma", SIGMAS)
    def test_crossover_continuity(self, sigma):
        series = [float(v) for v in legendre_moments(SERIES_THRESHOLD, sigma)]
        above = coefficients(SERIES_THRESHOLD, sigma)
        closed = (-above.b_eta, above.a_eta, -above.a_zeta)
        for s, c in zip(series, closed):
            assert s == pytest.approx(c, abs=1e-9)

    @pytest.mark.parametrize("sigma", SIGMAS)
    def test_moments_match_quadrature(self, sigma):
        for mu in (0.01, 0.3, 2.0, 20.0):
            co = coefficients(mu, sigma)
            R = lambda s: math.sqrt((mu * s - sigma) ** 2 + 1 - sigma**2)
            for k, val in ((0, -co.b_eta), (1, co.a_eta), (2, -co.a_zeta)):
                ref = quad(lambda s: s**k / R(s), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
                assert val == pytest.approx(ref, abs=1e-11)

    def test_vectorized_matches_scalar(self):
        mus = np.array([0.0, 0.01, 0.05, 0.3, 4.0])
        sig = np.array([0.3, -0.2, 0.6, 0.0, -0.9])
        vec = coefficients(mus, sig)
        for i in range(len(mus)):
            sc = coefficients(float(mus[i]), float(sig[i]))
            assert vec.a_zeta[i] == pytest.approx(sc.a_zeta, abs=1e-15)
            assert vec.b_eta[i] == pytest.approx(sc.b_eta, abs=1e-15)

    def test_rejects_collinear(self):
        with pytest.raises(KernelDomainError):
            coefficients(1.0, 1.0)
        with pytest.raises(KernelDomainError):
            coefficients(np.array([1.0]), np.array([1.0]))

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.0, 60.0), st.floats(-0.999, 0.999))
    def test_a_eta_equals_b_zeta(self, mu, sigma):
        co = coefficients(mu, sigma)
        assert co.a_eta == co.b_zeta
        assert all(math.isfinite(v) for v in (co.a_zeta, co.a_eta, co.b_eta))


class TestScalarForms:
    def test_small_mu_limit(self):
        assert scalar_forms(0.0, 0.0).fx2 == pytest.approx(0.25, abs=1e-15)
        assert scalar_forms(1e-6, 0.0).fx2 == pytest.approx(0.25, abs=1e-6)

    def test_unit_case(self):
        co = coefficients(1.0, 0.0)
        fv = scalar_forms(1.0, 0.0)
        assert fv.fx2 == pytest.approx(co.a_zeta**2 + co.a_eta**2, abs=1e-15)
        assert fv.fx2 == pytest.approx(0.24255248508750352, abs=1e-14)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.0, 60.0), st.floats(-0.999, 0.999))
    def test_squared_norms_nonnegative(self, mu, sigma):
        fv = scalar_forms(mu, sigma)
        assert fv.fx2 >= 0.0 and fv.f02 >= 0.0

    def test_forms_from_concrete_vectors(self):
        # f-forms equal norms and inner products of a_zeta zeta + a_eta eta etc.
        mu, sigma = 1.7, -0.35
        zeta = mu * np.array([sigma, math.sqrt(1 - sigma**2)])
        eta = np.array([1.0, 0.0])
        co = coefficients(mu, sigma)
        w1 = co.a_zeta * zeta + co.a_eta * eta
        w0 = (co.a_zeta + co.b_zeta) * zeta + (co.a_eta + co.b_eta) * eta
        fv = scalar_forms(mu, sigma)
        assert fv.fx2 == pytest.approx(w1 @ w1, abs=1e-14)
        assert fv.f02 == pytest.approx(w0 @ w0, abs=1e-14)
        assert fv.f12 == pytest.approx(w1 @ w0, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0), st.floats(0.0, 2 * math.pi))
def test_steering_law_unit_norm(x, y, ang):
    xi = np.array([x, y])
    eta = np.array([math.cos(ang), math.sin(ang)])
    rho = float(np.hypot(x, y))
    sigma = float(xi @ eta / rho) if rho > 0 else 0.0
    sigma = max(-1.0, min(1.0, sigma))
    for t in np.linspace(0.0, 3.0, 31):
        q = -xi * t + eta
        R = radical_R(KernelParams(rho, sigma), float(t))
        if R > 1e-6:
            assert abs(np.linalg.norm(q / R) - 1.0) <= 1e-12
