"""Closed-form kernels of the steering-law motion.

With the unit control ``u = Q/R``, ``Q = -xi*t + eta``, ``|eta| = 1``, the
velocity and position are linear in ``xi`` and ``eta``::

    v(t) = v0 + V_xi(t) xi + V_eta(t) eta
    x(t) = x0 + v0 t + X_xi(t) xi + X_eta(t) eta

All scalar kernels depend on ``rho = |xi|`` and ``sigma = (xi, eta)/rho`` only.
Every expression here is written in the dimensionless argument ``m = rho*t``
(``mu = rho*t_f`` at the terminal time).

The closed forms divide by up to ``m**3`` and lose digits for small ``m``.
Below :data:`SERIES_THRESHOLD` the kernels switch to the moment expansion

    S_k(m, sigma) = int_0^1 s**k / R(m s) ds = sum_n P_n(sigma) m**n / (n + k + 1)

which follows from the Legendre generating function ``1/R(s)``.  The series
converges for ``m < 1`` and any ``|sigma| <= 1``.

Functions accept scalars or numpy arrays (broadcasting) unless noted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SERIES_THRESHOLD = 0.05
SERIES_TERMS = 18
SIGMA_LIMIT = 1.0 - 1e-12
RADICAND_SLACK = 1e-12


class KernelDomainError(ValueError):
    """Kernel evaluated outside its admissible region (e.g. sigma -> 1)."""


@dataclass(frozen=True)
class KernelParams:
    rho: float
    sigma: float

    def __post_init__(self):
        if not (np.isfinite(self.rho) and np.isfinite(self.sigma)):
            raise KernelDomainError(f"non-finite kernel parameters {self}")
        if self.rho < 0.0:
            raise KernelDomainError(f"rho must be >= 0, got {self.rho}")
        if abs(self.sigma) > 1.0:
            raise KernelDomainError(f"|sigma| must be <= 1, got {self.sigma}")


@dataclass(frozen=True)
class CoefficientSet:
    a: float
    b: float
    a_zeta: float
    a_eta: float
    b_zeta: float
    b_eta: float


@dataclass(frozen=True)
class FormValues:
    fx2: float
    f02: float
    f12: float


def _check_sigma(sigma):
    if np.any(np.asarray(sigma) > SIGMA_LIMIT):
        raise KernelDomainError(
            "sigma too close to 1 (collinear geometry); use the one-dimensional solution"
        )


def _radical(m, sigma):
    # (m - sigma)^2 + (1 - sigma^2) is the radicand without cancellation
    return np.sqrt((m - sigma) ** 2 + (1.0 - sigma) * (1.0 + sigma))


def _a_b(m, sigma):
    """Return ``(R, a, b)`` with ``a = R(m) - 1`` and ``b = V(m) - V(0)``."""
    R = _radical(m, sigma)
    a = m * (m - 2.0 * sigma) / (R + 1.0)
    d = m - sigma
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(
            d >= 0.0,
            np.log((d + R) / (1.0 - sigma)),
            np.log((1.0 + sigma) / (R - d)),
        )
    # R(0) can round to 1 - ulp
    b = np.where(m == 0.0, 0.0, b)
    return R, a, b


def legendre_moments(m, sigma, terms: int = SERIES_TERMS):
    """Series values of ``S_0, S_1, S_2``; accurate for ``m`` well below 1."""
    m = np.asarray(m, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    p_prev = np.ones_like(m * sigma)
    p_cur = sigma * np.ones_like(p_prev)
    s0 = p_prev.copy()
    s1 = p_prev / 2.0
    s2 = p_prev / 3.0
    mp = np.ones_like(p_prev)
    for n in range(1, terms):
        mp = mp * m
        term = p_cur * mp
        s0 = s0 + term / (n + 1)
        s1 = s1 + term / (n + 2)
        s2 = s2 + term / (n + 3)
        p_prev, p_cur = p_cur, ((2 * n + 1) * sigma * p_cur - n * p_prev) / (n + 1)
    return s0, s1, s2


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def radical_R(params: KernelParams, t: float) -> float:
    if t < 0.0:
        raise KernelDomainError(f"t must be >= 0, got {t}")
    m = params.rho * t
    radicand = m * m - 2.0 * params.sigma * m + 1.0
    if radicand < -RADICAND_SLACK:
        raise KernelDomainError(f"negative radicand {radicand}")
    if m == 0.0:
        return 1.0
    return float(_radical(m, params.sigma))


def log_V(params: KernelParams, t: float) -> float:
    """``V(t) = ln(rho t - sigma + R(t))``, the antiderivative with dV/dt = rho/R."""
    _check_sigma(params.sigma)
    m = params.rho * t
    sigma = params.sigma
    R = _radical(m, sigma)
    d = m - sigma
    if d >= 0.0:
        return float(np.log(d + R))
    return float(np.log((1.0 - sigma) * (1.0 + sigma) / (R - d)))


def velocity_kernels(params: KernelParams, t: float) -> tuple[float, float]:
    """Return ``(V_xi, V_eta)``: integrals of ``-s/R`` and ``1/R`` over ``[0, t]``."""
    _check_sigma(params.sigma)
    rho, sigma = params.rho, params.sigma
    m = rho * t
    if m < SERIES_THRESHOLD:
        s0, s1, _ = legendre_moments(m, sigma)
        return float(-t * t * s1), float(t * s0)
    _, a, b = _a_b(m, sigma)
    return float(-(sigma * b + a) / rho**2), float(b / rho)


def position_kernels(params: KernelParams, t: float) -> tuple[float, float]:
    """Return ``(X_xi, X_eta)``, the time integrals of the velocity kernels."""
    _check_sigma(params.sigma)
    rho, sigma = params.rho, params.sigma
    m = rho * t
    if m < SERIES_THRESHOLD:
        s0, s1, s2 = legendre_moments(m, sigma)
        return float(-(t**3) * (s1 - s2)), float(t * t * (s0 - s1))
    R, a, b = _a_b(m, sigma)
    x_xi = ((3.0 * sigma - m) * R - 3.0 * sigma + 2.0 * m
            + (3.0 * sigma**2 - 1.0 - 2.0 * m * sigma) * b) / (2.0 * rho**3)
    x_eta = (-a + (m - sigma) * b) / rho**2
    return float(x_xi), float(x_eta)


def _coefficients_scalar(mu: float, sigma: float) -> CoefficientSet:
    if mu < 0.0:
        raise KernelDomainError("mu must be >= 0")
    if sigma > SIGMA_LIMIT:
        raise KernelDomainError("sigma too close to 1 (collinear geometry)")
    R = math.sqrt((mu - sigma) ** 2 + (1.0 - sigma) * (1.0 + sigma))
    a = mu * (mu - 2.0 * sigma) / (R + 1.0)
    d = mu - sigma
    b = math.log((d + R) / (1.0 - sigma)) if d >= 0.0 else math.log((1.0 + sigma) / (R - d))
    if mu == 0.0:
        b = 0.0
    if mu < SERIES_THRESHOLD:
        s0, s1, s2 = (float(v) for v in legendre_moments(mu, sigma))
        return CoefficientSet(a=a, b=b, a_zeta=-s2, a_eta=s1, b_zeta=s1, b_eta=-s0)
    a_zeta = -((mu + 3.0 * sigma) * a + mu + (3.0 * sigma**2 - 1.0) * b) / (2.0 * mu**3)
    a_eta = (a + sigma * b) / mu**2
    return CoefficientSet(a=a, b=b, a_zeta=a_zeta, a_eta=a_eta, b_zeta=a_eta, b_eta=-b / mu)


def coefficients(mu, sigma) -> CoefficientSet:
    """Terminal coefficients of the reduced system as functions of (mu, sigma).

    With ``zeta = xi * t_f`` the boundary conditions read
    ``v_f = t_f (a_zeta zeta + a_eta eta)`` and
    ``v0 - v_f = t_f (b_zeta zeta + b_eta eta)``.
    """
    if np.ndim(mu) == 0 and np.ndim(sigma) == 0:
        return _coefficients_scalar(float(mu), float(sigma))
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(mu < 0.0):
        raise KernelDomainError("mu must be >= 0")
    _check_sigma(sigma)
    _, a, b = _a_b(mu, sigma)
    small = mu < SERIES_THRESHOLD
    s0, s1, s2 = legendre_moments(np.where(small, mu, 0.0), sigma)
    safe = np.where(small, 1.0, mu)
    with np.errstate(divide="ignore", invalid="ignore"):
        a_zeta = -((safe + 3.0 * sigma) * a + safe + (3.0 * sigma**2 - 1.0) * b) / (2.0 * safe**3)
        a_eta = (a + sigma * b) / safe**2
        b_eta = -b / safe
    a_zeta = np.where(small, -s2, a_zeta)
    a_eta = np.where(small, s1, a_eta)
    b_eta = np.where(small, -s0, b_eta)
    return CoefficientSet(
        a=_scalar(a), b=_scalar(b),
        a_zeta=_scalar(a_zeta), a_eta=_scalar(a_eta),
        b_zeta=_scalar(a_eta), b_eta=_scalar(b_eta),
    )


def scalar_forms(mu, sigma) -> FormValues:
    """Quadratic and bilinear forms of the reduced system.

    ``fx2 = |a_zeta zeta + a_eta eta|^2`` (so ``t_f = fx2**-0.5``),
    ``f02 = |c_zeta zeta + c_eta eta|^2`` with ``c = a + b`` (so ``|v0|^2 = f02/fx2``)
    and ``f12`` the cross product of the two combinations
    (so ``(v0, v_f) = f12/fx2``).
    """
    co = coefficients(mu, sigma)
    if np.ndim(mu) or np.ndim(sigma):
        mu = np.asarray(mu, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
    az, ae = co.a_zeta, co.a_eta
    cz, ce = co.a_zeta + co.b_zeta, co.a_eta + co.b_eta
    ms = mu * sigma
    fx2 = az * az * mu * mu + 2.0 * az * ae * ms + ae * ae
    f02 = cz * cz * mu * mu + 2.0 * cz * ce * ms + ce * ce
    f12 = az * cz * mu * mu + (az * ce + ae * cz) * ms + ae * ce
    return FormValues(fx2=_scalar(fx2), f02=_scalar(f02), f12=_scalar(f12))
