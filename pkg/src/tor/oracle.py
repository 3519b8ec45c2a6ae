"""Independent brute-force solvers used as ground truth.

None of these share evaluation code with :mod:`tor.kernels` or
:mod:`tor.solver`.  The grid oracle integrates the moment integrals
numerically, the direct oracle transcribes the control into piecewise-constant
unit directions and searches for the shortest feasible horizon, and the 1D
oracle enumerates two-phase bang-bang profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize



class OracleNonConvergence(RuntimeError):
    pass


# ---------------------------------------------------------------- 1D oracle

def bang_oracle_1d(v0: float) -> tuple[float, float]:
    """Shortest two-phase bang-bang return from ``(0, v0)`` to ``(0, -1)``.

    Phase 1 applies ``s`` for ``t1``, phase 2 applies ``-s`` for ``t2``.
    Velocity matching forces ``t2 = t1 + s (v0 + 1)`` and position matching
    leaves a quadratic in ``t1``.  Returns ``(t_f, t_switch)``.
    """
    v0 = float(v0)
    if v0 == -1.0:
        return 0.0, 0.0
    best = None
    dv = v0 + 1.0
    for s in (1.0, -1.0):
        # x(t_f) = s t1^2 + 2 v0 t1 + s dv (v0 - dv/2)
        qa = s
        qb = 2.0 * v0
        qc = s * dv * (v0 - dv / 2.0)
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0:
            continue
        for t1 in ((-qb + math.sqrt(disc)) / (2.0 * qa), (-qb - math.sqrt(disc)) / (2.0 * qa)):
            t2 = t1 + s * dv
            if t1 < -1e-14 or t2 < -1e-14:
                continue
            t1, t2 = max(t1, 0.0), max(t2, 0.0)
            if best is None or t1 + t2 < best[0]:
                best = (t1 + t2, t1)
    return best


# -------------------------------------------------------------- grid oracle

def _moment(k: int, mu: float, theta: float) -> float:
    sigma, sin2 = math.cos(theta), math.sin(theta) ** 2

    def f(s):
        return s**k / math.sqrt((mu * s - sigma) ** 2 + sin2)

    pts = None
    if mu > 0.0 and 0.0 < sigma / mu < 1.0:
        pts = [sigma / mu]
    # full_output returns quadpack diagnostics instead of warning
    out = integrate.quad(f, 0.0, 1.0, points=pts, epsabs=1e-14, epsrel=1e-13,
                         limit=400, full_output=1)
    return out[0]


def _quadrature_system(mu: float, theta: float, speed: float, alpha: float):
    """Residuals of the reduced system and ``t_f``, from numerical moments."""
    m0, m1, m2 = (_moment(k, mu, theta) for k in range(3))
    # v_f / t_f = -m2 zeta + m1 eta ; v0 / t_f = (m1 - m2) zeta + (m1 - m0) eta
    pz, pe = -m2, m1
    qz, qe = m1 - m2, m1 - m0
    ms = mu * math.cos(theta)
    gx = pz * pz * mu * mu + 2.0 * pz * pe * ms + pe * pe
    g0 = qz * qz * mu * mu + 2.0 * qz * qe * ms + qe * qe
    g1 = pz * qz * mu * mu + (pz * qe + pe * qz) * ms + pe * qe
    r1 = speed * speed * gx - g0
    r2 = -gx * speed * math.cos(alpha) - g1
    return r1, r2, gx ** -0.5


def _grid_residuals(mus, thetas, speed, alpha, nodes=96):
    """Vectorized residual norms on a grid via split Gauss-Legendre rules."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    M, T = np.meshgrid(mus, thetas, indexing="ij")
    S, S2 = np.cos(T), np.sin(T) ** 2
    split = np.clip(np.where(M > 0, S / np.where(M > 0, M, 1.0), 0.5), 1e-3, 1 - 1e-3)
    moments = np.zeros((3,) + M.shape)
    for lo, hi in ((np.zeros_like(split), split), (split, np.ones_like(split))):
        half = (hi - lo) / 2.0
        mid = (hi + lo) / 2.0
        for xi, wi in zip(x, w):
            s = mid + half * xi
            inv = 1.0 / np.sqrt((M * s - S) ** 2 + S2)
            moments += wi * half * np.stack([inv, s * inv, s * s * inv])
    m0, m1, m2 = moments
    pz, pe, qz, qe = -m2, m1, m1 - m2, m1 - m0
    ms = M * S
    gx = pz * pz * M * M + 2 * pz * pe * ms + pe * pe
    g0 = qz * qz * M * M + 2 * qz * qe * ms + qe * qe
    g1 = pz * qz * M * M + (pz * qe + pe * qz) * ms + pe * qe
    r1 = (speed * speed * gx - g0) / gx
    r2 = (-gx * speed * math.cos(alpha) - g1) / gx
    return np.hypot(r1, r2)


@dataclass(frozen=True)
class GridOracleResult:
    mu: float
    sigma: float
    t_f: float
    residual_norm: float
    resolution: float
    cell: tuple[float, float]


QUAD_ACCURACY = 1e-12


def _theta_grid(n: int) -> np.ndarray:
    # roots crowd toward sigma -> 1, so the small-angle end is geometric
    n_geo = n // 3
    geo = np.geomspace(1e-4, 0.3, n_geo, endpoint=False)
    return np.concatenate([geo, np.linspace(0.3, math.pi, n - n_geo + 1)[:-1]])


def grid_oracle(speed: float, alpha: float, n_mu: int = 120, n_sigma: int = 120,
                mu_max: float = 50.0, candidates: int = 6) -> GridOracleResult:
    """Exhaustive residual minimization over a (mu, sigma) grid.

    The grid is geometric in ``mu`` and in ``theta = arccos(sigma)`` near zero,
    uniform in ``theta`` elsewhere.  The best few grid local minima are refined
    by line minimizations along the coordinate axes and then along accumulated
    conjugate directions (Powell) in ``(log mu, log theta)``, on residuals
    built from adaptive quadrature of the moment integrals.  Among refined
    points with negligible residual the shortest ``t_f`` is returned, since the
    maximum principle admits several extremals.

    ``resolution`` bounds the ``t_f`` error as the spread of ``t_f`` over the
    final search cell, plus the linearized ``t_f`` offset to the root implied
    by the remaining residual and by the quadrature accuracy.
    """
    if n_mu < 2 or n_sigma < 6:
        raise ValueError("grid too small")
    mus = np.geomspace(1e-3, mu_max, n_mu)
    thetas = _theta_grid(n_sigma)
    norms = _grid_residuals(mus, thetas, speed, alpha)

    padded = np.pad(norms, 1, constant_values=np.inf)
    is_min = np.isfinite(norms)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= norms <= padded[1 + di:1 + di + n_mu, 1 + dj:1 + dj + n_sigma]
    idx = np.argwhere(is_min)
    order = np.argsort(norms[is_min])[:candidates]

    def scaled(z):
        if not (-12.0 < z[0] < 10.0 and -20.0 < z[1] < math.log(math.pi)):
            return math.inf
        r1, r2, tf = _quadrature_system(math.exp(z[0]), math.exp(z[1]), speed, alpha)
        gx = tf ** -2
        return math.hypot(r1 / gx, r2 / gx)

    refined = []
    for k in order:
        i, j = idx[k]
        z0 = np.array([math.log(mus[i]), math.log(thetas[j])])
        with np.errstate(invalid="ignore"):
            res = optimize.minimize(scaled, z0, method="Powell",
                                    options={"xtol": 1e-12, "ftol": 1e-16, "maxfev": 4000})
        mu, th = math.exp(res.x[0]), math.exp(res.x[1])
        r1, r2, tf = _quadrature_system(mu, th, speed, alpha)
        refined.append((mu, th, tf, math.hypot(r1, r2), i, j))

    good = [r for r in refined if r[3] < 1e-6]
    pick = min(good, key=lambda r: r[2]) if good else min(refined, key=lambda r: r[3])
    mu, th, tf, res, i, j = pick

    # t_f spread over the final cell (relative 1e-9 in each log coordinate)
    h = 1e-9
    corners = [(mu * math.exp(a * h), th * math.exp(b * h)) for a in (-1, 1) for b in (-1, 1)]
    spread = max(abs(_quadrature_system(cm, ct, speed, alpha)[2] - tf)
                 for cm, ct in corners)
    d_mu, d_th = 1e-6 * mu, 1e-6 * th
    base = np.array(_quadrature_system(mu, th, speed, alpha))
    col_mu = (np.array(_quadrature_system(mu + d_mu, th, speed, alpha)) - base) / d_mu
    col_th = (np.array(_quadrature_system(mu, th + d_th, speed, alpha)) - base) / d_th
    jac = np.column_stack([col_mu[:2], col_th[:2]])
    grad_tf = np.array([col_mu[2], col_th[2]])
    try:
        sens = np.abs(grad_tf @ np.linalg.inv(jac))
        offset = float(sens @ np.abs(base[:2]))
        # residuals are sums of products of moments of size ~ t_f**-2
        floor = float(sens.sum()) * QUAD_ACCURACY * tf ** -2
    except np.linalg.LinAlgError:
        offset = floor = math.inf
    i_hi, j_hi = min(i + 1, n_mu - 1), min(j + 1, n_sigma - 1)
    cell = (float(mus[i_hi] - mus[max(i - 1, 0)]),
            float(abs(math.cos(thetas[max(j - 1, 0)]) - math.cos(thetas[j_hi]))))
    return GridOracleResult(mu=mu, sigma=math.cos(th), t_f=tf, residual_norm=res,
                            resolution=spread + offset + floor, cell=cell)


# ------------------------------------------------------------ direct oracle

def _terminal_violation(angles, horizon, speed, alpha):
    n = angles.size
    h = horizon / n
    ux, uy = np.cos(angles), np.sin(angles)
    weight = h * h * (n - np.arange(n) - 0.5)
    v0 = speed * np.array([math.cos(alpha), math.sin(alpha)])
    vx = v0[0] + h * ux.sum() + 1.0
    vy = v0[1] + h * uy.sum()
    px = v0[0] * horizon + weight @ ux
    py = v0[1] * horizon + weight @ uy
    res = np.array([px, py, vx, vy])
    jac = np.vstack([-weight * uy, weight * ux, -h * uy, h * ux])
    return res, jac


def _feasible(horizon, speed, alpha, segments, tol, rng, restarts, warm):
    starts = [] if warm is None else [warm]
    starts += [rng.uniform(0.0, 2.0 * math.pi, segments) for _ in range(restarts)]
    best = None
    for x0 in starts:
        sol = optimize.least_squares(
            lambda a: _terminal_violation(a, horizon, speed, alpha)[0], x0,
            jac=lambda a: _terminal_violation(a, horizon, speed, alpha)[1],
            method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400,
        )
        viol = float(np.linalg.norm(sol.fun))
        if best is None or viol < best[0]:
            best = (viol, sol.x)
        if viol < tol:
            return True, sol.x
    return False, best[1]


def direct_oracle(speed: float, alpha: float, segments: int = 64, tol: float = 1e-4,
                  restarts: int = 8, rel_width: float = 1e-6, seed: int = 0) -> float:
    """Shortest horizon reachable with piecewise-constant unit steering.

    A horizon is feasible when some assignment of per-segment directions brings
    the terminal-condition violation (Euclidean norm of position and velocity
    errors) below ``tol``.  Feasibility is searched by nonlinear least squares
    from a warm start plus ``restarts`` random starts; the horizon is bisected.
    """
    if segments < 32:
        raise ValueError("direct_oracle needs at least 32 segments")
    rng = np.random.default_rng(seed)
    hi = 10.0 * (1.0 + speed)
    ok, warm = _feasible(hi, speed, alpha, segments, tol, rng, restarts, None)
    if not ok:
        raise OracleNonConvergence(f"horizon {hi} not feasible")
    lo = 0.0
    while hi - lo > rel_width * hi:
        mid = 0.5 * (lo + hi)
        ok, cand = _feasible(mid, speed, alpha, segments, tol, rng, restarts, warm)
        if ok:
            hi, warm = mid, cand
        else:
            lo = mid
    return hi
