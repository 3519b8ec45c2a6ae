"""Newton solution of the reduced two-point boundary value problem.

In canonical units the unknowns are ``mu = |xi| t_f`` and ``sigma``, the cosine
of the angle between ``xi`` and ``eta``.  The boundary conditions reduce to

    |v0|^2 fx2 = f02,        fx2 |v0| c = f12,        t_f = fx2**-0.5

with ``c`` the cosine of the angle between ``v0`` and ``v_f``.  Once
``(mu, sigma)`` is known the vectors ``zeta = xi t_f`` and ``eta`` follow from a
2x2 linear solve.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import kernels
from .kernels import KernelDomainError, KernelParams
from .onedim import OneDimSolution, solve_one_dim
from .vectors import TWO_PI, Vector2, vec2

log = logging.getLogger(__name__)

V_FINAL = vec2(-1.0, 0.0)
THETA_MIN = math.sqrt(2.0 * (1.0 - kernels.SIGMA_LIMIT)) * 1.01


class NoConvergence(RuntimeError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


class SingularRecovery(RuntimeError):
    pass


@dataclass(frozen=True)
class CanonicalProblem:
    """Return to the origin with terminal velocity (-1, 0).

    ``alpha`` is the angle between ``v0`` and the positive abscissa.  Use
    :meth:`from_angle` for angles outside [0, pi]; they are mirrored across
    the abscissa and ``reflected`` is set.
    """

    speed: float
    alpha: float
    reflected: bool = False

    def __post_init__(self):
        if not (self.speed >= 0.0 and math.isfinite(self.speed)):
            raise ValueError(f"speed must be finite and >= 0, got {self.speed}")
        if not (0.0 <= self.alpha <= math.pi):
            raise ValueError(f"alpha must lie in [0, pi], got {self.alpha}; use from_angle")

    @classmethod
    def from_angle(cls, speed: float, alpha: float) -> "CanonicalProblem":
        a = math.fmod(alpha, TWO_PI)
        if a < 0.0:
            a += TWO_PI
        if a > math.pi:
            return cls(speed, TWO_PI - a, reflected=True)
        return cls(speed, a)

    @property
    def v0(self) -> Vector2:
        return self.speed * vec2(math.cos(self.alpha), math.sin(self.alpha))

    @property
    def v_f(self) -> Vector2:
        return V_FINAL.copy()

    @property
    def cos_c(self) -> float:
        """Cosine of the angle between v0 and v_f."""
        return -math.cos(self.alpha)


@dataclass
class SolverConfig:
    newton_tol: float = 1e-12
    max_iters: int = 60
    damping: float = 0.5
    min_step: float = 1e-6
    seed_grid: tuple[int, int] = (40, 39)
    mu_max: float = 50.0
    collinear_threshold: float = 1e-8
    speed_threshold: float = 1e-12
    continuation_steps: int = 16
    max_seeds: int = 8
    terminal_tol: float = 1e-8


@dataclass(frozen=True)
class AdjointSolution:
    mu: float
    sigma: float
    t_f: float
    zeta: Vector2
    eta: Vector2
    residual_norm: float
    newton_iters: int
    terminal_position_error: float = 0.0
    terminal_velocity_error: float = 0.0

    @property
    def xi(self) -> Vector2:
        return self.zeta / self.t_f

    @property
    def rho(self) -> float:
        return self.mu / self.t_f

    @property
    def params(self) -> KernelParams:
        return KernelParams(self.rho, self.sigma)


Solution = Union[AdjointSolution, OneDimSolution]


def residuals(mu, sigma, problem: CanonicalProblem):
    """Residuals ``(r1, r2)`` of the reduced system; zero at a solution."""
    fv = kernels.scalar_forms(mu, sigma)
    r1 = problem.speed**2 * fv.fx2 - fv.f02
    r2 = fv.fx2 * problem.speed * problem.cos_c - fv.f12
    return r1, r2


def _scaled_residuals(mu: float, theta: float, problem: CanonicalProblem) -> np.ndarray:
    # divided by fx2: mismatch in |v0|^2 and (v0, v_f), well scaled for large mu
    fv = kernels.scalar_forms(mu, math.cos(theta))
    r1 = problem.speed**2 - fv.f02 / fv.fx2
    r2 = problem.speed * problem.cos_c - fv.f12 / fv.fx2
    return np.array([r1, r2])


def _mu_ceiling(problem: CanonicalProblem, config: SolverConfig) -> float:
    # near-collinear roots sit close to the 1D switch parameter, which grows
    # without bound as the speed approaches 1 from below
    ceil = config.mu_max
    for v in (problem.speed, -problem.speed):
        if v != 1.0 and v != -1.0:
            ceil = max(ceil, 2.0 * solve_one_dim(v).lam)
    return ceil


def seed_candidates(problem: CanonicalProblem, config: SolverConfig,
                    previous: Optional[tuple[float, float]] = None) -> list[tuple[float, float]]:
    """Grid seeds ordered by scaled residual norm.

    Grid local minima come first, then the remaining points.  A continuation
    seed ``previous`` (a neighbouring solution's ``(mu, sigma)``) is placed
    ahead of everything; the collinear switch parameters are appended as
    fallbacks.
    """
    n_mu, n_sigma = config.seed_grid
    mus = np.geomspace(1e-2, _mu_ceiling(problem, config), n_mu)
    thetas = np.linspace(0.0, math.pi, n_sigma + 2)[1:-1]
    M, T = np.meshgrid(mus, thetas, indexing="ij")
    S = np.cos(T)
    fv = kernels.scalar_forms(M, S)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = (problem.speed**2 * fv.fx2 - fv.f02) / fv.fx2
        r2 = (fv.fx2 * problem.speed * problem.cos_c - fv.f12) / fv.fx2
        norms = np.hypot(r1, r2)
    norms = np.where(np.isfinite(norms), norms, np.inf)

    padded = np.pad(norms, 1, constant_values=np.inf)
    is_min = np.ones_like(norms, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= norms <= padded[1 + di:1 + di + n_mu, 1 + dj:1 + dj + n_sigma]
    is_min &= np.isfinite(norms)
    rank = np.lexsort((norms.ravel(), ~is_min.ravel()))
    seeds = [(float(M.flat[k]), float(S.flat[k])) for k in rank if np.isfinite(norms.flat[k])]

    if previous is not None:
        seeds.insert(0, (float(previous[0]), float(previous[1])))
    return seeds + _collinear_seeds(problem)


def _collinear_seeds(problem: CanonicalProblem) -> list[tuple[float, float]]:
    out = []
    for v in (problem.speed, -problem.speed):
        if abs(v) != 1.0:
            lam = solve_one_dim(v).lam
            if lam > 1.0:
                out.append((lam, math.cos(1e-2)))
    return out


def _polar(z):
    return z[0], math.cos(z[1])


def _cartesian(z):
    mu = math.hypot(z[0], z[1])
    if mu == 0.0:
        return 0.0, 0.0
    return mu, min(z[0] / mu, math.cos(THETA_MIN))


def _newton(problem: CanonicalProblem, config: SolverConfig, mu0: float, sigma0: float,
            mu_ceil: float, chart: str = "polar"):
    """Damped Newton on the scaled residuals.

    ``chart`` selects the unknowns: ``"polar"`` iterates on ``(mu, theta)`` with
    ``sigma = cos(theta)``, which resolves roots hugging ``sigma -> 1``;
    ``"cartesian"`` iterates on ``zeta`` in the frame of ``eta``,
    ``(mu sigma, mu sqrt(1 - sigma^2))``, which stays regular as ``mu -> 0``.
    Returns ``(mu, sigma, norm, iterations)`` or ``None``.
    """
    theta0 = math.acos(min(max(sigma0, -1.0), 1.0))
    if chart == "polar":
        to_params = _polar
        z = np.array([mu0, theta0])

        def clamp(w):
            return np.array([min(max(w[0], 1e-10), mu_ceil),
                             min(max(w[1], THETA_MIN), math.pi - 1e-6)])
    else:
        to_params = _cartesian
        z = np.array([mu0 * math.cos(theta0), mu0 * math.sin(theta0)])

        def clamp(w):
            # the residuals are even in the normal component
            w = np.array([w[0], abs(w[1])])
            mu = math.hypot(w[0], w[1])
            return w * (mu_ceil / mu) if mu > mu_ceil else w

    def evaluate(w):
        mu, sigma = to_params(w)
        return _scaled_residuals(mu, math.acos(sigma), problem)

    z = clamp(z)
    try:
        r = evaluate(z)
    except KernelDomainError:
        return None
    norm = float(np.linalg.norm(r))
    iters = 0
    while norm > config.newton_tol:
        if iters == config.max_iters:
            break
        iters += 1
        jac = np.empty((2, 2))
        for k in range(2):
            h = 1e-7 * max(1.0, abs(z[k]))
            zp, zm = z.copy(), z.copy()
            zp[k] += h
            zm[k] -= h
            if chart == "polar" and ((k == 0 and zm[0] < 0.0) or (k == 1 and zm[1] < THETA_MIN)):
                zm[k] = z[k]
            try:
                jac[:, k] = (evaluate(zp) - evaluate(zm)) / (zp[k] - zm[k])
            except KernelDomainError:
                return None
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        # near sigma -> 1 the residual floor can sit above newton_tol; a
        # negligible step there means the root is already resolved
        if norm <= 1e-9 and np.all(np.abs(step) <= 1e-12 * np.abs(z)):
            break
        lam = 1.0
        accepted = False
        while lam >= config.min_step:
            cand = clamp(z + lam * step)
            try:
                rc = evaluate(cand)
            except KernelDomainError:
                rc = None
            if rc is not None and np.all(np.isfinite(rc)):
                nc = float(np.linalg.norm(rc))
                if nc < (1.0 - 1e-4 * lam) * norm:
                    accepted = True
                    break
            lam *= config.damping
        if not accepted:
            break
        z, r, norm = cand, rc, nc
    # a stall at the evaluation noise floor still counts as converged
    if norm > max(config.newton_tol, 1e-9):
        return None
    mu, sigma = to_params(z)
    return mu, sigma, norm, iters


def recover_adjoint(mu: float, sigma: float, t_f: float,
                    problem: CanonicalProblem) -> tuple[Vector2, Vector2]:
    """Solve for ``zeta`` and ``eta`` from the terminal conditions."""
    co = kernels.coefficients(mu, sigma)
    mat = np.array([[co.a_zeta, co.a_eta], [co.b_zeta, co.b_eta]])
    scale = max(1.0, float(np.abs(mat).max())) ** 2
    if abs(np.linalg.det(mat)) < 1e-12 * scale:
        raise SingularRecovery(f"singular coefficient matrix at mu={mu}, sigma={sigma}")
    rhs = np.vstack([problem.v_f, problem.v0 - problem.v_f]) / t_f
    sol = np.linalg.solve(mat, rhs)
    return sol[0].copy(), sol[1].copy()


def closed_form_state(problem: CanonicalProblem, zeta: Vector2, eta: Vector2,
                      mu: float, sigma: float, t_f: float, t: float) -> tuple[Vector2, Vector2]:
    params = KernelParams(mu / t_f, sigma)
    xi = zeta / t_f
    v_xi, v_eta = kernels.velocity_kernels(params, t)
    x_xi, x_eta = kernels.position_kernels(params, t)
    v0 = problem.v0
    return v0 * t + x_xi * xi + x_eta * eta, v0 + v_xi * xi + v_eta * eta


def _assemble(problem, mu, sigma, iters):
    fv = kernels.scalar_forms(mu, sigma)
    t_f = fv.fx2 ** -0.5
    zeta, eta = recover_adjoint(mu, sigma, t_f, problem)
    x_end, v_end = closed_form_state(problem, zeta, eta, mu, sigma, t_f, t_f)
    r1, r2 = residuals(mu, sigma, problem)
    return AdjointSolution(
        mu=mu, sigma=sigma, t_f=t_f, zeta=zeta, eta=eta,
        residual_norm=math.hypot(r1, r2), newton_iters=iters,
        terminal_position_error=float(np.linalg.norm(x_end)),
        terminal_velocity_error=float(np.linalg.norm(v_end - problem.v_f)),
    )


def is_collinear(problem: CanonicalProblem, config: SolverConfig) -> bool:
    return (problem.speed < config.speed_threshold
            or math.sin(problem.alpha) < config.collinear_threshold)


def signed_speed(problem: CanonicalProblem) -> float:
    """Signed 1D initial velocity along the abscissa for collinear problems."""
    return problem.speed if math.cos(problem.alpha) >= 0.0 else -problem.speed


def solve(problem: CanonicalProblem, config: Optional[SolverConfig] = None,
          previous: Optional[tuple[float, float]] = None) -> Solution:
    """Time-optimal solution of ``problem``.

    Collinear problems return the exact :class:`OneDimSolution`.  Otherwise
    Newton runs from the continuation seed (if any) and the best grid seeds;
    every converged root is checked against the terminal conditions and the
    shortest verified one is returned.
    """
    config = config or SolverConfig()
    if is_collinear(problem, config):
        return solve_one_dim(signed_speed(problem))

    mu_ceil = _mu_ceiling(problem, config)
    seeds = seed_candidates(problem, config, previous)
    budget = config.max_seeds + (1 if previous is not None else 0)
    tried = seeds[:budget] + _collinear_seeds(problem)
    roots: list[AdjointSolution] = []
    best_res = math.inf
    for mu0, sigma0 in tried:
        out = (_newton(problem, config, mu0, sigma0, mu_ceil, "polar")
               or _newton(problem, config, mu0, sigma0, mu_ceil, "cartesian"))
        if out is None:
            continue
        mu, sigma, norm, iters = out
        best_res = min(best_res, norm)
        if any(abs(mu - r.mu) <= 1e-7 * max(1.0, mu) and abs(sigma - r.sigma) <= 1e-9 for r in roots):
            continue
        try:
            cand = _assemble(problem, mu, sigma, iters)
        except (SingularRecovery, KernelDomainError) as exc:
            log.debug("root rejected at mu=%g sigma=%g: %s", mu, sigma, exc)
            continue
        if max(cand.terminal_position_error, cand.terminal_velocity_error) > config.terminal_tol:
            log.debug("root at mu=%g sigma=%g failed terminal check", mu, sigma)
            continue
        roots.append(cand)
    if not roots:
        raise NoConvergence(
            f"no verified root for speed={problem.speed}, alpha={problem.alpha}", best_res)
    return min(roots, key=lambda r: r.t_f)


def optimal_time(sol: Solution) -> float:
    return sol.t_f
