"""Sampling, geometry checks and forward verification of optimal trajectories.

Every function accepts either a planar :class:`~tor.solver.AdjointSolution`
or a collinear :class:`~tor.onedim.OneDimSolution`; the latter is embedded in
the plane along the abscissa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .onedim import OneDimSolution, one_dim_state
from .solver import AdjointSolution, CanonicalProblem, Solution, closed_form_state
from .vectors import TWO_PI, Vector2, direction_angle, vec2

ACCELERATING = "accelerating"
DECELERATING = "decelerating"
DEAD_BAND = 1e-12
ANGLE_TOL = 1e-7


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    x: Vector2
    v: Vector2
    u: Vector2

    @property
    def speed(self) -> float:
        return float(np.hypot(*self.v))


@dataclass
class SpeedRegimes:
    segments: list[tuple[float, float, str]]
    extrema: list[tuple[float, float, str]]

    @property
    def initial(self) -> str:
        return self.segments[0][2]

    @property
    def final(self) -> str:
        return self.segments[-1][2]


@dataclass
class TrajectoryReport:
    samples: list[TrajectorySample]
    terminal_position_error: float
    terminal_velocity_error: float
    phi: float
    psi: float
    polar_angle_monotone: bool
    in_angle_sector: bool
    speed_extrema: list[tuple[float, float, str]] = field(default_factory=list)


def control_samples(sol: Solution, t: np.ndarray) -> np.ndarray:
    """Vectorized control; returns an ``(len(t), 2)`` array."""
    t = np.asarray(t, dtype=float)
    if isinstance(sol, OneDimSolution):
        if sol.zero_control:
            return np.zeros((t.size, 2))
        tau = t / sol.t_f
        first = (tau < sol.switch_fraction) | (sol.switch_fraction >= 1.0)
        ux = sol.eta_sign * np.where(first, 1.0, -1.0)
        return np.column_stack([ux, np.zeros_like(ux)])
    q = sol.eta[None, :] - np.outer(t, sol.xi)
    return q / np.hypot(q[:, 0], q[:, 1])[:, None]


def control_at(sol: Solution, t: float) -> Vector2:
    return control_samples(sol, np.array([t]))[0]


def state_at(sol: Solution, problem: CanonicalProblem, t: float) -> tuple[Vector2, Vector2]:
    """Closed-form position and velocity at time ``t``."""
    if isinstance(sol, OneDimSolution):
        if sol.t_f == 0.0:
            return vec2(0.0, 0.0), vec2(sol.v0, 0.0)
        x, v, _ = one_dim_state(sol, sol.v0, t / sol.t_f)
        return vec2(x, 0.0), vec2(v, 0.0)
    return closed_form_state(problem, sol.zeta, sol.eta, sol.mu, sol.sigma, sol.t_f, t)


def control_angles(sol: Solution) -> tuple[float, float]:
    """Direction angles of the control at the initial and final instants."""
    return (direction_angle(control_at(sol, 0.0)),
            direction_angle(control_at(sol, sol.t_f)))


def initial_regime(problem: CanonicalProblem, phi: float) -> str:
    """Regime at t = 0 from the control direction: ``(v0, u) >= 0`` accelerates."""
    return ACCELERATING if math.cos(phi - problem.alpha) >= 0.0 else DECELERATING


def terminal_regime(psi: float) -> str:
    # v_f = (-1, 0): (v_f, u) = -cos(psi)
    return ACCELERATING if -math.cos(psi) >= 0.0 else DECELERATING


def _power(sol: Solution, problem: CanonicalProblem, t: float) -> float:
    _, v = state_at(sol, problem, t)
    return float(v @ control_at(sol, t))


def speed_regimes(sol: Solution, problem: CanonicalProblem, n: int = 256) -> SpeedRegimes:
    """Split ``[0, t_f]`` by the sign of ``d|v|^2/dt = 2 (v, u)``.

    Sign changes found on an ``n``-point grid are refined by root bracketing;
    a sign change across the bang-bang switch of the 1D solution is a jump
    rather than a zero and is located the same way.
    """
    if n < 16:
        raise ValueError("speed_regimes needs n >= 16")
    if sol.t_f == 0.0:
        return SpeedRegimes([(0.0, 0.0, ACCELERATING)], [])
    ts = np.linspace(0.0, sol.t_f, n)
    g = np.array([_power(sol, problem, t) for t in ts])
    signs = np.where(g > DEAD_BAND, 1, np.where(g < -DEAD_BAND, -1, 0))
    # zeros inside the dead band inherit the next non-zero sign
    nz = np.flatnonzero(signs)
    if nz.size == 0:
        return SpeedRegimes([(0.0, sol.t_f, ACCELERATING)], [])
    for i in range(n):
        if signs[i] == 0:
            later = nz[nz > i]
            signs[i] = signs[later[0]] if later.size else signs[nz[-1]]

    segments = []
    extrema = []
    start = 0.0
    for i in range(1, n):
        if signs[i] != signs[i - 1]:
            t0, t1 = ts[i - 1], ts[i]
            f = lambda t: _power(sol, problem, t)
            if f(t0) * f(t1) < 0.0:
                tz = brentq(f, t0, t1, xtol=1e-12, rtol=4 * np.finfo(float).eps)
            else:
                tz = 0.5 * (t0 + t1)
            regime = ACCELERATING if signs[i - 1] > 0 else DECELERATING
            segments.append((start, tz, regime))
            _, v = state_at(sol, problem, tz)
            extrema.append((tz, float(np.hypot(*v)), "max" if signs[i - 1] > 0 else "min"))
            start = tz
    segments.append((start, float(sol.t_f), ACCELERATING if signs[-1] > 0 else DECELERATING))
    return SpeedRegimes(segments, extrema)


def _polar_checks(xs: np.ndarray, alpha: float) -> tuple[bool, bool]:
    norms = np.hypot(xs[:, 0], xs[:, 1])
    if norms.max() == 0.0:
        return True, True
    keep = norms > 1e-6 * norms.max()
    keep[0] = keep[-1] = False
    if not keep.any():
        return True, True
    ang = np.arctan2(xs[keep, 1], xs[keep, 0])
    ang = np.where(ang < -ANGLE_TOL, ang + TWO_PI, ang)
    in_sector = bool(np.all((ang >= -ANGLE_TOL) & (ang <= alpha + ANGLE_TOL)))
    steps = np.diff(np.unwrap(ang))
    monotone = bool(np.all(steps <= ANGLE_TOL) or np.all(steps >= -ANGLE_TOL))
    return monotone, in_sector


def sample_trajectory(sol: Solution, problem: CanonicalProblem, n: int = 256) -> TrajectoryReport:
    """Sample ``n`` equally spaced states and evaluate the geometric properties.

    ``polar_angle_monotone`` checks that the polar angle of ``x(t)`` moves in
    one direction over the interior samples (``x = 0`` at both ends).
    ``in_angle_sector`` checks that ``x(t)`` stays between the direction of
    ``v0`` and the positive abscissa.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    ts = np.linspace(0.0, sol.t_f, n)
    us = control_samples(sol, ts)
    samples = []
    for t, u in zip(ts, us):
        x, v = state_at(sol, problem, float(t))
        samples.append(TrajectorySample(float(t), x, v, u))
    x_end, v_end = state_at(sol, problem, sol.t_f)
    xs = np.array([s.x for s in samples])
    monotone, in_sector = _polar_checks(xs, problem.alpha)
    phi, psi = control_angles(sol)
    extrema = speed_regimes(sol, problem, max(n, 16)).extrema if sol.t_f > 0 else []
    return TrajectoryReport(
        samples=samples,
        terminal_position_error=float(np.hypot(*x_end)),
        terminal_velocity_error=float(np.hypot(*(v_end - problem.v_f))),
        phi=phi, psi=psi,
        polar_angle_monotone=monotone, in_angle_sector=in_sector,
        speed_extrema=extrema,
    )


def _breakpoints(sol: Solution) -> list[float]:
    if isinstance(sol, OneDimSolution) and 0.0 < sol.switch_fraction < 1.0:
        return [0.0, sol.switch_time, sol.t_f]
    return [0.0, sol.t_f]


def forward_verify(problem: CanonicalProblem, sol: Solution, steps: int = 10_000) -> tuple[float, float]:
    """Integrate ``x' = v, v' = u(t)`` by classical fixed-step RK4.

    The open-loop control depends on time only, so the RK4 stages reduce to
    control samples at the step start, midpoint and end; the update is
    evaluated for all steps at once.  Control discontinuities (the 1D switch)
    are placed on step boundaries.  Returns terminal position and velocity
    errors.
    """
    if steps < 100:
        raise ValueError("forward_verify needs at least 100 steps")
    x = np.zeros(2)
    v = problem.v0.astype(float)
    if sol.t_f == 0.0:
        return float(np.hypot(*x)), float(np.hypot(*(v - problem.v_f)))
    knots = _breakpoints(sol)
    total = knots[-1] - knots[0]
    for a, b in zip(knots[:-1], knots[1:]):
        k = max(1, round(steps * (b - a) / total))
        h = (b - a) / k
        t0 = a + h * np.arange(k)
        if isinstance(sol, OneDimSolution):
            # constant between knots; sampling at the knot itself would pick the wrong side
            u_a = u_m = u_b = np.repeat(control_samples(sol, [0.5 * (a + b)]), k, axis=0)
        else:
            u_a = control_samples(sol, t0)
            u_m = control_samples(sol, t0 + 0.5 * h)
            u_b = control_samples(sol, np.append(t0[1:], b))
        dv = h / 6.0 * (u_a + 4.0 * u_m + u_b)
        v_start = v + np.vstack([np.zeros(2), np.cumsum(dv, axis=0)[:-1]])
        dx = h * v_start + h * h / 6.0 * (u_a + 2.0 * u_m)
        x = x + dx.sum(axis=0)
        v = v + dv.sum(axis=0)
    return float(np.hypot(*x)), float(np.hypot(*(v - problem.v_f)))
