"""Reduction of general return problems to canonical form, and the speed duality.

A general problem has dynamics ``m x'' = F``, ``|F| <= u_max``, and asks to
leave ``x0`` at time ``t0`` with velocity ``v0`` and come back to ``x0`` with
velocity ``v_f``.  With

    t = t0 + T s,   x = x0 + L Rot(x~),   v = V Rot(v~),   F = u_max Rot(u~)

where ``V = |v_f|``, ``T = m V / u_max``, ``L = V T`` and ``Rot`` a rotation
(optionally preceded by a mirror in the abscissa), the problem becomes the
canonical one with ``v~_f = (-1, 0)`` and unit force bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .solver import CanonicalProblem, Solution
from .trajectory import control_at, state_at
from .vectors import TWO_PI, Vector2, direction_angle, rotate, vec2


@dataclass(frozen=True)
class GeneralProblem:
    mass: float
    u_max: float
    x0: Vector2
    v0: Vector2
    v_f: Vector2
    t0: float = 0.0

    def __post_init__(self):
        if not (self.mass > 0.0 and self.u_max > 0.0):
            raise ValueError("mass and u_max must be positive")
        if float(np.hypot(*self.v_f)) == 0.0:
            raise ValueError("terminal velocity must be nonzero")


@dataclass(frozen=True)
class NormalizationMap:
    rotation: float
    reflection: bool
    time_scale: float
    velocity_scale: float
    length_scale: float
    force_scale: float
    origin: Vector2
    t0: float = 0.0
    dualized: bool = False

    def vector(self, w: Vector2) -> Vector2:
        """Canonical direction to physical direction (no scaling)."""
        w = np.asarray(w, dtype=float)
        if self.reflection:
            w = vec2(w[0], -w[1])
        return rotate(w, self.rotation) if self.rotation else w.copy()

    def inverse_vector(self, w: Vector2) -> Vector2:
        w = rotate(np.asarray(w, dtype=float), -self.rotation) if self.rotation else np.asarray(w, dtype=float)
        return vec2(w[0], -w[1]) if self.reflection else w.copy()

    def time(self, s: float) -> float:
        return self.t0 + self.time_scale * s

    def position(self, x: Vector2) -> Vector2:
        return self.origin + self.length_scale * self.vector(x)

    def velocity(self, v: Vector2) -> Vector2:
        return self.velocity_scale * self.vector(v)

    def force(self, u: Vector2) -> Vector2:
        return self.force_scale * self.vector(u)


def canonicalize(gp: GeneralProblem) -> tuple[CanonicalProblem, NormalizationMap]:
    speed_f = float(np.hypot(*gp.v_f))
    time_scale = gp.mass * speed_f / gp.u_max
    # the rotation takes (-1, 0) to v_f / |v_f|
    rotation = direction_angle(gp.v_f) - math.pi
    if rotation == 0.0:
        w = np.asarray(gp.v0, dtype=float) / speed_f
    else:
        w = rotate(np.asarray(gp.v0, dtype=float), -rotation) / speed_f
    speed = float(np.hypot(*w))
    alpha = math.atan2(w[1], w[0])
    reflection = alpha < 0.0
    if reflection:
        alpha = -alpha
    nmap = NormalizationMap(
        rotation=rotation, reflection=reflection,
        time_scale=time_scale, velocity_scale=speed_f,
        length_scale=speed_f * time_scale, force_scale=gp.u_max,
        origin=np.asarray(gp.x0, dtype=float).copy(), t0=gp.t0,
    )
    return CanonicalProblem(speed, alpha, reflected=reflection), nmap


@dataclass(frozen=True)
class PhysicalTrajectory:
    """Trajectory of a canonical solution expressed in the original units."""

    solution: Solution
    problem: CanonicalProblem
    nmap: NormalizationMap

    @property
    def t_start(self) -> float:
        return self.nmap.t0

    @property
    def t_final(self) -> float:
        return self.nmap.time(self.solution.t_f)

    @property
    def duration(self) -> float:
        return self.nmap.time_scale * self.solution.t_f

    def _canonical_time(self, t: float) -> float:
        s = (t - self.nmap.t0) / self.nmap.time_scale
        return min(max(s, 0.0), self.solution.t_f)

    def force(self, t: float) -> Vector2:
        return self.nmap.force(control_at(self.solution, self._canonical_time(t)))

    def state(self, t: float) -> tuple[Vector2, Vector2]:
        x, v = state_at(self.solution, self.problem, self._canonical_time(t))
        return self.nmap.position(x), self.nmap.velocity(v)

    def sample(self, n: int) -> list[tuple[float, Vector2, Vector2, Vector2]]:
        out = []
        for t in np.linspace(self.t_start, self.t_final, n):
            x, v = self.state(t)
            out.append((float(t), x, v, self.force(t)))
        return out


def map_back(sol: Solution, problem: CanonicalProblem, nmap: NormalizationMap) -> PhysicalTrajectory:
    return PhysicalTrajectory(sol, problem, nmap)


@dataclass(frozen=True)
class DualMap:
    """Relation between a problem and its dual ``v0' = v0 / |v0|^2``.

    Times scale by the primal speed: ``t_f = speed * t_f'``.
    """

    primal: CanonicalProblem
    dual: CanonicalProblem

    @property
    def time_factor(self) -> float:
        return self.primal.speed

    def primal_time(self, dual_t_f: float) -> float:
        return self.primal.speed * dual_t_f


def dualize(p: CanonicalProblem) -> tuple[CanonicalProblem, DualMap]:
    if p.speed == 0.0:
        raise ValueError("the dual of a zero initial speed is undefined")
    dual = CanonicalProblem(1.0 / p.speed, p.alpha, reflected=p.reflected)
    return dual, DualMap(p, dual)


def dual_parameters(mu: float, sigma: float) -> tuple[float, float]:
    """``(mu', sigma')`` of the dual solution given the primal ``(mu, sigma)``.

    The dual trajectory is the primal one run backwards in time and rescaled,
    so its adjoint line is read from the other end:
    ``mu' = mu / R(mu)`` and ``sigma' = (mu - sigma) / R(mu)``.
    """
    R = math.sqrt((mu - sigma) ** 2 + (1.0 - sigma) * (1.0 + sigma))
    return mu / R, (mu - sigma) / R


def dual_initial_angle(alpha: float, psi: float) -> float:
    """Initial control direction of the dual problem from the primal final one."""
    return (alpha - psi) % TWO_PI

