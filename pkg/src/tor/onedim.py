"""Exact solution of the collinear (scalar) return problem.

The scalar problem is ``x'' = u``, ``|u| <= 1``, ``x(0) = x(t_f) = 0``,
``v(0) = v0``, ``v(t_f) = -1``.  The optimal control is bang-bang with one
switch at normalized time ``tau* = 1/lam`` where ``lam`` solves

    lam**2 (1 - v0) - 4 lam + 2 v0 + 2 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

V_FINAL = -1.0
T_ZERO_SPEED = 1.0 + math.sqrt(2.0)


@dataclass(frozen=True)
class OneDimSolution:
    lam: float
    eta_sign: int
    t_f: float
    switch_fraction: float
    degenerate: bool = False
    v0: float = 0.0

    @property
    def switch_time(self) -> float:
        return self.switch_fraction * self.t_f

    @property
    def zero_control(self) -> bool:
        return self.t_f == 0.0


def _time_for(v0: float, lam: float) -> float:
    return lam * abs(v0 - V_FINAL) / abs(2.0 - lam)


def lambda_roots(v0: float) -> tuple[float, float]:
    """Both roots ``lam+`` and ``lam-`` of the switch quadratic (``v0 != 1``)."""
    if v0 == 1.0:
        raise ValueError("the switch quadratic degenerates at v0 = 1")
    disc = math.sqrt(2.0 + 2.0 * v0 * v0)
    return (2.0 + disc) / (1.0 - v0), (2.0 - disc) / (1.0 - v0)


def solve_one_dim(v0: float) -> OneDimSolution:
    v0 = float(v0)
    if v0 == V_FINAL:
        return OneDimSolution(lam=1.0, eta_sign=1, t_f=0.0, switch_fraction=1.0,
                              degenerate=True, v0=v0)
    if v0 == 1.0:
        # constant control u = -1 for the whole horizon; the quadratic is linear here
        return OneDimSolution(lam=1.0, eta_sign=-1, t_f=2.0, switch_fraction=1.0,
                              degenerate=True, v0=v0)
    best = None
    for lam in lambda_roots(v0):
        # lam -> 1+ as v0 -> 1+; rounding can push it a hair below 1
        if lam <= 1.0 - 1e-9 or lam == 2.0:
            continue
        lam = max(lam, 1.0)
        t_f = _time_for(v0, lam)
        if best is None or t_f < best[1]:
            best = (lam, t_f)
    lam, t_f = best
    sign = math.copysign(1.0, V_FINAL - v0) * math.copysign(1.0, 2.0 - lam)
    return OneDimSolution(lam=lam, eta_sign=int(sign), t_f=t_f,
                          switch_fraction=1.0 / lam, v0=v0)


def nonoptimal_reverse_solution() -> OneDimSolution:
    """The second extremal at ``v0 = -1``: ``t_f = 4``, ``u = sign(1 - 2 tau)``."""
    return OneDimSolution(lam=2.0, eta_sign=1, t_f=4.0, switch_fraction=0.5,
                          degenerate=True, v0=-1.0)


def one_dim_control(sol: OneDimSolution, tau: float) -> float:
    if sol.zero_control:
        return 0.0
    first = tau < sol.switch_fraction or sol.switch_fraction >= 1.0
    return sol.eta_sign * (1.0 if first else -1.0)


def one_dim_state(sol: OneDimSolution, v0: float, tau: float) -> tuple[float, float, float]:
    """Position, velocity and control at normalized time ``tau`` in [0, 1]."""
    if sol.zero_control:
        return 0.0, v0, 0.0
    lam, t_f, eta = sol.lam, sol.t_f, sol.eta_sign
    k = abs(lam * tau - 1.0)
    x = v0 * tau * t_f + eta * t_f**2 / (2.0 * lam**2) * (k * (1.0 - lam * tau) + 2.0 * lam * tau - 1.0)
    v = v0 + eta * t_f / lam * (1.0 - k)
    return x, v, one_dim_control(sol, tau)


def switching_curve(v: float, branch: int) -> float:
    """Phase-plane switching curve ``x = -v**2/2`` (branch +1) or ``+v**2/2`` (branch -1)."""
    if branch not in (1, -1):
        raise ValueError("branch must be +1 (upper) or -1 (lower)")
    return -branch * v * v / 2.0


def velocities_for_time(t_f: float) -> tuple[float, float]:
    """The two initial velocities ``(v0+, v0-)`` whose optimal return takes ``t_f``."""
    if t_f < 2.0:
        raise ValueError(f"no initial velocity needs less than 2 time units, got {t_f}")
    v_plus = -1.0 + t_f - math.sqrt(max(2.0 * t_f * t_f - 4.0 * t_f, 0.0))
    v_minus = -1.0 - t_f + math.sqrt(2.0 * t_f * t_f + 4.0 * t_f)
    return v_plus, v_minus


def v_star() -> float:
    return -math.sqrt(2.0) - 2.0 + math.sqrt(10.0 + 8.0 * math.sqrt(2.0))
