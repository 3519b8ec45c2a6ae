"""Parameter sweeps over (speed, alpha) with continuation along alpha."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .solver import AdjointSolution, CanonicalProblem, NoConvergence, Solution, SolverConfig, solve
from .trajectory import control_angles

COLUMNS = ("speed", "alpha", "mu", "sigma", "t_f", "phi", "psi", "iters", "residual")


@dataclass
class SweepRow:
    speed: float
    alpha: float
    solution: Optional[Solution]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.solution is not None

    @property
    def t_f(self) -> float:
        return self.solution.t_f if self.solution is not None else math.nan

    def values(self) -> dict:
        """Row values keyed by :data:`COLUMNS`; numeric fields are None on failure."""
        out = dict.fromkeys(COLUMNS)
        out["speed"], out["alpha"] = self.speed, self.alpha
        sol = self.solution
        if sol is None:
            return out
        phi, psi = control_angles(sol)
        if isinstance(sol, AdjointSolution):
            out.update(mu=sol.mu, sigma=sol.sigma, iters=sol.newton_iters,
                       residual=sol.residual_norm)
        else:
            # collinear rows: zeta = lam * eta, hence mu = lam and sigma = 1
            out.update(mu=sol.lam if sol.t_f > 0 else 0.0, sigma=1.0, iters=0, residual=0.0)
        out.update(t_f=sol.t_f, phi=phi, psi=psi)
        return out


@dataclass(frozen=True)
class SweepSpec:
    speeds: tuple[float, ...]
    alpha_grid: int
    alpha_max: float = math.pi
    include_end: bool = True

    def __post_init__(self):
        if self.alpha_grid < 2:
            raise ValueError("alpha_grid must be >= 2")
        if not self.speeds or any(s < 0.0 for s in self.speeds):
            raise ValueError("speeds must be nonempty and nonnegative")

    def alphas(self) -> np.ndarray:
        if self.include_end:
            return np.linspace(0.0, self.alpha_max, self.alpha_grid)
        return np.arange(self.alpha_grid) * (self.alpha_max / self.alpha_grid)


def thread_count() -> int:
    env = os.environ.get("TOR_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def solve_family(speed: float, alphas: Sequence[float],
                 config: Optional[SolverConfig] = None) -> list[SweepRow]:
    """Solve along an alpha grid, seeding each point from the previous root."""
    rows = []
    previous = None
    for a in alphas:
        try:
            sol = solve(CanonicalProblem(float(speed), float(a)), config, previous)
        except NoConvergence as exc:
            rows.append(SweepRow(float(speed), float(a), None, str(exc)))
            previous = None
            continue
        rows.append(SweepRow(float(speed), float(a), sol))
        previous = (sol.mu, sol.sigma) if isinstance(sol, AdjointSolution) else None
    return rows


def run_sweep(spec: SweepSpec, config: Optional[SolverConfig] = None,
              threads: Optional[int] = None) -> list[SweepRow]:
    """Rows ordered by (speed, alpha).

    Each speed is one continuation chain; chains run on worker threads and are
    reassembled in input order.
    """
    alphas = spec.alphas()
    n = threads or thread_count()
    with ThreadPoolExecutor(max_workers=n) as pool:
        chains = list(pool.map(lambda s: solve_family(s, alphas, config), spec.speeds))
    return [row for chain in chains for row in chain]
