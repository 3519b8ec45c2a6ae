"""Time-optimal return of a force-bounded point mass to its starting point.

The planar problem ``x'' = u``, ``|u| <= 1``, ``x(0) = x(t_f) = 0``,
``v(0) = v0``, ``v(t_f) = (-1, 0)`` is solved through the closed-form
steering law ``u = (-xi t + eta) / |-xi t + eta|`` and a two-equation
reduced system in ``(mu, sigma)``.
"""

from .kernels import CoefficientSet, FormValues, KernelDomainError, KernelParams, coefficients, scalar_forms
from .normalize import GeneralProblem, NormalizationMap, canonicalize, dualize, map_back
from .onedim import OneDimSolution, solve_one_dim
from .solver import (AdjointSolution, CanonicalProblem, NoConvergence, SingularRecovery,
                     SolverConfig, recover_adjoint, residuals, seed_candidates, solve)
from .trajectory import (TrajectoryReport, TrajectorySample, control_angles, control_at,
                         forward_verify, sample_trajectory, speed_regimes, state_at)

__all__ = [
    "AdjointSolution", "CanonicalProblem", "CoefficientSet", "FormValues", "GeneralProblem",
    "KernelDomainError", "KernelParams", "NoConvergence", "NormalizationMap", "OneDimSolution",
    "SingularRecovery", "SolverConfig", "TrajectoryReport", "TrajectorySample",
    "canonicalize", "coefficients", "control_angles", "control_at", "dualize", "forward_verify",
    "map_back", "recover_adjoint", "residuals", "sample_trajectory", "scalar_forms",
    "seed_candidates", "solve", "solve_one_dim", "speed_regimes", "state_at",
]
