"""Parameter panels of the figure families and the acceptance suites."""

from __future__ import annotations

import math

import numpy as np

PI = math.pi

FIG1_SPEED = 3.0
FIG1_ALPHAS = tuple(f * PI for f in (0.1, 0.25, 0.5, 0.75, 0.9))
FIG2_ALPHA = 0.75 * PI
FIG2_SPEEDS = (0.3, 0.7, 1.0, 1.3)
FIG3_SPEEDS = (0.5, 0.7, 0.9, 1.0, 3.0)
FIG4_SPEEDS = (0.3, 0.7, 0.9, 1.0, 1.3, 3.0)
FIG5_SPEEDS = (0.0, 0.1, 0.5, 1.0, 1.1, 1.2, 1.3)
FIG6_SPEEDS = (0.0, 0.1, 0.3, 0.5, 0.7, 1.0)

TERMINAL_SPEEDS = (0.1, 0.5, 1.0, 1.3, 3.0)
MONOTONE_SPEEDS = (0.1, 0.5, 1.0, 1.3, 3.0)
BOUNDARY_SPEEDS = (0.5, 1.0, 3.0)
DUAL_SPEEDS = (2.0, 3.0, 5.0)
ORACLE_SPEEDS = (0.1, 0.5, 1.0, 1.3, 3.0)
ORACLE_ALPHAS = FIG1_ALPHAS


def terminal_alphas() -> np.ndarray:
    """33 points on [0, pi] including both ends."""
    return np.linspace(0.0, PI, 33)


def monotone_alphas() -> np.ndarray:
    """64 points k*pi/64 on [0, pi)."""
    return np.arange(64) * (PI / 64)


def interior_alphas() -> np.ndarray:
    """Open-interval grid for the control-angle bounds."""
    return np.arange(1, 64) * (PI / 64)


def fig6_alphas() -> np.ndarray:
    return np.linspace(0.0, PI / 2, 65)
