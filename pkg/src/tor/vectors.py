"""Planar vector helpers.

Vectors are plain ``numpy`` arrays of shape ``(2,)``; this module only adds the
few conveniences the solver needs on top of them.
"""

from __future__ import annotations

import math

import numpy as np

Vector2 = np.ndarray

TWO_PI = 2.0 * math.pi


def vec2(x: float, y: float) -> Vector2:
    return np.array([float(x), float(y)])


def unit(angle: float) -> Vector2:
    return np.array([math.cos(angle), math.sin(angle)])


def direction_angle(w: Vector2) -> float:
    """Counterclockwise angle of ``w`` from the positive abscissa, in [0, 2*pi)."""
    ang = math.atan2(w[1], w[0])
    if ang < 0.0:
        ang += TWO_PI
    if ang >= TWO_PI:
        ang -= TWO_PI
    return ang


def rotate(w: Vector2, angle: float) -> Vector2:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * w[0] - s * w[1], s * w[0] + c * w[1]])


def cross(a: Vector2, b: Vector2) -> float:
    return float(a[0] * b[1] - a[1] * b[0])
