"""One-dimensional profiles: the C1 smoothstep, the cutoff, the gluing ramp, the cos^2 bumps."""

from __future__ import annotations

import numpy as np

from ..dual import Dual

CUTOFF_DERIVATIVE_BOUND = 3.0
GLUE_MARGIN = 0.25


def smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3 - 2 * u)


def smoothstep_derivative(u):
    inside = (u > 0) & (u < 1)
    return np.where(inside, 6 * u * (1 - u), 0.0)


def cutoff_chi(t):
    """C1 cutoff: 0 on ``t <= 1/4``, 1 on ``t >= 3/4``, ``|chi'| <= 3``."""
    return smoothstep(2 * np.asarray(t, float) - 0.5)


def cutoff_chi_derivative(t):
    return 2 * smoothstep_derivative(2 * np.asarray(t, float) - 0.5)


def chi_dual(t: Dual) -> Dual:
    return t.apply(cutoff_chi, cutoff_chi_derivative)


def glue_ramp(y2, margin: float = GLUE_MARGIN):
    """0 below ``-margin``, 1 above ``+margin``, smoothstep in between."""
    return smoothstep((np.asarray(y2, float) + margin) / (2 * margin))


def glue_ramp_derivative(y2, margin: float = GLUE_MARGIN):
    return smoothstep_derivative((np.asarray(y2, float) + margin) / (2 * margin)) / (2 * margin)


def glue_dual(y2: Dual, margin: float = GLUE_MARGIN) -> Dual:
    return y2.apply(lambda v: glue_ramp(v, margin), lambda v: glue_ramp_derivative(v, margin))


class BumpLambda:
    """The cos^2 bumps of pitch ``delta``; ``sum_j bump(j, t) == 1`` for every ``t``."""

    def __init__(self, delta: float):
        self.delta = float(delta)

    def value(self, j, t):
        s = (np.asarray(t, float) - np.asarray(j) * self.delta) / self.delta
        return np.where(np.abs(s) <= 1, np.cos(0.5 * np.pi * s) ** 2, 0.0)

    def derivative(self, j, t):
        s = (np.asarray(t, float) - np.asarray(j) * self.delta) / self.delta
        return np.where(np.abs(s) <= 1, -0.5 * np.pi / self.delta * np.sin(np.pi * s), 0.0)

    def dual(self, j, t: Dual) -> Dual:
        return Dual(self.value(j, t.val), self.derivative(j, t.val)[..., None] * t.grad)

    def partition_sum(self, t):
        t = np.asarray(t, float)
        j0 = np.floor(t / self.delta)
        return self.value(j0 - 1, t) + self.value(j0, t) + self.value(j0 + 1, t) + self.value(j0 + 2, t)
