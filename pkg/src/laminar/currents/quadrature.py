"""Tensor-product Gauss-Legendre rules on squares of the base disc."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError


@dataclass(frozen=True)
class Quadrature:
    """``order x order`` Gauss-Legendre rule on the square of half-width ``half_width`` about ``center``."""

    order: int = 64
    center: complex = 0j
    half_width: float = 0.5
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.order < 1:
            raise ConfigurationError("quadrature order must be positive")
        if not self.half_width > 0:
            raise ConfigurationError("half_width must be positive")
        x, w = np.polynomial.legendre.leggauss(self.order)
        x = self.half_width * x
        w = self.half_width * w
        X, Y = np.meshgrid(x, x, indexing="ij")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "nodes", (self.center + X + 1j * Y).ravel())
        object.__setattr__(self, "weights", np.outer(w, w).ravel())

    @property
    def corner_radius(self) -> float:
        return abs(self.center) + self.half_width * np.sqrt(2)

    def contains_disc(self, center: complex, radius: float) -> bool:
        d = complex(center) - self.center
        return abs(d.real) + radius <= self.half_width and abs(d.imag) + radius <= self.half_width

    def integrate(self, values) -> complex:
        """``sum w_i f(z_i)`` for values sampled at :attr:`nodes`."""
        return np.asarray(values) @ self.weights

    def area(self) -> float:
        return float(self.weights.sum())
