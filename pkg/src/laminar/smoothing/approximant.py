"""Evaluable functions on the laminated chart: targets and their smooth approximants."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..dual import Dual
from ..lamination import LeafFamily


class Approximant:
    """A C1 function of ``(z, w)`` with an analytic real gradient.

    ``evaluate(z, w)`` takes flat complex arrays and returns a real
    :class:`~laminar.dual.Dual`; the gradient columns are
    ``d/dx1, d/dx2, d/dy1, d/dy2`` with ``z = x1 + i x2``, ``w = y1 + i y2``.
    """

    def __init__(self, evaluate: Callable[[np.ndarray, np.ndarray], Dual], provenance: dict | None = None):
        self._evaluate = evaluate
        self.provenance = dict(provenance or {})

    def dual(self, z, w) -> Dual:
        z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
        d = self._evaluate(z.ravel(), w.ravel())
        return Dual(d.val.real.reshape(z.shape), d.grad.real.reshape(z.shape + (4,)))

    def value(self, z, w):
        v = self.dual(z, w).val
        return v[()] if v.ndim == 0 else v

    __call__ = value

    def gradient(self, z, w):
        return self.dual(z, w).grad

    def __repr__(self):
        return f"Approximant({self.provenance.get('kind', '?')}, delta={self.provenance.get('delta')})"


@dataclass
class PartiallySmoothFn:
    """A continuous function with continuous leafwise partials.

    ``d_x1(z, w)`` is the derivative in ``x1`` of ``value`` restricted to the
    leaf through ``(z, w)``; likewise ``d_x2``.
    """

    value: Callable
    d_x1: Callable
    d_x2: Callable
    name: str = "phi"
    meta: dict = field(default_factory=dict)

    def __call__(self, z, w):
        return self.value(z, w)


def leaf_coordinate(fam: LeafFamily, part: str = "re") -> PartiallySmoothFn:
    """``Re pi`` or ``Im pi``: constant on every leaf."""
    take = np.real if part == "re" else np.imag

    def value(z, w):
        return take(fam._project(np.asarray(z, complex), np.asarray(w, complex))[0])

    zero = lambda z, w: np.zeros(np.broadcast(z, w).shape)  # noqa: E731
    return PartiallySmoothFn(value, zero, zero, name=f"{part}_pi")


def smooth_composite(fam: LeafFamily) -> PartiallySmoothFn:
    """``sin(2 Re pi) cos(Im pi) + x1^2 - x1 x2``: smooth in the leaf label, polynomial in ``z``."""

    def value(z, w):
        z = np.asarray(z, complex)
        c = fam._project(z, np.asarray(w, complex))[0]
        return np.sin(2 * c.real) * np.cos(c.imag) + z.real ** 2 - z.real * z.imag

    def d_x1(z, w):
        z = np.asarray(z, complex) + 0 * np.asarray(w)
        return 2 * z.real - z.imag

    def d_x2(z, w):
        z = np.asarray(z, complex) + 0 * np.asarray(w)
        return -z.real

    return PartiallySmoothFn(value, d_x1, d_x2, name="composite")


def kinked_composite(fam: LeafFamily, cut: float = 0.3) -> PartiallySmoothFn:
    """``|Re pi - cut| (1 + x1)``: Lipschitz but not C1 across the leaves ``Re pi = cut``."""

    def value(z, w):
        z = np.asarray(z, complex)
        c = fam._project(z, np.asarray(w, complex))[0]
        return np.abs(c.real - cut) * (1 + z.real)

    def d_x1(z, w):
        c = fam._project(np.asarray(z, complex), np.asarray(w, complex))[0]
        return np.abs(c.real - cut)

    def d_x2(z, w):
        return np.zeros(np.broadcast(z, w).shape)

    return PartiallySmoothFn(value, d_x1, d_x2, name="kinked")


def exact_approximant(fam: LeafFamily, phi: PartiallySmoothFn, gradient: Callable) -> Approximant:
    """Wrap a C1 target with a known full gradient as an :class:`Approximant`."""

    def evaluate(z, w):
        return Dual(np.asarray(phi.value(z, w), float), np.asarray(gradient(z, w), float))

    return Approximant(evaluate, {"kind": "exact", "family": fam.label, "target": phi.name})
