"""Local views of a lamination: re-centred labels and optional rotation of the fibre."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dual import Dual
from ..errors import ConfigurationError
from ..lamination import LeafFamily


@dataclass(frozen=True)
class GridSpec:
    """A delta-grid of leaves ``c(j, k) = (j + k i) delta`` labelled by their value at ``center``."""

    delta: float
    t0: float
    R: float
    center: complex = 0j

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigurationError("delta must be positive")
        if not self.t0 > 0:
            raise ConfigurationError("t0 must be positive")
        object.__setattr__(self, "center", complex(self.center))

    def label(self, j, k):
        return (np.asarray(j) + 1j * np.asarray(k)) * self.delta

    def cells(self):
        from ..estimates import grid_cells

        return grid_cells(self.delta, self.R)


@dataclass(frozen=True)
class LeafChart:
    """Leaves of ``fam`` labelled by their value at ``center``, seen in the rotated fibre ``w' = conj(rotation) w``.

    With ``rotation = 1j`` the real part of the chart label is the imaginary
    part of the original label, which is how the ``Im`` target reuses the
    ``Re`` construction.
    """

    fam: LeafFamily
    center: complex = 0j
    rotation: complex = 1.0

    def global_label(self, c):
        c = self.rotation * np.asarray(c, complex)
        if self.center == 0:
            return c
        return self.fam._project(np.full(c.shape, self.center, complex), c)[0]

    def leaf_values(self, c, z):
        cg = self.global_label(c)
        return np.conj(self.rotation) * self.fam._value(cg, z)

    def leaf(self, c, z: Dual) -> Dual:
        cg = self.global_label(c)
        r = np.conj(self.rotation)
        return Dual.holomorphic(r * self.fam._value(cg, z.val), r * self.fam._slope(cg, z.val), z)

    def param_values(self, z, w):
        c = self.fam._project(z, self.rotation * w)[0]
        if self.center != 0:
            c = self.fam._value(c, self.center)
        return np.conj(self.rotation) * c

    def param(self, z: Dual, w: Dual) -> Dual:
        wg = self.rotation * w
        c, cz, cw = self.fam._project(z.val, wg.val)
        d = Dual.holomorphic(c, cz, z, cw, wg)
        if self.center != 0:
            d = Dual.holomorphic(self.fam._value(c, self.center), self.fam._dvalue_dc(c, self.center), d)
        return np.conj(self.rotation) * d

    def fibre(self, w: Dual) -> Dual:
        return np.conj(self.rotation) * w
