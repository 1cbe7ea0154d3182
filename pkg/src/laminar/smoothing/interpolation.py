"""Bump interpolation of a partially smooth function from its values on grid leaves."""

from __future__ import annotations

import numpy as np

from ..dual import Dual
from ..lamination import LeafFamily
from .approximant import Approximant, PartiallySmoothFn
from .chart import GridSpec, LeafChart
from .profiles import BumpLambda


def bump_interpolant(fam: LeafFamily, phi: PartiallySmoothFn, grid: GridSpec,
                     coords: tuple[Approximant, Approximant] | None = None) -> Approximant:
    """``sum_jk phi(z, f_{c(j,k)}(z)) Lambda_j(Re pi) Lambda_k(Im pi)``.

    With ``coords=None`` the exact projection is used; since it is constant on
    leaves, the leafwise derivative of the result only sees the
    ``phi(z, f_{c(j,k)}(z))`` factors.  Passing a pair of leaf-constant
    approximants replaces ``(Re pi, Im pi)`` by C1 surrogates, which is the
    route that works when the projection itself is only continuous.
    """
    chart = LeafChart(fam, grid.center)
    lam = BumpLambda(grid.delta)
    delta = grid.delta

    def evaluate(z, w):
        if coords is None:
            c = chart.param(Dual.seed_z(z), Dual.seed_w(w))
            t1, t2 = c.real, c.imag
        else:
            t1, t2 = coords[0].dual(z, w), coords[1].dual(z, w)
        j0 = np.floor(t1.val / delta)
        k0 = np.floor(t2.val / delta)
        total = Dual(np.zeros(len(z)))
        for dj in (0, 1):
            lj = lam.dual(j0 + dj, t1)
            for dk in (0, 1):
                lk = lam.dual(k0 + dk, t2)
                g = chart.leaf_values(((j0 + dj) + 1j * (k0 + dk)) * delta, z)
                grad = np.zeros((len(z), 4))
                grad[:, 0] = phi.d_x1(z, g)
                grad[:, 1] = phi.d_x2(z, g)
                total = total + Dual(np.asarray(phi.value(z, g), float), grad) * lj * lk
        return total

    return Approximant(evaluate, {
        "kind": "bump_interpolant",
        "family": fam.label,
        "target": phi.name,
        "delta": delta,
        "center": grid.center,
        "projection": "exact" if coords is None else "smoothed",
    })
