"""Sup and leafwise-C1 errors of approximants, and convergence sweeps in delta."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DomainError
from ..lamination import LeafFamily
from .approximant import Approximant, PartiallySmoothFn, leaf_coordinate
from .chart import GridSpec, LeafChart
from .heights import leaf_constant_approximant
from .interpolation import bump_interpolant

ZERO_FLOOR = 1e-10
FD_STEP = 1e-5


def leafwise_derivative(fn, fam: LeafFamily, c, z, axis: str = "x1", h: float = FD_STEP):
    """Derivative of ``s -> fn(s, f_c(s))`` along ``x1`` or ``x2`` at ``s = z``.

    Approximants are differentiated exactly by the chain rule through the
    leaf slope; plain callables fall back to central differences, shrinking
    the step near the edge of the base disc.
    """
    if axis not in ("x1", "x2"):
        raise ConfigurationError("axis must be 'x1' or 'x2'")
    c = np.asarray(c, complex)
    z = np.asarray(z, complex)
    c, z = np.broadcast_arrays(c, z)
    if isinstance(fn, Approximant):
        g = fn.gradient(z, fam._value(c, z))
        s = fam._slope(c, z)
        if axis == "x1":
            return g[..., 0] + g[..., 2] * s.real + g[..., 3] * s.imag
        return g[..., 1] + g[..., 2] * (-s.imag) + g[..., 3] * s.real
    e = 1.0 if axis == "x1" else 1j
    for _ in range(4):
        if np.all(np.abs(z) + h < fam.base_radius):
            break
        h /= 10
    else:
        raise DomainError("no room for a finite-difference step inside the base disc")
    zp, zm = z + h * e, z - h * e
    return (np.asarray(fn(zp, fam._value(c, zp))) - np.asarray(fn(zm, fam._value(c, zm)))) / (2 * h)


def sample_chart_points(fam: LeafFamily, grid: GridSpec, n: int, seed: int = 0, z_radius: float | None = None,
                        c_radius: float | None = None):
    """Random points on leaves through the chart: ``z`` near ``grid.center``, labels inside ``|c| <= c_radius``.

    Labels are leaf values at the chart centre, so points stay well inside the
    range covered by the grid.
    """
    rng = np.random.default_rng(seed)
    zr = grid.t0 if z_radius is None else z_radius
    cr = grid.R if c_radius is None else c_radius
    rz = zr * np.sqrt(rng.random(n))
    rc = cr * np.sqrt(rng.random(n))
    z = grid.center + rz * np.exp(2j * np.pi * rng.random(n))
    c_local = rc * np.exp(2j * np.pi * rng.random(n))
    c = LeafChart(fam, grid.center).global_label(c_local)
    return z, c, fam._value(c, z)


@dataclass
class ErrorReport:
    delta: float
    sup_err: float
    leaf_c1_err_x1: float
    leaf_c1_err_x2: float
    n_samples: int

    @property
    def leaf_c1_err(self) -> float:
        return max(self.leaf_c1_err_x1, self.leaf_c1_err_x2)


def error_report(psi: Approximant, phi: PartiallySmoothFn, fam: LeafFamily, grid: GridSpec,
                 n_samples: int = 4000, seed: int = 0, c_radius: float | None = None) -> ErrorReport:
    """``sup |psi - phi|`` and ``sup |d_x (psi|leaf) - d_x (phi|leaf)|`` over sampled chart points."""
    z, c, w = sample_chart_points(fam, grid, n_samples, seed, c_radius=c_radius)
    sup = float(np.max(np.abs(psi.value(z, w) - phi.value(z, w))))
    e1 = float(np.max(np.abs(leafwise_derivative(psi, fam, c, z, "x1") - phi.d_x1(z, w))))
    e2 = float(np.max(np.abs(leafwise_derivative(psi, fam, c, z, "x2") - phi.d_x2(z, w))))
    return ErrorReport(grid.delta, sup, e1, e2, n_samples)


def rate_model(delta):
    """The expected decay profile ``delta log(1 / (2 delta^2))``."""
    delta = np.asarray(delta, float)
    return delta * np.log(1 / (2 * delta ** 2))


@dataclass
class SweepResult:
    family: str
    target: str
    reports: list
    fit_constant: float = 0.0
    residual: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def deltas(self):
        return np.array([r.delta for r in self.reports])

    def fit_pred(self):
        return self.fit_constant * rate_model(self.deltas)

    def rows(self):
        pred = self.fit_pred()
        return [(r.delta, r.sup_err, r.leaf_c1_err_x1, r.leaf_c1_err_x2, p) for r, p in zip(self.reports, pred)]

    def to_csv(self, out=None) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["delta", "sup_err", "leaf_c1_x1", "leaf_c1_x2", "fit_pred"])
        for row in self.rows():
            wr.writerow(["%.17g" % v for v in row])
        text = buf.getvalue()
        if out is not None:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        return text


def fit_rate(deltas, errors, floor: float = ZERO_FLOOR):
    """Least-squares ``C`` in ``err ~ C delta log(1/(2 delta^2))`` and the relative max residual.

    Errors below ``floor`` count as exact zeros; an all-zero series fits with
    ``C = 0`` and residual 0.
    """
    y = np.where(np.asarray(errors, float) < floor, 0.0, np.asarray(errors, float))
    x = rate_model(deltas)
    if np.max(y) == 0:
        return 0.0, 0.0
    C = float(np.dot(x, y) / np.dot(x, x))
    return C, float(np.max(np.abs(y - C * x)) / np.max(y))


def convergence_sweep(fam: LeafFamily, target, delta_list, t0: float, R: float | None = None,
                      n_samples: int = 4000, seed: int = 0, check: bool = True,
                      c_radius: float | None = None, center: complex = 0j) -> SweepResult:
    """Error reports for a sequence of grid pitches.

    ``target`` is ``'re'``/``'im'`` (leaf-constant heights approximating the
    projection) or a :class:`PartiallySmoothFn` (bump interpolation).  The
    leafwise C1 error is fitted against ``delta log(1/(2 delta^2))``.
    """
    R = fam.R if R is None else R
    reports = []
    for d in sorted(delta_list, reverse=True):
        grid = GridSpec(float(d), t0, R, center)
        if isinstance(target, str):
            phi = leaf_coordinate(fam, target.lower())
            psi = leaf_constant_approximant(fam, target.lower(), grid, check=check)
        else:
            phi = target
            psi = bump_interpolant(fam, phi, grid)
        reports.append(error_report(psi, phi, fam, grid, n_samples, seed, c_radius=c_radius))
    errs = [r.leaf_c1_err for r in reports]
    C, res = fit_rate([r.delta for r in reports], errs)
    name = target if isinstance(target, str) else target.name
    return SweepResult(fam.label, name, reports, C, res, {"center": complex(center), "t0": t0})
