"""Leaf-constant approximation: interpolated heights between grid leaves.

On each quadrilateral spanned by the grid leaves ``c(j,k), c(j+1,k),
c(j,k+1), c(j+1,k+1)`` the height is ``j delta + delta chi(t)``, where ``t``
is constant on lines through the apex of the two "vertical" sides.  Heights
of vertically adjacent quadrilaterals are blended across their shared edge
with a ramp in the normalized fibre coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dual import Dual
from ..errors import ConfigurationError, DomainError, SingularityError
from ..estimates import separation_check
from ..lamination import LeafFamily
from .approximant import Approximant
from .chart import GridSpec, LeafChart
from .profiles import GLUE_MARGIN, chi_dual, cutoff_chi, glue_dual

APEX_EPS = 1e-14


def normalized_w(fam: LeafFamily, grid: GridSpec, j, k, z, w):
    """``(w - f_{c(j,k)}(z)) / (f_{c(j+1,k)}(z) - f_{c(j,k)}(z))``."""
    j, k = np.asarray(j), np.asarray(k)
    if np.any(np.abs(grid.label(j, k)) > 2 * grid.R * (1 + 1e-12)):
        raise IndexError("cell outside |c(j,k)| <= 2R")
    chart = LeafChart(fam, grid.center)
    z = np.asarray(z, complex)
    f0 = chart.leaf_values(grid.label(j, k), z)
    f1 = chart.leaf_values(grid.label(j + 1, k), z)
    out = (np.asarray(w, complex) - f0) / (f1 - f0)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class QuadFrame:
    """Normalized corner data of one quadrilateral at fixed ``z``.

    ``a_tilde`` is the corner near ``i`` and ``b_tilde`` the corner near
    ``1 + i`` in the normalized fibre coordinate.  The shear map sends
    ``a_tilde`` to ``(0, 1)`` and fixes the bottom edge.
    """

    a_tilde: complex
    b_tilde: complex
    j: int = 0
    k: int = 0

    @classmethod
    def from_corners(cls, a, b, j=0, k=0):
        """Build from corners given in the already-sheared plane (``a`` must be ``(0, 1)`` there)."""
        return cls(complex(*a), complex(*b), j, k)

    @classmethod
    def at(cls, fam: LeafFamily, grid: GridSpec, j: int, k: int, z) -> "QuadFrame":
        a = normalized_w(fam, grid, j, k, z, LeafChart(fam, grid.center).leaf_values(grid.label(j, k + 1), z))
        b = normalized_w(fam, grid, j, k, z, LeafChart(fam, grid.center).leaf_values(grid.label(j + 1, k + 1), z))
        return cls(complex(a), complex(b), j, k)

    @property
    def a(self):
        return self.a_tilde.real, self.a_tilde.imag

    def shear(self, y):
        """Apply the shear map to a normalized point given as complex ``y1 + i y2``."""
        a1, a2 = self.a
        y = complex(y)
        return complex(y.real - y.imag * a1 / a2, y.imag / a2)

    @property
    def b(self):
        bh = self.shear(self.b_tilde)
        return bh.real, bh.imag

    @property
    def apex(self) -> float:
        b1, b2 = self.b
        return math.inf if b1 == 1 else b2 / (b1 - 1)

    @property
    def shear_norm(self) -> float:
        a1, a2 = self.a
        return float(np.linalg.norm([[1, -a1 / a2], [0, 1 / a2]], 2))


def _t_hat(y1, y2, b1, b2):
    # lines through the apex (0, -L), L = b2/(b1 - 1); written without L so that b1 = 1 is regular
    return y1 * b2 / (b2 + y2 * (b1 - 1))


def leaf_parameter(frame: QuadFrame, y_hat) -> float:
    """Position along the bottom edge of the apex line through ``y_hat``."""
    if isinstance(y_hat, complex):
        y1, y2 = y_hat.real, y_hat.imag
    else:
        y1, y2 = y_hat
    b1, b2 = frame.b
    den = b2 + y2 * (b1 - 1)
    if abs(den) < APEX_EPS:
        raise SingularityError("point sits on the apex of the quadrilateral")
    return float(_t_hat(y1, y2, b1, b2))


def _frame_dual(origin: Dual, unit: Dual, top_left: Dual, top_right: Dual, w: Dual):
    """Sheared coordinates of ``w`` and of the far corner, all as duals."""
    den = unit - origin
    wt = (w - origin) / den
    at = (top_left - origin) / den
    bt = (top_right - origin) / den
    a1, a2 = at.real, at.imag
    slope = a1 / a2
    y1 = wt.real - wt.imag * slope
    y2 = wt.imag / a2
    b1 = bt.real - bt.imag * slope
    b2 = bt.imag / a2
    return wt, y1, y2, b1, b2


def _local_height_dual(delta, j, origin, unit, top_left, top_right, w):
    wt, y1, y2, b1, b2 = _frame_dual(origin, unit, top_left, top_right, w)
    den = b2 + y2 * (b1 - 1.0)
    if np.any(np.abs(den.val) < APEX_EPS):
        raise SingularityError("point sits on the apex of the quadrilateral")
    t = y1 * b2 / den
    return j * delta + delta * chi_dual(t), wt, y1, y2


def local_height(fam: LeafFamily, grid: GridSpec, j, k, z, w):
    """``j delta + delta chi(t_hat(A_z(w~_jk(z, w))))`` on the extended quadrilateral."""
    z = np.atleast_1d(np.asarray(z, complex))
    w = np.atleast_1d(np.asarray(w, complex))
    z, w = np.broadcast_arrays(z, w)
    j = np.broadcast_to(np.asarray(j), z.shape)
    k = np.broadcast_to(np.asarray(k), z.shape)
    chart = LeafChart(fam, grid.center)
    zd = Dual.seed_z(z)
    leaf = lambda dj, dk: chart.leaf(grid.label(j + dj, k + dk), zd)  # noqa: E731
    h, _, y1, y2 = _local_height_dual(grid.delta, j, leaf(0, 0), leaf(1, 0), leaf(0, 1), leaf(1, 1),
                                      Dual.seed_w(w))
    bad = (y2.val < -0.5) | (y2.val > 1.5) | (y1.val < -0.5) | (y1.val > 1.5)
    if np.any(bad):
        raise DomainError("point outside the extension strip of the quadrilateral")
    return h.val[()] if h.val.size == 1 else h.val


def height_dual(chart: LeafChart, delta: float, z: Dual, w: Dual) -> Dual:
    """The glued height ``h_delta`` and its gradient at chart points ``(z, w)`` (``w`` already in chart fibre)."""
    c = chart.param(z, w).val
    j = np.floor(c.real / delta).astype(np.int64)
    k = np.rint(c.imag / delta).astype(np.int64)
    cache = {}

    def leaf(dj, dk):
        if (dj, dk) not in cache:
            cache[dj, dk] = chart.leaf(((j + dj) + 1j * (k + dk)) * delta, z)
        return cache[dj, dk]

    h_up, _, _, y2 = _local_height_dual(delta, j, leaf(0, 0), leaf(1, 0), leaf(0, 1), leaf(1, 1), w)
    h_dn, _, _, _ = _local_height_dual(delta, j, leaf(0, -1), leaf(1, -1), leaf(0, 0), leaf(1, 0), w)
    phi = glue_dual(y2, GLUE_MARGIN)
    return phi * h_up + (1.0 - phi) * h_dn


def _chart_for(fam: LeafFamily, grid: GridSpec, target: str) -> LeafChart:
    if target in ("re", "Re"):
        return LeafChart(fam, grid.center, 1.0)
    if target in ("im", "Im"):
        return LeafChart(fam, grid.center, 1j)
    raise ConfigurationError(f"unknown target {target!r}; expected 're' or 'im'")


def glue_heights(fam: LeafFamily, grid: GridSpec, z, w, target: str = "re"):
    chart = _chart_for(fam, grid, target)
    z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
    shape = z.shape
    h = height_dual(chart, grid.delta, Dual.seed_z(z.ravel()), chart.fibre(Dual.seed_w(w.ravel())))
    out = h.val.reshape(shape)
    return out[()] if out.ndim == 0 else out


def leaf_constant_approximant(fam: LeafFamily, target: str, grid: GridSpec, check: bool = True) -> Approximant:
    """C1 approximant of ``Re pi`` (or ``Im pi``) that is nearly constant along leaves."""
    if check:
        rep = separation_check(fam, grid.delta, grid.t0, grid.R)
        if not rep.passed:
            raise ConfigurationError(
                f"grid too coarse: neighbouring leaves closer than delta^2 (ratio {rep.min_ratio:.3g})")
    chart = _chart_for(fam, grid, target)

    def evaluate(z, w):
        return height_dual(chart, grid.delta, Dual.seed_z(z), chart.fibre(Dual.seed_w(w)))

    return Approximant(evaluate, {
        "kind": "leaf_constant",
        "family": fam.label,
        "target": target,
        "delta": grid.delta,
        "t0": grid.t0,
        "R": grid.R,
        "center": grid.center,
        "cutoff": "smoothstep(2t - 1/2)",
        "glue_margin": GLUE_MARGIN,
    })


# -- measured constants -----------------------------------------------------------

def _sample_z(grid: GridSpec, n_radii: int, n_angles: int):
    r = np.linspace(0, grid.t0, n_radii + 1)
    th = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    rr, tt = np.meshgrid(r, th, indexing="ij")
    return grid.center + (rr * np.exp(1j * tt)).ravel()


def _cells_and_z(fam, grid, n_radii, n_angles, max_cells):
    j, k = grid.cells()
    if len(j) > max_cells:
        sel = np.linspace(0, len(j) - 1, max_cells).astype(int)
        j, k = j[sel], k[sel]
    z = _sample_z(grid, n_radii, n_angles)
    jj, zz = np.meshgrid(j, z, indexing="ij")
    kk, _ = np.meshgrid(k, z, indexing="ij")
    return jj.ravel(), kk.ravel(), zz.ravel()


def measure_gradient_constant(fam: LeafFamily, grid: GridSpec, n_y: int = 24, n_radii: int = 3,
                              n_angles: int = 8, max_cells: int = 200) -> float:
    """Largest sampled ``|grad_{w~} g~_jk| / delta`` over the extended quadrilaterals."""
    chart = LeafChart(fam, grid.center)
    j, k, z = _cells_and_z(fam, grid, n_radii, n_angles, max_cells)
    lab = lambda dj, dk: grid.label(j + dj, k + dk)  # noqa: E731
    f00 = chart.leaf_values(lab(0, 0), z)
    den = chart.leaf_values(lab(1, 0), z) - f00
    at = (chart.leaf_values(lab(0, 1), z) - f00) / den
    bt = (chart.leaf_values(lab(1, 1), z) - f00) / den
    ys = np.linspace(0, 1, n_y)
    y1, y2 = np.meshgrid(ys, np.linspace(-GLUE_MARGIN, 1, n_y), indexing="ij")
    y = (y1 + 1j * y2).ravel()
    worst = 0.0
    seed = np.array([1.0, 1.0j, 0.0, 0.0])
    for yv in y:
        yd = Dual(np.full(len(z), yv), np.broadcast_to(seed, (len(z), 4)).copy())
        zero = Dual(np.zeros(len(z), complex))
        one = Dual(np.ones(len(z), complex))
        h, *_ = _local_height_dual(grid.delta, j, zero, one, Dual(at), Dual(bt), yd)
        worst = max(worst, float(np.max(np.hypot(h.grad[:, 0].real, h.grad[:, 1].real))))
    return worst / grid.delta


def measure_plateau_band(fam: LeafFamily, grid: GridSpec, n_y: int = 41, n_radii: int = 3,
                         n_angles: int = 8, max_cells: int = 200) -> float:
    """Largest radius ``N1`` with ``h_jk == j delta`` whenever ``|w~| <= N1`` (sampled)."""
    chart = LeafChart(fam, grid.center)
    j, k, z = _cells_and_z(fam, grid, n_radii, n_angles, max_cells)
    lab = lambda dj, dk: grid.label(j + dj, k + dk)  # noqa: E731
    f00 = chart.leaf_values(lab(0, 0), z)
    den = chart.leaf_values(lab(1, 0), z) - f00
    at = (chart.leaf_values(lab(0, 1), z) - f00) / den
    bt = (chart.leaf_values(lab(1, 1), z) - f00) / den
    a1, a2 = at.real, at.imag
    b1 = bt.real - bt.imag * a1 / a2
    b2 = bt.imag / a2
    band = np.inf
    ys = np.linspace(0, 1, n_y)
    for y1 in ys:
        for y2 in np.linspace(-GLUE_MARGIN, 1, n_y):
            yh1 = y1 - y2 * a1 / a2
            yh2 = y2 / a2
            t = _t_hat(yh1, yh2, b1, b2)
            off = cutoff_chi(t) > 0
            if np.any(off):
                band = min(band, float(np.hypot(y1, y2)))
    return band


def quadrilateral_overlap_count(fam: LeafFamily, grid: GridSpec, n_w: int = 60, n_radii: int = 3,
                                n_angles: int = 6, window: float = 3.0) -> int:
    """Max number of quadrilateral interiors claiming one sampled fibre point.

    Checks the cells near the origin of the parameter plane on a dense
    ``n_w x n_w`` fibre grid of half-width ``window * delta``.
    """
    chart = LeafChart(fam, grid.center)
    n = int(math.ceil(window)) + 1
    jj, kk = np.meshgrid(np.arange(-n, n), np.arange(-n, n), indexing="ij")
    jj, kk = jj.ravel(), kk.ravel()
    g = np.linspace(-window * grid.delta, window * grid.delta, n_w)
    wx, wy = np.meshgrid(g, g, indexing="ij")
    wpts = (wx + 1j * wy).ravel() + 0.37e-3 * grid.delta * (1 + 1j)
    worst = 0
    for z in _sample_z(grid, n_radii, n_angles):
        corners = [chart.leaf_values(grid.label(jj + dj, kk + dk), z) for dj, dk in ((0, 0), (1, 0), (1, 1), (0, 1))]
        count = np.zeros(len(wpts), int)
        for c in range(len(jj)):
            poly = [corners[i][c] for i in range(4)]
            inside = np.ones(len(wpts), bool)
            for i in range(4):
                e = poly[(i + 1) % 4] - poly[i]
                cross = (np.conj(e) * (wpts - poly[i])).imag
                inside &= cross > 0
            count += inside
        worst = max(worst, int(count.max()))
    return worst
