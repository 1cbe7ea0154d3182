"""The cubic lamination of the plane (and its analogue in C^3): weakly directed but not directed,
and a leaf coordinate with no good C1 approximation."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as L

from .currents.quadrature import Quadrature
from .errors import ConfigurationError
from .lamination import RealCubicFamily, SpaceCurveFamily
from .smoothing.profiles import cutoff_chi, cutoff_chi_derivative

BOX = ((0.0, 1.0), (-1.0, 1.0))
OBSTRUCTION_TOL = 0.02


def leaf_coordinate(x, y):
    """``a(x, y) = t`` on the curve ``y = (x - t)^3``."""
    return RealCubicFamily.project(x, y)


# -- tangency and weak directedness ---------------------------------------------

@dataclass
class TangencyReport:
    max_value: float
    max_slope: float
    max_c3_deviation: float

    @property
    def passed(self) -> bool:
        return self.max_value == 0 and self.max_slope == 0 and self.max_c3_deviation == 0


def cubic_tangency_check(sample_ts, complex_ts=None) -> TangencyReport:
    """Each curve meets the axis at its own parameter with zero slope; the C^3 curves are tangent to the z-axis."""
    t = np.asarray(sample_ts, float)
    val = np.max(np.abs(RealCubicFamily.value(t, t)), initial=0.0)
    slope = np.max(np.abs(RealCubicFamily.slope(t, t)), initial=0.0)
    tc = np.asarray(t if complex_ts is None else complex_ts, complex)
    v = SpaceCurveFamily.tangent(tc, tc)
    dev = np.max(np.abs(np.asarray(v[0]) - 1), initial=0.0)
    dev = max(dev, np.max(np.abs(v[1]), initial=0.0), np.max(np.abs(v[2]), initial=0.0))
    return TangencyReport(float(val), float(slope), float(dev))


def _default_g(x):
    return np.exp(-np.asarray(x) ** 2)


def axis_weak_directedness(segment=(-1.0, 1.0), order: int = 64, g=None, control: bool = False) -> float:
    """Pair the x-axis current on ``segment`` with ``g lambda``, ``lambda = dy - f'_t(x) dx``, ``t = a(x, 0)``.

    Along the axis only the ``dx`` part contributes, and it is ``-g f'_{a(x,0)}(x)``.
    ``control=True`` uses ``dx`` in place of ``lambda``.
    """
    g = _default_g if g is None else g
    lo, hi = map(float, segment)
    if not hi > lo:
        raise ConfigurationError("segment must be increasing")
    x, w = L.leggauss(order)
    x = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * w
    if control:
        dx_coef = np.ones_like(x)
    else:
        t = leaf_coordinate(x, np.zeros_like(x))
        dx_coef = -RealCubicFamily.slope(t, x)
    return float(abs(np.sum(w * g(x) * dx_coef)))


def axis_weak_directedness_c3(radius: float = 0.4, order: int = 64, g=None, control: bool = False) -> float:
    """Pair the z-axis current on ``[-radius, radius]^2`` with ``g(z) (lambda_w + lambda_tau) ^ dzb``.

    ``lambda_w = dw - 2(z - t) dz`` and ``lambda_tau = dtau - 3(z - t)^2 dz`` with
    ``t`` the leaf through the point; ``control=True`` uses ``dz`` instead.
    """
    g = (lambda z: np.exp(-np.abs(z) ** 2)) if g is None else g
    quad = Quadrature(order, 0j, radius)
    z = quad.nodes
    zero = np.zeros_like(z)
    if control:
        dz_coef = np.ones_like(z)
    else:
        t = SpaceCurveFamily.project(z, zero, zero)
        dz_coef = -2 * (z - t) - 3 * (z - t) ** 2
    # dz ^ dzb = -2i dA on the axis
    return float(abs(-2j * quad.integrate(g(z) * dz_coef)))


# -- the mass-bound witness -----------------------------------------------------

def witness_bump(u):
    """``(1 - u^2)^2`` on ``|u| < 1``: a polynomial bump with ``bump(0) = 1``."""
    u = np.asarray(u, float)
    return np.where(np.abs(u) < 1, (1 - u * u) ** 2, 0.0)


_GL_X, _GL_W = L.leggauss(16)


def _gl(f, a, b):
    if b <= a:
        return 0.0
    x = 0.5 * (b - a) * _GL_X + 0.5 * (b + a)
    return float(0.5 * (b - a) * np.sum(_GL_W * f(x)))


def leaf_pairing(t: float, eps: float, x_range=(-1.0, 1.0)) -> float:
    """``int bump((x - t)^3 / eps) dx`` over ``x_range``.

    The integrand is a degree-12 polynomial on each side of ``t`` inside its
    support, so a 16-point Gauss rule per piece is exact.
    """
    r = eps ** (1 / 3)
    f = lambda x: witness_bump((x - t) ** 3 / eps)  # noqa: E731
    lo, hi = x_range
    return _gl(f, max(lo, t - r), min(hi, t)) + _gl(f, max(lo, t), min(hi, t + r))


def axis_pairing(eps: float, x_range=(-1.0, 1.0)) -> float:
    """``int bump(0 / eps) dx`` along the axis segment."""
    return _gl(lambda x: witness_bump(np.zeros_like(x) / eps), *x_range)


@dataclass
class WitnessReport:
    eps: np.ndarray
    axis: np.ndarray
    leaf: np.ndarray
    exponent: float
    constant: float
    mass_bound: float

    @property
    def eps_threshold(self) -> float:
        """Below this ``eps`` no measure of mass ``<= M`` on leaves can reproduce the axis pairing."""
        return float((self.axis[0] / (self.mass_bound * self.constant)) ** 3)

    @property
    def contradiction(self) -> bool:
        return bool(np.min(self.eps) < self.eps_threshold)

    @property
    def axis_ratio_spread(self) -> float:
        return float(np.max(np.abs(self.axis / self.axis[0] - 1)))

    def to_csv(self, out=None) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["epsilon", "axis_pairing", "leaf_pairing", "exponent_fit"])
        for e, a, l in zip(self.eps, self.axis, self.leaf):
            wr.writerow(["%.17g" % e, "%.17g" % a, "%.17g" % l, "%.17g" % self.exponent])
        text = buf.getvalue()
        if out is not None:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        return text


def non_directedness_witness(mass_bound: float = 10.0, eps_list=(1e-2, 1e-3, 1e-4, 1e-5), t: float = 0.0,
                             n_leaves: int = 41) -> WitnessReport:
    """Pair ``bump(y/eps) dx`` with the axis and with single leaves as ``eps`` shrinks.

    The axis pairing stays at ``2`` while every leaf pairing is at most
    ``C eps^(1/3)``; ``C`` is the sup over ``n_leaves`` leaves of
    ``leaf_pairing / eps^(1/3)``.
    """
    eps = np.asarray(eps_list, float)
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ConfigurationError("eps_list must be positive and strictly decreasing")
    axis = np.array([axis_pairing(e) for e in eps])
    leaf = np.array([leaf_pairing(t, e) for e in eps])
    slope = float(np.polyfit(np.log(eps), np.log(leaf), 1)[0]) if len(eps) > 1 else float("nan")
    ts = np.linspace(-1, 1, n_leaves)
    const = max(leaf_pairing(tt, e) / e ** (1 / 3) for tt in ts for e in eps)
    return WitnessReport(eps, axis, leaf, slope, float(const), float(mass_bound))


# -- C1 candidates and the obstruction -----------------------------------------

@dataclass
class Candidate:
    """A C1 function of ``(x, y)`` with value and gradient; ``gradient`` returns ``(d/dx, d/dy)``."""

    name: str
    value: callable
    gradient: callable = None
    meta: dict = field(default_factory=dict)


class CubicHeight:
    """The grid-leaf height construction run on the cubic family.

    Between grid leaves ``t_j = j delta`` and ``t_{j+1}`` the normalized fibre
    coordinate ``y~ = (y - f_{t_j}(x)) / (f_{t_{j+1}}(x) - f_{t_j}(x))`` runs
    from 0 to 1 and the height is ``j delta + delta chi(y~)``.  It is C1 in
    ``(x, y)`` but has no reason to be nearly constant along leaves where they
    are tangent to each other.
    """

    def __init__(self, delta: float):
        if not delta > 0:
            raise ConfigurationError("delta must be positive")
        self.delta = float(delta)

    def _parts(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        d = self.delta
        j = np.floor(leaf_coordinate(x, y) / d)
        t0, t1 = j * d, (j + 1) * d
        f0, f1 = RealCubicFamily.value(t0, x), RealCubicFamily.value(t1, x)
        s0, s1 = RealCubicFamily.slope(t0, x), RealCubicFamily.slope(t1, x)
        den = f1 - f0
        yt = (y - f0) / den
        dyt_dx = (-s0 * den - (y - f0) * (s1 - s0)) / den ** 2
        dyt_dy = 1 / den
        return j, yt, dyt_dx, dyt_dy

    def value(self, x, y):
        j, yt, _, _ = self._parts(x, y)
        return j * self.delta + self.delta * cutoff_chi(yt)

    def gradient(self, x, y):
        _, yt, gx, gy = self._parts(x, y)
        dchi = self.delta * cutoff_chi_derivative(yt)
        return dchi * gx, dchi * gy


_MOLL_NORM = 35 / 32


class MollifiedLeafCoordinate:
    """``a`` convolved in ``y`` with ``(35/32r) (1 - (u/r)^2)^3``; the x part is linear and unchanged."""

    def __init__(self, radius: float, nodes: int = 48):
        if not radius > 0:
            raise ConfigurationError("mollification radius must be positive")
        self.r = float(radius)
        self._x, self._w = L.leggauss(nodes)

    def _kernel(self, u):
        s = u / self.r
        return np.where(np.abs(s) < 1, _MOLL_NORM / self.r * (1 - s * s) ** 3, 0.0)

    def _kernel_derivative(self, u):
        s = u / self.r
        return np.where(np.abs(s) < 1, -6 * _MOLL_NORM / self.r ** 2 * s * (1 - s * s) ** 2, 0.0)

    def _convolve(self, y, kernel):
        """``int cbrt(v) kernel(y - v) dv``, split at the cusp ``v = 0``.

        On each one-signed piece ``v = sign * u^3`` turns the integrand into
        ``3 u^3 kernel(y - v)`` in ``u`` between ``cbrt|a|`` and ``cbrt|b|``; that is
        smooth, so the Gauss rule converges fast.
        """
        y = np.asarray(y, float)
        lo, hi = y - self.r, y + self.r
        mid = np.clip(0.0, lo, hi)
        out = np.zeros_like(y)
        for a, b in ((lo, mid), (mid, hi)):
            sign = np.where(a + b >= 0, 1.0, -1.0)
            ua, ub = np.cbrt(np.abs(a)), np.cbrt(np.abs(b))
            half = 0.5 * (ub - ua)
            u = half[..., None] * self._x + (0.5 * (ua + ub))[..., None]
            v = sign[..., None] * u ** 3
            # cbrt(v) dv = (sign u)(3 sign u^2 du); the sign squares away
            out += half * np.sum(self._w * 3 * u ** 3 * kernel(y[..., None] - v), axis=-1)
        return out

    def value(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return x - self._convolve(y, self._kernel)

    def gradient(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return np.ones_like(x), -self._convolve(y, self._kernel_derivative)


class LegendreFit:
    """Least-squares tensor Legendre fit of ``a`` on the box, degree ``deg`` in each variable."""

    def __init__(self, deg: int, n_fit: int = 81, box=BOX):
        (self.x0, self.x1), (self.y0, self.y1) = box
        u = np.linspace(-1, 1, n_fit)
        U, V = np.meshgrid(u, u, indexing="ij")
        X, Y = self._from_unit(U, V)
        A = L.legvander2d(U.ravel(), V.ravel(), [deg, deg])
        coef, *_ = np.linalg.lstsq(A, leaf_coordinate(X, Y).ravel(), rcond=None)
        self.deg = deg
        self.coef = coef.reshape(deg + 1, deg + 1)
        self._cu = L.legder(self.coef, axis=0)
        self._cv = L.legder(self.coef, axis=1)

    def _from_unit(self, u, v):
        return (self.x0 + 0.5 * (u + 1) * (self.x1 - self.x0), self.y0 + 0.5 * (v + 1) * (self.y1 - self.y0))

    def _to_unit(self, x, y):
        return (2 * (np.asarray(x, float) - self.x0) / (self.x1 - self.x0) - 1,
                2 * (np.asarray(y, float) - self.y0) / (self.y1 - self.y0) - 1)

    def value(self, x, y):
        return L.legval2d(*self._to_unit(x, y), self.coef)

    def gradient(self, x, y):
        u, v = self._to_unit(x, y)
        return (L.legval2d(u, v, self._cu) * 2 / (self.x1 - self.x0),
                L.legval2d(u, v, self._cv) * 2 / (self.y1 - self.y0))


def default_candidates(deltas=(0.2, 0.1, 0.05, 0.025), radii=(0.01, 0.05, 0.2),
                       degrees=(2, 4, 6, 8, 10)) -> list:
    out = []
    for d in deltas:
        h = CubicHeight(d)
        out.append(Candidate(f"heights_delta={d:g}", h.value, h.gradient, {"delta": d}))
    for r in radii:
        m = MollifiedLeafCoordinate(r)
        out.append(Candidate(f"mollified_r={r:g}", m.value, m.gradient, {"radius": r}))
    for k in degrees:
        p = LegendreFit(k)
        out.append(Candidate(f"legendre_deg={k}", p.value, p.gradient, {"degree": k}))
    return out


@dataclass
class ObstructionReport:
    candidate_id: str
    eta: float
    eps: float
    tol: float = OBSTRUCTION_TOL

    @property
    def combined(self) -> float:
        return 2 * self.eta + self.eps

    @property
    def passed(self) -> bool:
        return self.combined >= 1 - self.tol


def _sample_box(box, n: int, n_axis: int):
    (x0, x1), (y0, y1) = box
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    if y0 <= 0 <= y1:
        ys = np.unique(np.append(ys, 0.0))
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    xa = np.linspace(x0, x1, n_axis)
    x = np.concatenate([X.ravel(), xa])
    y = np.concatenate([Y.ravel(), np.zeros_like(xa) if y0 <= 0 <= y1 else np.full_like(xa, y0)])
    return x, y


def approx_obstruction(psi, box=BOX, n: int = 201, n_axis: int = 4001, tol: float = OBSTRUCTION_TOL,
                       name: str | None = None, fd_step: float = 1e-6) -> ObstructionReport:
    """``eta = sup |psi - a|`` and ``eps = sup |d/dx psi(x, (x - t)^3)|`` over a grid plus a dense axis row.

    ``psi`` is a :class:`Candidate` (or anything with ``value``/``gradient``)
    or a bare callable, which is differentiated by central differences.
    """
    x, y = _sample_box(box, n, n_axis)
    value = getattr(psi, "value", psi)
    grad = getattr(psi, "gradient", None)
    if grad is None:
        warnings.warn("no gradient supplied; using central finite differences", RuntimeWarning, stacklevel=2)
        grad = lambda x, y: ((value(x + fd_step, y) - value(x - fd_step, y)) / (2 * fd_step),  # noqa: E731
                             (value(x, y + fd_step) - value(x, y - fd_step)) / (2 * fd_step))
    eta = float(np.max(np.abs(value(x, y) - leaf_coordinate(x, y))))
    gx, gy = grad(x, y)
    leafwise = np.asarray(gx) + np.asarray(gy) * 3 * np.cbrt(y) ** 2
    eps = float(np.max(np.abs(leafwise)))
    label = name if name is not None else getattr(psi, "name", "candidate")
    return ObstructionReport(label, eta, eps, tol)


def obstruction_csv(reports, out=None) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["candidate_id", "eta", "eps", "combined", "pass"])
    for r in reports:
        wr.writerow([r.candidate_id, "%.17g" % r.eta, "%.17g" % r.eps, "%.17g" % r.combined, int(r.passed)])
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text
