"""Laminations by holomorphic graphs and the two real/complex curve families.

A :class:`LeafFamily` is a holomorphic motion ``c -> f_c`` of the unit disc
given in closed form, normalized by ``f_c(0) = c``.  Every evaluation is
vectorized over numpy arrays and exact up to floating point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError, PreconditionError


class FamilyKind(str, enum.Enum):
    PRODUCT = "product"
    SHEAR = "shear"
    EXP = "exp"
    NONLINEAR = "nonlinear"


def _as_complex(x):
    return np.asarray(x, dtype=complex)


def _out(x):
    """Return 0-d arrays as numpy scalars, leave real arrays alone."""
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


@dataclass(frozen=True)
class LeafFamily:
    """A closed-form holomorphic motion of the unit disc.

    Builtin leaves ``w = f_c(z)``:

    ========== =====================
    PRODUCT    ``c``
    SHEAR      ``c (1 + a z)``
    EXP        ``c exp(lam z)``
    NONLINEAR  ``c + eps c^2 z``
    ========== =====================

    Parameters are valid for ``|c| <= 2R + param_slack``; the slack leaves room
    for the neighbouring grid leaves of cells on the ``|c| <= 2R`` boundary.
    """

    kind: FamilyKind
    a: complex = 0.0
    lam: complex = 0.0
    eps: float = 0.0
    R: float = 1.0
    base_radius: float = 1.0
    param_slack: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        if self.R <= 0:
            raise PreconditionError("R must be positive")
        if not 0 < self.base_radius <= 1:
            raise PreconditionError("base_radius must lie in (0, 1]")

    # -- constructors ---------------------------------------------------------
    @classmethod
    def product(cls, R=1.0, **kw):
        return cls(FamilyKind.PRODUCT, R=R, **kw)

    @classmethod
    def shear(cls, a, R=1.0, **kw):
        return cls(FamilyKind.SHEAR, a=complex(a), R=R, **kw)

    @classmethod
    def exp(cls, lam, R=1.0, **kw):
        return cls(FamilyKind.EXP, lam=complex(lam), R=R, **kw)

    @classmethod
    def nonlinear(cls, eps, R=1.0, **kw):
        return cls(FamilyKind.NONLINEAR, eps=float(eps), R=R, **kw)

    # -- serialization --------------------------------------------------------
    def to_record(self) -> dict:
        return {
            "kind": self.kind.value,
            "a_re": float(np.real(self.a)),
            "a_im": float(np.imag(self.a)),
            "lam_re": float(np.real(self.lam)),
            "lam_im": float(np.imag(self.lam)),
            "eps": float(self.eps),
            "R": float(self.R),
        }

    @classmethod
    def from_record(cls, rec) -> "LeafFamily":
        get = lambda k: float(rec.get(k, 0.0))  # noqa: E731
        return cls(
            FamilyKind(str(rec["kind"]).strip().lower()),
            a=complex(get("a_re"), get("a_im")),
            lam=complex(get("lam_re"), get("lam_im")),
            eps=get("eps"),
            R=float(rec.get("R", 1.0)),
        )

    @property
    def label(self) -> str:
        k = self.kind
        if k is FamilyKind.SHEAR:
            return f"shear(a={self.a.real:g}{self.a.imag:+g}i)" if self.a.imag else f"shear({self.a.real:g})"
        if k is FamilyKind.EXP:
            return f"exp(lam={self.lam.real:g}{self.lam.imag:+g}i)" if self.lam.imag else f"exp({self.lam.real:g})"
        if k is FamilyKind.NONLINEAR:
            return f"nonlinear({self.eps:g})"
        return "product"

    # -- validity -------------------------------------------------------------
    @property
    def is_valid(self) -> bool:
        if self.kind is FamilyKind.SHEAR:
            return abs(self.a) < 1
        if self.kind is FamilyKind.NONLINEAR:
            return abs(self.eps) * 4 * self.R < 1
        return True

    def validate(self) -> None:
        if not self.is_valid:
            raise PreconditionError(f"{self.label} is not a lamination for R={self.R}")

    @property
    def param_bound(self) -> float:
        return 2 * self.R + self.param_slack

    def _check(self, c=None, z=None):
        if z is not None and np.any(np.abs(z) >= self.base_radius):
            raise DomainError(f"|z| must be < {self.base_radius}")
        if c is not None and np.any(np.abs(c) > self.param_bound * (1 + 1e-12)):
            raise DomainError(f"|c| must be <= {self.param_bound}")
        for v in (c, z):
            if v is not None and not np.all(np.isfinite(v)):
                raise DomainError("non-finite coordinate")

    # -- closed forms (no domain checks; callers check) -----------------------
    def _value(self, c, z):
        k = self.kind
        if k is FamilyKind.PRODUCT:
            return c + 0 * z
        if k is FamilyKind.SHEAR:
            return c * (1 + self.a * z)
        if k is FamilyKind.EXP:
            return c * np.exp(self.lam * z)
        return c + self.eps * c * c * z

    def _slope(self, c, z):
        k = self.kind
        if k is FamilyKind.PRODUCT:
            return 0 * (c + z)
        if k is FamilyKind.SHEAR:
            return c * self.a + 0 * z
        if k is FamilyKind.EXP:
            return c * self.lam * np.exp(self.lam * z)
        return self.eps * c * c + 0 * z

    def _dvalue_dc(self, c, z):
        k = self.kind
        if k is FamilyKind.PRODUCT:
            return 1 + 0 * (c + z)
        if k is FamilyKind.SHEAR:
            return 1 + self.a * z + 0 * c
        if k is FamilyKind.EXP:
            return np.exp(self.lam * z) + 0 * c
        return 1 + 2 * self.eps * c * z

    def _project(self, z, w):
        """Return ``(pi, dpi/dz, dpi/dw)``."""
        k = self.kind
        if k is FamilyKind.PRODUCT:
            one = np.ones(np.broadcast(z, w).shape, dtype=complex)
            return w + 0 * z, 0 * one, one
        if k is FamilyKind.SHEAR:
            s = 1 + self.a * z
            c = w / s
            return c, -self.a * c / s, 1 / s
        if k is FamilyKind.EXP:
            e = np.exp(-self.lam * z)
            return w * e, -self.lam * w * e, e + 0 * w
        disc = 1 + 4 * self.eps * z * w
        if np.any(disc.real <= 0):
            raise DomainError("nonlinear projection crosses the square-root branch cut")
        c = 2 * w / (1 + np.sqrt(disc))
        s = 1 + 2 * self.eps * z * c
        return c, -self.eps * c * c / s, 1 / s

    # -- public vectorized API ------------------------------------------------
    def value(self, c, z):
        c, z = _as_complex(c), _as_complex(z)
        self._check(c, z)
        return _out(self._value(c, z))

    def slope(self, c, z):
        c, z = _as_complex(c), _as_complex(z)
        self._check(c, z)
        return _out(self._slope(c, z))

    def dvalue_dc(self, c, z):
        c, z = _as_complex(c), _as_complex(z)
        self._check(c, z)
        return _out(self._dvalue_dc(c, z))

    def project(self, z, w):
        z, w = _as_complex(z), _as_complex(w)
        self._check(z=z)
        if not np.all(np.isfinite(w)):
            raise DomainError("non-finite coordinate")
        if self.kind is FamilyKind.NONLINEAR and not self.is_valid:
            raise DomainError("projection branch is ambiguous outside the validity range")
        return _out(self._project(z, w)[0])

    def project_with_derivatives(self, z, w):
        z, w = _as_complex(z), _as_complex(w)
        self._check(z=z)
        if self.kind is FamilyKind.NONLINEAR and not self.is_valid:
            raise DomainError("projection branch is ambiguous outside the validity range")
        return tuple(_out(v) for v in self._project(z, w))


def leaf_value(fam: LeafFamily, c, z):
    return fam.value(c, z)


def leaf_slope(fam: LeafFamily, c, z):
    return fam.slope(c, z)


def project(fam: LeafFamily, z, w):
    return fam.project(z, w)


def _uniform_disc(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


@dataclass
class DisjointnessReport:
    min_gap: float
    passed: bool
    witness: tuple

    @property
    def pass_(self):
        return self.passed


def verify_disjointness(fam: LeafFamily, n_samples: int, seed: int = 0, tol: float = 1e-6,
                        z_radius: float | None = None) -> DisjointnessReport:
    """Sample the normalized gap ``|f_c(z) - f_c'(z)| / |c - c'|`` and refine the minimum.

    Candidate pairs are drawn on ``|c|, |c'| <= 2R`` and ``|z| < z_radius``; the
    five smallest ratios seed a Nelder-Mead search, which is what exposes thin
    near-collisions that plain sampling only brushes past.
    """
    if n_samples <= 0:
        raise PreconditionError("n_samples must be positive")
    rng = np.random.default_rng(seed)
    zr = (z_radius if z_radius is not None else fam.base_radius) * (1 - 1e-9)
    cr = 2 * fam.R
    c1 = _uniform_disc(rng, n_samples, cr)
    c2 = _uniform_disc(rng, n_samples, cr)
    z = _uniform_disc(rng, n_samples, zr)
    ratio = np.abs(fam._value(c1, z) - fam._value(c2, z)) / np.abs(c1 - c2)

    def to_disc(u, radius):
        p = complex(u[0], u[1])
        return radius * np.tanh(abs(p)) * p / abs(p) if p != 0 else 0j

    def from_disc(p, radius):
        r = min(abs(p) / radius, 1 - 1e-12)
        return [np.real(p), np.imag(p)] if r == 0 else list(np.arctanh(r) * np.array([p.real, p.imag]) / abs(p))

    def objective(u):
        a, b, zz = to_disc(u[0:2], cr), to_disc(u[2:4], cr), to_disc(u[4:6], zr)
        if a == b:
            return np.inf
        return abs(fam._value(a, zz) - fam._value(b, zz)) / abs(a - b)

    best = float(ratio.min())
    i0 = int(ratio.argmin())
    witness = (complex(c1[i0]), complex(c2[i0]), complex(z[i0]))
    for i in np.argsort(ratio)[:5]:
        x0 = from_disc(c1[i], cr) + from_disc(c2[i], cr) + from_disc(z[i], zr)
        res = optimize.minimize(objective, x0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        if res.fun < best:
            best = float(res.fun)
            witness = (to_disc(res.x[0:2], cr), to_disc(res.x[2:4], cr), to_disc(res.x[4:6], zr))
    return DisjointnessReport(min_gap=best, passed=best > tol, witness=witness)


def continuity_modulus(fam: LeafFamily, n_samples: int = 2000, seed: int = 0,
                       c_radius: float | None = None, z_radius: float = 0.5,
                       step: float = 1e-2) -> float:
    """Largest sampled ratio ``|f_c(z) - f_c'(z')| / (|c - c'| + |z - z'|)`` for nearby pairs."""
    rng = np.random.default_rng(seed)
    cr = fam.R if c_radius is None else c_radius
    c = _uniform_disc(rng, n_samples, cr)
    z = _uniform_disc(rng, n_samples, z_radius)
    dc = _uniform_disc(rng, n_samples, step)
    dz = _uniform_disc(rng, n_samples, step)
    num = np.abs(fam.value(c + dc, z + dz) - fam.value(c, z))
    return float(np.max(num / (np.abs(dc) + np.abs(dz))))


# -- counterexample curve families ---------------------------------------------

class RealCubicFamily:
    """The planar lamination by the curves ``y = (x - t)^3``, ``t`` real."""

    @staticmethod
    def value(t, x):
        return (np.asarray(x, float) - t) ** 3

    @staticmethod
    def slope(t, x):
        return 3 * (np.asarray(x, float) - t) ** 2

    @staticmethod
    def project(x, y):
        # signed real cube root keeps the projection continuous through y = 0
        return np.asarray(x, float) - np.cbrt(y)


class SpaceCurveFamily:
    """Complex curves ``s -> (s, (s - t)^2, (s - t)^3)`` in C^3.

    The curves are pairwise disjoint but only fill the surface ``tau^2 = w^3``
    (times the z-line), so sampling always happens on leaves.
    """

    @staticmethod
    def point(t, s):
        t, s = _as_complex(t), _as_complex(s)
        d = s - t
        return s, d * d, d ** 3

    @staticmethod
    def tangent(t, s):
        t, s = _as_complex(t), _as_complex(s)
        d = s - t
        return np.ones_like(d), 2 * d, 3 * d * d

    @staticmethod
    def project(z, w, tau):
        z, w, tau = _as_complex(z), _as_complex(w), _as_complex(tau)
        safe = np.where(w == 0, 1, w)
        return _out(np.where(w == 0, z, z - tau / safe))


def space_curves_disjoint(n_samples: int = 20000, seed: int = 0, radius: float = 1.0) -> float:
    """Smallest sampled ``|gamma_t(s) - gamma_t'(s')| / (|t - t'|)`` at matched ``s``.

    Points on distinct curves with different ``s`` are trivially apart in the z
    coordinate, so only ``s = s'`` needs checking.
    """
    rng = np.random.default_rng(seed)
    t1 = _uniform_disc(rng, n_samples, radius)
    t2 = _uniform_disc(rng, n_samples, radius)
    s = _uniform_disc(rng, n_samples, radius)
    p1 = SpaceCurveFamily.point(t1, s)
    p2 = SpaceCurveFamily.point(t2, s)
    gap = np.sqrt(sum(np.abs(a - b) ** 2 for a, b in zip(p1, p2)))
    return float(np.min(gap / np.abs(t1 - t2)))
