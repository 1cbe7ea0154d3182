"""Test forms on the chart ``{|z| < 1} x C`` and their evaluation on leaf tangents.

A (1,1)-form is ``w11 dz^dzb + w12 dz^dwb + w21 dw^dzb + w22 dw^dwb`` and a
(0,1)-form is ``p1 dzb + p2 dwb``; coefficients are callables of flat complex
arrays ``(z, w)``.  (0,1)-forms also carry their Wirtinger derivatives
``d/dz`` and ``d/dw`` so that ``del`` of them can be formed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import ConfigurationError
from ..lamination import LeafFamily

KEYS_11 = ("11", "12", "21", "22")
KEYS_01 = ("1", "2")


def _zero(z, w):
    return np.zeros(np.broadcast(np.asarray(z), np.asarray(w)).shape, complex)


@dataclass
class TestForm:
    __test__ = False  # not a pytest class

    bidegree: tuple
    coefs: dict
    z_support: tuple = (0j, 1.0)
    name: str = "form"
    d_z: dict = field(default_factory=dict)
    d_w: dict = field(default_factory=dict)

    def __post_init__(self):
        keys = {(1, 1): KEYS_11, (0, 1): KEYS_01}.get(tuple(self.bidegree))
        if keys is None:
            raise ConfigurationError(f"unsupported bidegree {self.bidegree}")
        self.bidegree = tuple(self.bidegree)
        unknown = set(self.coefs) - set(keys)
        if unknown:
            raise ConfigurationError(f"unknown coefficient keys {sorted(unknown)}")

    def coef(self, key: str, z, w):
        fn = self.coefs.get(key)
        return _zero(z, w) if fn is None else np.asarray(fn(z, w), complex) + _zero(z, w)

    def scaled(self, a: complex) -> "TestForm":
        wrap = lambda f: (lambda z, w: a * f(z, w))  # noqa: E731
        return TestForm(self.bidegree, {k: wrap(f) for k, f in self.coefs.items()}, self.z_support,
                        f"{a}*{self.name}", {k: wrap(f) for k, f in self.d_z.items()},
                        {k: wrap(f) for k, f in self.d_w.items()})

    def __add__(self, other: "TestForm") -> "TestForm":
        if self.bidegree != other.bidegree:
            raise ConfigurationError("cannot add forms of different bidegree")
        keys = set(self.coefs) | set(other.coefs)
        coefs = {k: (lambda k: lambda z, w: self.coef(k, z, w) + other.coef(k, z, w))(k) for k in keys}
        support = _enclosing_disc(self.z_support, other.z_support)
        return TestForm(self.bidegree, coefs, support, f"{self.name}+{other.name}")

    def partial(self) -> "TestForm":
        """``del`` of a (0,1)-form: the (1,1)-form ``sum (dp_k/dz dz + dp_k/dw dw) ^ d(conj)``."""
        if self.bidegree != (0, 1):
            raise ConfigurationError("partial() is defined for (0,1)-forms")
        missing = [k for k in self.coefs if k not in self.d_z or k not in self.d_w]
        if missing:
            raise ConfigurationError(f"form {self.name!r} lacks derivatives for {missing}")
        coefs = {}
        for k in self.coefs:
            coefs["1" + k] = self.d_z[k]
            coefs["2" + k] = self.d_w[k]
        return TestForm((1, 1), coefs, self.z_support, f"del({self.name})")


def _enclosing_disc(a, b):
    """Smallest disc containing the discs ``a`` and ``b`` (each ``(center, radius)``)."""
    (c0, r0), (c1, r1) = (complex(a[0]), float(a[1])), (complex(b[0]), float(b[1]))
    d = abs(c1 - c0)
    if d + r1 <= r0:
        return c0, r0
    if d + r0 <= r1:
        return c1, r1
    r = 0.5 * (d + r0 + r1)
    return c0 + (c1 - c0) * ((r - r0) / d), r


# -- scalar bumps -------------------------------------------------------------

def _bump_s(s):
    out = np.zeros_like(s)
    inside = s < 1
    out[inside] = np.exp(1 - 1 / (1 - s[inside]))
    return out


def _bump_ds(s):
    out = np.zeros_like(s)
    inside = s < 1
    si = s[inside]
    out[inside] = -np.exp(1 - 1 / (1 - si)) / (1 - si) ** 2
    return out


@dataclass(frozen=True)
class Bump:
    """``exp(1 - 1/(1 - |x - center|^2 / r^2))`` inside the disc, 0 outside; value 1 at the centre."""

    center: complex
    radius: float

    def __call__(self, x):
        d = np.asarray(x, complex) - self.center
        return _bump_s(np.abs(d) ** 2 / self.radius ** 2)

    def d_x(self, x):
        """Wirtinger ``d/dx`` (``x`` the complex variable)."""
        d = np.asarray(x, complex) - self.center
        return _bump_ds(np.abs(d) ** 2 / self.radius ** 2) * np.conj(d) / self.radius ** 2


def bump_form_01(z_bump: Bump, w_bump: Bump, a1: complex, a2: complex, p: complex = 0, q: complex = 0,
                 name: str = "phi01") -> TestForm:
    """``rho(z) sigma(w) (1 + p z + q w) (a1 dzb + a2 dwb)`` with exact Wirtinger derivatives."""

    def base(z, w):
        return z_bump(z) * w_bump(w) * (1 + p * z + q * w)

    def base_dz(z, w):
        return w_bump(w) * (z_bump.d_x(z) * (1 + p * z + q * w) + z_bump(z) * p)

    def base_dw(z, w):
        return z_bump(z) * (w_bump.d_x(w) * (1 + p * z + q * w) + w_bump(w) * q)

    mk = lambda f, a: (lambda z, w: a * f(z, w))  # noqa: E731
    return TestForm((0, 1), {"1": mk(base, a1), "2": mk(base, a2)}, (z_bump.center, z_bump.radius), name,
                    {"1": mk(base_dz, a1), "2": mk(base_dz, a2)}, {"1": mk(base_dw, a1), "2": mk(base_dw, a2)})


def hermitian_bump_form(z_bump: Bump, w_bump: Bump, h11: float, h12: complex, h22: float,
                        name: str = "omega") -> TestForm:
    """``(i/2) rho(z) sigma(w) sum h_ab dx_a ^ d(conj x_b)`` with ``h`` Hermitian: pairs to a real number."""
    rho = lambda z, w: 0.5j * z_bump(z) * w_bump(w)  # noqa: E731
    mk = lambda a: (lambda z, w: a * rho(z, w))  # noqa: E731
    return TestForm((1, 1), {"11": mk(h11), "12": mk(h12), "21": mk(np.conj(h12)), "22": mk(h22)},
                    (z_bump.center, z_bump.radius), name)


def area_form(rho: Callable, z_support=(0j, 1.0), name: str = "area") -> TestForm:
    """``rho(z) (i/2) dz ^ dzb``; on a leaf it integrates to ``int rho dA``."""
    return TestForm((1, 1), {"11": lambda z, w: 0.5j * rho(z) + 0 * w}, z_support, name)


# -- leaf-adapted forms -----------------------------------------------------

def leaf_slope_field(fam: LeafFamily, z, w):
    """``f'_{pi(z,w)}(z)``: the slope of the leaf through each point."""
    c = fam._project(np.asarray(z, complex), np.asarray(w, complex))[0]
    return fam._slope(c, z)


def lambda_wedge(fam: LeafFamily, phi: TestForm) -> TestForm:
    """``lambda ^ phi`` with ``lambda = dw - f'(z) dz`` and ``phi`` a (0,1)-form."""
    if phi.bidegree != (0, 1):
        raise ConfigurationError("lambda_wedge expects a (0,1)-form")
    s = lambda z, w: leaf_slope_field(fam, z, w)  # noqa: E731
    coefs = {
        "11": lambda z, w: -s(z, w) * phi.coef("1", z, w),
        "12": lambda z, w: -s(z, w) * phi.coef("2", z, w),
        "21": lambda z, w: phi.coef("1", z, w),
        "22": lambda z, w: phi.coef("2", z, w),
    }
    return TestForm((1, 1), coefs, phi.z_support, f"lambda^{phi.name}")


def dw_wedge(phi: TestForm) -> TestForm:
    """``dw ^ phi``: the same pairing with the leaf-blind form ``dw`` (negative control)."""
    if phi.bidegree != (0, 1):
        raise ConfigurationError("dw_wedge expects a (0,1)-form")
    coefs = {"21": lambda z, w: phi.coef("1", z, w), "22": lambda z, w: phi.coef("2", z, w)}
    return TestForm((1, 1), coefs, phi.z_support, f"dw^{phi.name}")


def lambda_lambdabar(fam: LeafFamily, rho: Callable, z_support=(0j, 1.0)) -> TestForm:
    """``rho(z) (i/2) lambda ^ conj(lambda)``."""
    s = lambda z, w: leaf_slope_field(fam, z, w)  # noqa: E731
    r = lambda z, w: 0.5j * rho(z)  # noqa: E731
    coefs = {
        "11": lambda z, w: r(z, w) * np.abs(s(z, w)) ** 2,
        "12": lambda z, w: -r(z, w) * s(z, w),
        "21": lambda z, w: -r(z, w) * np.conj(s(z, w)),
        "22": lambda z, w: r(z, w) + 0 * w,
    }
    return TestForm((1, 1), coefs, z_support, "lambda^lambdabar")


def bump_battery_01(n: int, seed: int = 0, z_radius: float = 0.4, w_radius: float = 4.0) -> list:
    """``n`` random smooth compactly supported (0,1)-forms with z-support inside ``|z| <= 0.45``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        zc = (0.45 - z_radius) * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        wc = complex(*rng.normal(0, 0.3, 2))
        a1, a2, p, q = rng.normal(size=4) + 1j * rng.normal(size=4)
        out.append(bump_form_01(Bump(zc, z_radius), Bump(wc, w_radius), a1, a2, 0.3 * p, 0.1 * q, name=f"phi{i}"))
    return out


def bump_battery_11(n: int, seed: int = 0, z_radius: float = 0.4, w_radius: float = 4.0) -> list:
    """``n`` random Hermitian-coefficient (1,1) bump forms; their pairings with currents are real."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        zc = (0.48 - z_radius) * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        wc = complex(*rng.normal(0, 0.3, 2))
        h11, h22 = 0.5 + rng.random(2)
        h12 = 0.3 * complex(*rng.normal(size=2))
        out.append(hermitian_bump_form(Bump(zc, z_radius), Bump(wc, w_radius), h11, h12, h22, name=f"omega{i}"))
    return out
