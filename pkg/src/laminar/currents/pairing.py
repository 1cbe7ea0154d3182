"""Directed currents as weighted sums of leaf currents, paired with test forms by quadrature."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DomainError
from ..lamination import LeafFamily
from .forms import TestForm, dw_wedge, lambda_wedge
from .quadrature import Quadrature


@dataclass
class DirectedCurrent:
    """``T = sum_i mu_i [Gamma_{c_i}]`` for an atomic transverse measure ``mu``."""

    atoms: list = field(default_factory=list)

    def __post_init__(self):
        self.atoms = [(complex(c), float(m)) for c, m in self.atoms]
        for c, m in self.atoms:
            if not (np.isfinite(m) and m > 0):
                raise ConfigurationError(f"atom weight must be positive, got {m}")
            if not np.isfinite(c):
                raise ConfigurationError("atom parameter must be finite")

    @property
    def params(self) -> np.ndarray:
        return np.array([c for c, _ in self.atoms], complex)

    @property
    def weights(self) -> np.ndarray:
        return np.array([m for _, m in self.atoms], float)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def __len__(self):
        return len(self.atoms)

    def check_range(self, fam: LeafFamily):
        if len(self) and np.any(np.abs(self.params) > fam.param_bound):
            raise DomainError("atom parameter outside the family's parameter disc")

    @classmethod
    def random(cls, n_atoms: int, seed: int = 0, radius: float = 1.0) -> "DirectedCurrent":
        rng = np.random.default_rng(seed)
        c = radius * np.sqrt(rng.random(n_atoms)) * np.exp(2j * np.pi * rng.random(n_atoms))
        return cls(list(zip(c, 0.5 + rng.random(n_atoms))))

    def to_record(self) -> list:
        return [{"c_re": c.real, "c_im": c.imag, "weight": m} for c, m in self.atoms]

    @classmethod
    def from_record(cls, rec) -> "DirectedCurrent":
        return cls([(complex(a["c_re"], a["c_im"]), a["weight"]) for a in rec])


def tangent_2field(fam: LeafFamily, c, z):
    """``v1 = (1, f'_c(z))`` and ``v2 = (i, i f'_c(z))`` as complex 2-vectors (last axis)."""
    s = np.asarray(fam.slope(c, z), complex)
    one = np.ones_like(s)
    return np.stack([one, s], axis=-1), np.stack([1j * one, 1j * s], axis=-1)


def _eval_basis(v):
    """Values of ``(dz, dw)`` and ``(dzb, dwb)`` on real tangent vectors ``v``."""
    return (v[..., 0], v[..., 1]), (np.conj(v[..., 0]), np.conj(v[..., 1]))


def omega_on_v(omega: TestForm, fam: LeafFamily, c, z):
    """``omega(v1, v2) / (-2i)``: the density of ``omega`` along the leaf, normalised so ``dz^dzb -> 1``."""
    if omega.bidegree != (1, 1):
        raise ConfigurationError("omega_on_v expects a (1,1)-form")
    z = np.asarray(z, complex)
    c = np.asarray(c, complex)
    v1, v2 = tangent_2field(fam, c, z)
    w = fam.value(c, z)
    hol1, anti1 = _eval_basis(v1)
    hol2, anti2 = _eval_basis(v2)
    total = 0
    for a in range(2):
        for b in range(2):
            coef = omega.coef(f"{a + 1}{b + 1}", z, w)
            total = total + coef * (hol1[a] * anti2[b] - hol2[a] * anti1[b])
    out = total / (-2j)
    return out[()] if np.ndim(out) == 0 else out


def pullback_coefficient(omega: TestForm, fam: LeafFamily, c, z):
    """``kappa`` with ``omega|leaf = kappa dz ^ dzb`` (substituting ``dw = f'_c dz``)."""
    w = fam._value(c, z)
    s = fam._slope(c, z)
    return (omega.coef("11", z, w) + omega.coef("12", z, w) * np.conj(s)
            + omega.coef("21", z, w) * s + omega.coef("22", z, w) * np.abs(s) ** 2)


def check_domain(omega: TestForm, fam: LeafFamily, quad: Quadrature):
    if quad.corner_radius >= fam.base_radius:
        raise ConfigurationError("quadrature square leaves the base disc")
    if not quad.contains_disc(*omega.z_support):
        raise ConfigurationError(f"support of {omega.name!r} is not inside the quadrature square")


def leaf_integral(fam: LeafFamily, c, omega: TestForm, quad: Quadrature) -> complex:
    """``int_{Gamma_c} omega`` over the part of the leaf above the quadrature square.

    Since ``dz ^ dzb = -2i dx ^ dy`` this is ``-2i int kappa dA``.
    """
    if omega.bidegree != (1, 1):
        raise ConfigurationError("leaf_integral expects a (1,1)-form")
    check_domain(omega, fam, quad)
    fam._check(c=np.asarray(c, complex))
    z = quad.nodes
    kappa = pullback_coefficient(omega, fam, np.full(z.shape, complex(c)), z)
    return complex(-2j * quad.integrate(kappa))


def current_pair(T: DirectedCurrent, omega: TestForm, fam: LeafFamily, quad: Quadrature) -> complex:
    """``T(omega) = sum_i mu_i int_{Gamma_{c_i}} omega``; all atoms are evaluated in one batch."""
    if len(T) == 0:
        return 0j
    if omega.bidegree != (1, 1):
        raise ConfigurationError("current_pair expects a (1,1)-form")
    check_domain(omega, fam, quad)
    T.check_range(fam)
    z = np.broadcast_to(quad.nodes, (len(T), quad.nodes.size))
    c = np.broadcast_to(T.params[:, None], z.shape)
    kappa = pullback_coefficient(omega, fam, c, z)
    per_leaf = -2j * (kappa @ quad.weights)
    return complex(T.weights @ per_leaf)


def wedge_defect(T: DirectedCurrent, phi01: TestForm, fam: LeafFamily, quad: Quadrature,
                 control: bool = False) -> float:
    """``|T(lambda ^ phi)|``; zero for directed ``T`` up to quadrature error.

    ``control=True`` pairs with ``dw ^ phi`` instead, which does not vanish on
    leaves unless they are horizontal.
    """
    if phi01.bidegree != (0, 1):
        raise ConfigurationError("wedge_defect expects a (0,1)-form")
    form = dw_wedge(phi01) if control else lambda_wedge(fam, phi01)
    return abs(current_pair(T, form, fam, quad))
