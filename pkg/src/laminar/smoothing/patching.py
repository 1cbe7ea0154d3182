"""Gluing local approximants with a smooth partition of unity on the base disc."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dual import Dual
from ..errors import ConfigurationError, DomainError
from ..lamination import LeafFamily
from .approximant import Approximant, PartiallySmoothFn
from .chart import GridSpec
from .interpolation import bump_interpolant


@dataclass
class LocalPiece:
    center: complex
    radius: float
    approximant: Approximant
    epsilon: float = 0.0


def _bump(s):
    inside = s < 1
    out = np.zeros_like(s)
    out[inside] = np.exp(1 - 1 / (1 - s[inside]))
    return out


def _bump_derivative(s):
    inside = s < 1
    out = np.zeros_like(s)
    si = s[inside]
    out[inside] = np.exp(1 - 1 / (1 - si)) * (-1 / (1 - si) ** 2)
    return out


def _raw_weight(center, radius, z: Dual) -> Dual:
    d = z - center
    s = (d * d.conj()).real / radius ** 2
    return s.apply(_bump, _bump_derivative)


def partition_weights(cover, z) -> list[Dual]:
    """Partition of unity ``phi_a = beta_a / sum beta`` subordinate to the discs in ``cover``."""
    zd = z if isinstance(z, Dual) else Dual.seed_z(np.atleast_1d(np.asarray(z, complex)))
    raw = [_raw_weight(c, r, zd) for c, r in cover]
    total = raw[0]
    for b in raw[1:]:
        total = total + b
    if np.any(total.val <= 0):
        raise DomainError("point not covered by any chart")
    return [b / total for b in raw]


class PatchedApproximant(Approximant):
    def __init__(self, evaluate, provenance, pieces, cover, gradient_bounds, multiplicity):
        super().__init__(evaluate, provenance)
        self.pieces = pieces
        self.cover = cover
        self.gradient_bounds = gradient_bounds
        self.multiplicity = multiplicity

    @property
    def error_bound(self) -> float:
        """``m max C max eps + max eps`` for the leafwise C1 deviation."""
        eps = max(p.epsilon for p in self.pieces)
        return self.multiplicity * max(self.gradient_bounds) * eps + eps


def _measure_partition(cover, region=None, n: int = 120):
    """Sampled ``C_a = sup |grad phi_a|`` and overlap multiplicity over ``region`` (a disc; default: the cover's hull)."""
    if region is None:
        xs = [c.real for c, _ in cover]
        ys = [c.imag for c, _ in cover]
        rmax = max(r for _, r in cover)
        gx = np.linspace(min(xs) - rmax, max(xs) + rmax, n)
        gy = np.linspace(min(ys) - rmax, max(ys) + rmax, n)
    else:
        gx = np.linspace(region[0].real - region[1], region[0].real + region[1], n)
        gy = np.linspace(region[0].imag - region[1], region[0].imag + region[1], n)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    z = (X + 1j * Y).ravel()
    if region is not None:
        z = z[np.abs(z - region[0]) <= region[1]]
    zd = Dual.seed_z(z)
    raw = [_raw_weight(c, r, zd) for c, r in cover]
    covered = sum(b.val for b in raw) > 0
    zd = zd[covered]
    weights = partition_weights(cover, zd)
    bounds = [float(np.max(np.hypot(wt.grad[:, 0], wt.grad[:, 1]))) for wt in weights]
    mult = int(np.max(sum((wt.val > 0).astype(int) for wt in weights)))
    return bounds, mult


def partition_patch(pieces: list[LocalPiece], cover=None) -> PatchedApproximant:
    """``psi = sum_a phi_a g_a`` with ``{phi_a}`` subordinate to ``cover`` (one disc per piece)."""
    if not pieces:
        raise ConfigurationError("need at least one local approximant")
    cover = [(complex(p.center), float(p.radius)) for p in pieces] if cover is None else list(cover)
    if len(cover) != len(pieces):
        raise ConfigurationError("cover and local approximants must correspond one to one")
    bounds, mult = _measure_partition(cover)

    def evaluate(z, w):
        zd = Dual.seed_z(z)
        weights = partition_weights(cover, zd)
        total = Dual(np.zeros(len(z)), np.zeros((len(z), 4)))
        for wt, piece in zip(weights, pieces):
            active = wt.val > 0
            if not np.any(active):
                continue
            g = piece.approximant._evaluate(z[active], w[active]).real
            part = wt[active] * g
            total.val[active] += part.val
            total.grad[active] += part.grad
        return total

    return PatchedApproximant(evaluate, {"kind": "partition_patch", "charts": len(pieces)},
                              pieces, cover, bounds, mult)


def epsilon_budget(epsilon: float, gradient_bound: float, multiplicity: int) -> float:
    """Per-chart tolerance keeping the patched leafwise C1 error below ``epsilon``."""
    return epsilon / (2 * (multiplicity * gradient_bound + 1))


def hex_cover(base_radius: float, chart_radius: float, spacing_factor: float = 0.85):
    """Discs of ``chart_radius`` on a hexagonal net covering ``|z| <= base_radius``.

    Spacing ``spacing_factor * sqrt(3) * chart_radius`` keeps the deep holes of
    the net strictly inside three discs.
    """
    if base_radius + 2 * chart_radius >= 1:
        raise ConfigurationError("charts would leave the unit disc")
    s = spacing_factor * math.sqrt(3) * chart_radius
    n = int(math.ceil((base_radius + chart_radius) / s)) + 1
    centers = []
    for row in range(-2 * n, 2 * n + 1):
        y = row * s * math.sqrt(3) / 2
        shift = 0.5 * s if row % 2 else 0.0
        for col in range(-2 * n, 2 * n + 1):
            p = complex(col * s + shift, y)
            if abs(p) <= base_radius + chart_radius * 0.999:
                centers.append(p)
    return [(p, chart_radius) for p in centers]


def _local_error(fam, phi, psi, center, radius, n, rng):
    z = center + radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    c = (rng.random(n) - 0.5) * fam.R + 1j * (rng.random(n) - 0.5) * fam.R
    w = fam._value(c, z)
    g = psi.gradient(z, w)
    s = fam._slope(c, z)
    d1 = g[:, 0] + g[:, 2] * s.real + g[:, 3] * s.imag
    d2 = g[:, 1] - g[:, 2] * s.imag + g[:, 3] * s.real
    return max(float(np.max(np.abs(psi.value(z, w) - phi.value(z, w)))),
               float(np.max(np.abs(d1 - phi.d_x1(z, w)))),
               float(np.max(np.abs(d2 - phi.d_x2(z, w)))))


def global_approximant(fam: LeafFamily, phi: PartiallySmoothFn, t0: float, epsilon: float = 0.05,
                       base_radius: float = 0.5, delta_start: float = 0.1, max_halvings: int = 16,
                       n_check: int = 400, seed: int = 0) -> PatchedApproximant:
    """Patch bump interpolants on a hexagonal cover of charts of radius ``t0/2``.

    Each chart refines its pitch ``delta_a`` until the sampled local error
    (sup and leafwise C1) is below ``epsilon / (2 (m max C + 1))``, so the
    patched bound ``m max C max eps + max eps`` stays below ``epsilon / 2``.
    The achieved errors, not the budgets, feed
    :attr:`PatchedApproximant.error_bound`.
    """
    cover = hex_cover(base_radius, t0 / 2)
    bounds, mult = _measure_partition(cover, region=(0j, base_radius))
    rng = np.random.default_rng(seed)
    pieces = []
    budget = epsilon_budget(epsilon, max(bounds), mult)
    for p, r in cover:
        delta = delta_start
        for _ in range(max_halvings + 1):
            local = bump_interpolant(fam, phi, GridSpec(delta, t0, fam.R, center=p))
            err = _local_error(fam, phi, local, p, r, n_check, rng)
            if err <= budget:
                break
            delta /= 2
        else:
            raise ConfigurationError(f"chart at {p:.3g}: local error {err:.3g} above budget {budget:.3g}")
        local.provenance["achieved_error"] = err
        pieces.append(LocalPiece(p, r, local, err))
    patched = partition_patch(pieces, cover)
    patched.gradient_bounds, patched.multiplicity = bounds, mult
    patched.provenance.update({"family": fam.label, "target": phi.name, "t0": t0, "epsilon": epsilon,
                               "deltas": [pc.approximant.provenance["delta"] for pc in pieces]})
    return patched
