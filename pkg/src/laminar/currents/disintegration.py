"""Riesz measure sampling, disintegration along leaves and the reconstruction checks."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..lamination import LeafFamily
from .forms import TestForm
from .pairing import DirectedCurrent, current_pair, pullback_coefficient
from .quadrature import Quadrature


@dataclass
class RieszSamples:
    """Weighted points ``(z, w)`` of ``nu = sum_i mu_i * area|leaf_i`` over the quadrature square.

    ``c`` records the leaf each point was drawn from; it is carried for
    diagnostics and is recomputed by projection in :func:`disintegrate`.
    """

    z: np.ndarray
    w: np.ndarray
    weights: np.ndarray
    c: np.ndarray

    def __len__(self):
        return len(self.z)


def riesz_samples(T: DirectedCurrent, fam: LeafFamily, n: int, quad: Quadrature, seed: int = 0) -> RieszSamples:
    """Draw ``n`` points, split across atoms in proportion to mass, uniform on the square above each leaf.

    Each atom uses its own Philox stream keyed by ``(seed, atom index)``, so
    results do not depend on how atoms are scheduled.
    """
    if n < 0:
        raise ConfigurationError("sample count must be nonnegative")
    if len(T) == 0 or n == 0:
        e = np.zeros(0)
        return RieszSamples(e.astype(complex), e.astype(complex), e, e.astype(complex))
    mass = T.weights
    counts = np.floor(n * mass / mass.sum()).astype(int)
    counts[np.argsort(-(n * mass / mass.sum() - counts), kind="stable")[: n - counts.sum()]] += 1
    area = (2 * quad.half_width) ** 2
    zs, cs, ws = [], [], []
    for i, ((c, m), k) in enumerate(zip(T.atoms, counts)):
        if k == 0:
            continue
        rng = np.random.Generator(np.random.Philox(key=[seed, i]))
        u = rng.random((k, 2)) * 2 - 1
        zs.append(quad.center + quad.half_width * (u[:, 0] + 1j * u[:, 1]))
        cs.append(np.full(k, c))
        ws.append(np.full(k, m * area / k))
    z, c = np.concatenate(zs), np.concatenate(cs)
    return RieszSamples(z, fam._value(c, z), np.concatenate(ws), c)


class EmpiricalConditional:
    """Within-bin weighted point cloud; ``expect(f)`` averages ``f(c, z)`` over it."""

    def __init__(self, z, c, weights):
        self.z, self.c, self.weights = z, c, weights

    def expect(self, f):
        return np.sum(self.weights * f(self.c, self.z)) / np.sum(self.weights)


class DensityConditional:
    """Leaf measure ``tau(z) dA`` over the quadrature square on a single leaf ``c``."""

    def __init__(self, c, quad: Quadrature, tau=None):
        self.c = complex(c)
        self.quad = quad
        self.tau = (lambda z: np.ones(z.shape)) if tau is None else tau
        self._t = self.tau(quad.nodes)
        self.norm = float(quad.integrate(self._t))

    def expect(self, f):
        z = self.quad.nodes
        return self.quad.integrate(self._t * f(np.full(z.shape, self.c), z)) / self.norm


@dataclass
class Disintegration:
    """``nu = int sigma_b dmu'(b)``: per-bin transverse mass and leaf conditionals."""

    masses: np.ndarray
    labels: np.ndarray
    conditionals: list
    edges: tuple = ()
    meta: dict = field(default_factory=dict)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    @property
    def occupied(self) -> int:
        return int(np.count_nonzero(self.masses))

    def leaf_pairing(self, b: int, omega: TestForm, fam: LeafFamily) -> complex:
        """``T_b(omega) = -2i E_{sigma_b}[kappa]``."""
        return -2j * self.conditionals[b].expect(lambda c, z: pullback_coefficient(omega, fam, c, z))

    def pair(self, omega: TestForm, fam: LeafFamily, g=None) -> complex:
        """``int g(b) T_b(omega) dmu'(b)``."""
        total = 0j
        for b, m in enumerate(self.masses):
            if m == 0:
                continue
            weight = 1.0 if g is None else g(self.labels[b])
            if weight == 0:
                continue
            total += m * weight * self.leaf_pairing(b, omega, fam)
        return complex(total)

    @classmethod
    def from_current(cls, T: DirectedCurrent, quad: Quadrature, tau=None) -> "Disintegration":
        """Exact disintegration of ``T``'s Riesz measure: one bin per atom, area (or ``tau``) conditionals."""
        conds = [DensityConditional(c, quad, tau) for c in T.params]
        masses = np.array([m * d.norm for m, d in zip(T.weights, conds)])
        return cls(masses, T.params.copy(), conds, meta={"kind": "exact", "tilted": tau is not None})


def disintegrate(fam: LeafFamily, samples: RieszSamples, bins: int = 64) -> Disintegration:
    """Bin the projected leaf parameters on a ``sqrt(bins) x sqrt(bins)`` grid.

    ``mu'`` is the per-bin sample mass; ``sigma_b`` the weighted empirical
    distribution of base points within the bin.
    """
    if len(samples) == 0:
        raise ConfigurationError("cannot disintegrate an empty sample")
    side = int(round(math.sqrt(bins)))
    if side * side != bins:
        raise ConfigurationError("bins must be a perfect square")
    c = fam._project(samples.z, samples.w)[0]
    edges = []
    idx = []
    for part in (c.real, c.imag):
        lo, hi = float(part.min()), float(part.max())
        pad = 1e-9 * max(1.0, abs(lo), abs(hi))
        e = np.linspace(lo - pad, hi + pad, side + 1)
        edges.append(e)
        if hi - lo <= pad:
            # a constant coordinate up to rounding: do not split it on noise
            idx.append(np.zeros(len(part), int))
        else:
            idx.append(np.clip(np.searchsorted(e, part, side="right") - 1, 0, side - 1))
    flat = idx[0] * side + idx[1]
    masses = np.bincount(flat, weights=samples.weights, minlength=bins)
    labels = np.zeros(bins, complex)
    conds = []
    order = np.argsort(flat, kind="stable")
    starts = np.searchsorted(flat[order], np.arange(bins + 1))
    for b in range(bins):
        sel = order[starts[b]:starts[b + 1]]
        if len(sel):
            wts = samples.weights[sel]
            labels[b] = np.sum(wts * c[sel]) / np.sum(wts)
        conds.append(EmpiricalConditional(samples.z[sel], c[sel], samples.weights[sel]))
    return Disintegration(masses, labels, conds, tuple(edges), {"kind": "empirical", "bins": bins})


@dataclass
class ReconstructionRow:
    form_id: str
    value_direct: complex
    value_reconstructed: complex

    @property
    def residual(self) -> float:
        scale = abs(self.value_direct)
        diff = abs(self.value_direct - self.value_reconstructed)
        return 0.0 if diff == 0 else diff / max(scale, 1e-300)


def reconstruct_and_compare(T: DirectedCurrent, dis: Disintegration | None, forms: list, fam: LeafFamily,
                            quad: Quadrature) -> list:
    """``T(omega)`` by leaf quadrature against ``int T_b(omega) dmu'`` from the disintegration."""
    rows = []
    for om in forms:
        direct = current_pair(T, om, fam, quad)
        recon = 0j if dis is None else dis.pair(om, fam)
        rows.append(ReconstructionRow(om.name, direct, recon))
    return rows


def residual_csv(rows, out=None) -> str:
    """CSV ``form_id,value_direct,value_reconstructed,residual``; pairings are written by their real part."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["form_id", "value_direct", "value_reconstructed", "residual"])
    for r in rows:
        wr.writerow([r.form_id, "%.17g" % r.value_direct.real, "%.17g" % r.value_reconstructed.real,
                     "%.17g" % r.residual])
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text


def closedness_residual(dis: Disintegration, fam: LeafFamily, forms01: list, g=None) -> float:
    """``max_j |int g T_b(del omega_j) dmu'|``; vanishes when every ``T_b`` is a closed leaf current."""
    if g is not None and not callable(g) and g == 0:
        return 0.0
    worst = 0.0
    for om in forms01:
        worst = max(worst, abs(dis.pair(om.partial(), fam, g)))
    return worst


def tilted_closedness_oracle(T: DirectedCurrent, fam: LeafFamily, forms01: list, quad: Quadrature,
                             tilt: float, g=None) -> float:
    """The tilted residual after integrating by parts along each leaf.

    With ``tau = 1 + tilt x1`` the leaf density of ``del omega`` is
    ``d/dz (p1 + p2 conj f')``, so ``int tau kappa dA = -(tilt / 2) int (p1 + p2 conj f') dA``.
    """
    worst = 0.0
    z = quad.nodes
    for om in forms01:
        total = 0j
        for c, m in T.atoms:
            cc = np.full(z.shape, c)
            w = fam._value(cc, z)
            s = fam._slope(cc, z)
            gamma = om.coef("1", z, w) + om.coef("2", z, w) * np.conj(s)
            weight = 1.0 if g is None else g(c)
            total += m * weight * (-2j) * (-tilt / 2) * quad.integrate(gamma)
        worst = max(worst, abs(total))
    return worst


def reconstruction_rate(T: DirectedCurrent, fam: LeafFamily, forms: list, quad: Quadrature, n: int,
                        reps: int = 20, bins: int = 64, seed: int = 0, factor: int = 4):
    """RMS reconstruction residual over ``reps`` independent seeds at ``n`` and ``factor * n`` samples.

    Returns ``(rms_n, rms_factor_n, ratio)``; Monte-Carlo error predicts a
    ratio near ``sqrt(factor)``.
    """
    direct = [current_pair(T, om, fam, quad) for om in forms]

    def rms(m, offset):
        errs = []
        for r in range(reps):
            dis = disintegrate(fam, riesz_samples(T, fam, m, quad, seed=seed + offset + r), bins)
            errs.extend(abs(d - dis.pair(om, fam)) / abs(d) for d, om in zip(direct, forms))
        return float(np.sqrt(np.mean(np.square(errs))))

    a = rms(n, 0)
    b = rms(factor * n, 10_000)
    return a, b, a / b
