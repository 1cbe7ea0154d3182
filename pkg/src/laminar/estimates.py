"""Schwarz-lemma slope estimates and the grid constants they certify.

Existence statements ("there is a delta0", "there is a t0") are realized by
geometric grid search with dense deterministic sampling.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .lamination import LeafFamily

T0_CAP = 0.25 * math.log(2.0)
DRIFT_LIMIT = 0.1
REL_TOL = 1e-12


@dataclass(frozen=True)
class NonvanishingSample:
    """``f = exp(u)`` with ``u`` a polynomial whose real part is negative on the disc.

    ``coefs[k]`` is the coefficient of ``z**k`` in ``u``.
    """

    coefs: tuple
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coefs", tuple(complex(c) for c in self.coefs))

    def u(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, complex), np.array(self.coefs))

    def value(self, z):
        return np.exp(self.u(z))

    def derivative(self, z):
        du = np.polynomial.polynomial.polyder(np.array(self.coefs))
        return self.value(z) * np.polynomial.polynomial.polyval(np.asarray(z, complex), du)

    def max_real_part(self, n_boundary: int = 4096, shrink: float = 1e-6) -> float:
        # Re u is harmonic, so its max over the closed disc sits on the boundary
        theta = np.linspace(0, 2 * np.pi, n_boundary, endpoint=False)
        r = self.radius * (1 - shrink)
        return float(np.max(self.u(r * np.exp(1j * theta)).real))

    def is_valid(self) -> bool:
        return self.max_real_part() < 0


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    holds: bool


def schwarz_log_bound(f: NonvanishingSample) -> BoundCheck:
    """Check ``|f'(0)| <= 2 |f(0)| log(1/|f(0)|)`` for one sample."""
    if not f.is_valid():
        raise PreconditionError("Re u must be negative on the disc")
    u0 = f.coefs[0]
    u1 = f.coefs[1] if len(f.coefs) > 1 else 0j
    mod0 = math.exp(u0.real)
    lhs = abs(u1) * mod0
    rhs = 2 * mod0 * (-u0.real)
    return BoundCheck(lhs, rhs, lhs <= rhs * (1 + REL_TOL))


def random_nonvanishing_coefs(rng: np.random.Generator, n: int, degree: int = 4,
                              n_boundary: int = 128):
    """Draw ``n`` coefficient vectors of ``u = -s (1 + v)`` with ``sup |v| < 1``.

    ``v`` is scaled so its sampled boundary maximum is at most 0.995; for
    ``degree / n_boundary <= 1/32`` the true maximum exceeds the sampled one by
    less than 0.2 percent, so ``Re u < 0`` holds by construction.
    """
    if degree / n_boundary > 1 / 32:
        raise ConfigurationError("boundary sampling too coarse for the requested degree")
    v = rng.standard_normal((n, degree + 1)) + 1j * rng.standard_normal((n, degree + 1))
    # random decay so that low-order and high-order dominated samples both appear
    v *= rng.random((n, 1)) ** np.arange(degree + 1)
    theta = np.linspace(0, 2 * np.pi, n_boundary, endpoint=False)
    vander = np.exp(1j * np.outer(np.arange(degree + 1), theta))
    vmax = np.abs(v @ vander).max(axis=1)
    v *= (0.995 * rng.random(n) / vmax)[:, None]
    s = np.exp(rng.uniform(np.log(1e-3), np.log(50.0), n))
    u = -s[:, None] * v
    u[:, 0] -= s
    return u


def schwarz_battery(n: int, seed: int = 42, degree: int = 4, chunk: int = 20000) -> dict:
    """Vectorized check of the log bound over ``n`` random nonvanishing samples."""
    if n <= 0:
        raise ConfigurationError("sample count must be positive")
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        u = random_nonvanishing_coefs(rng, m, degree)
        mod0 = np.exp(u[:, 0].real)
        lhs = np.abs(u[:, 1]) * mod0
        rhs = 2 * mod0 * (-u[:, 0].real)
        bad = lhs > rhs * (1 + REL_TOL)
        violations += int(bad.sum())
        worst = max(worst, float(np.max(lhs / rhs)))
        done += m
    return {"samples": n, "violations": violations, "max_ratio": worst}


# -- two-leaf slope estimate ----------------------------------------------------

def _pair_terms(fam: LeafFamily, c, c2, z):
    d = np.abs(fam._value(c, z) - fam._value(c2, z))
    lhs = np.abs(fam._slope(c, z) - fam._slope(c2, z))
    with np.errstate(divide="ignore"):
        rhs = 4 * d * np.log(1 / d)
    return lhs, rhs, d


def _sup_difference(fam: LeafFamily, c, c2, n_boundary: int = 64):
    theta = np.linspace(0, 2 * np.pi, n_boundary, endpoint=False)
    zb = (1 - 1e-9) * np.exp(1j * theta)
    c = np.asarray(c, complex)[..., None]
    c2 = np.asarray(c2, complex)[..., None]
    return np.abs(fam._value(c, zb) - fam._value(c2, zb)).max(axis=-1)


def pair_slope_bound(fam: LeafFamily, c, c2, z) -> BoundCheck:
    """Check ``|f_c' - f_c2'| <= 4 |f_c - f_c2| log(1/|f_c - f_c2|)`` at ``z``."""
    c, c2, z = complex(c), complex(c2), complex(z)
    if abs(z) >= 0.5:
        raise PreconditionError("|z| must be < 1/2")
    if c == c2:
        raise PreconditionError("leaves must be distinct")
    if _sup_difference(fam, c, c2) >= 1:
        raise PreconditionError("|f_c - f_c2| must stay below 1 on the disc")
    lhs, rhs, _ = _pair_terms(fam, c, c2, z)
    lhs, rhs = float(lhs), float(rhs)
    return BoundCheck(lhs, rhs, lhs <= rhs * (1 + REL_TOL))


def two_leaf_battery(fam: LeafFamily, n: int, seed: int = 42) -> dict:
    """Randomized check of the two-leaf estimate; pairs with ``sup |f_c - f_c'| >= 1`` are skipped."""
    if n <= 0:
        raise ConfigurationError("sample count must be positive")
    rng = np.random.default_rng(seed)
    r = 2 * fam.R * np.sqrt(rng.random(n))
    c = r * np.exp(2j * np.pi * rng.random(n))
    dmod = np.exp(rng.uniform(np.log(1e-6), 0.0, n))
    c2 = c + dmod * np.exp(2j * np.pi * rng.random(n))
    # keep c2 inside |c| <= 2R
    over = np.abs(c2) > 2 * fam.R
    c2[over] = c[over] - (c2[over] - c[over])
    z = 0.5 * (1 - 1e-9) * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    keep = _sup_difference(fam, c, c2) < 1
    lhs, rhs, _ = _pair_terms(fam, c[keep], c2[keep], z[keep])
    bad = lhs > rhs * (1 + REL_TOL)
    return {
        "family": fam.label,
        "samples": n,
        "checked": int(keep.sum()),
        "skipped": int((~keep).sum()),
        "violations": int(bad.sum()),
        "max_ratio": float(np.max(lhs / np.where(rhs > 0, rhs, np.inf), initial=0.0)),
    }


# -- grid constants ---------------------------------------------------------------

@dataclass
class GridConstants:
    delta0: float
    t0: float
    R: float
    N: int = 2

    def __post_init__(self):
        if not self.delta0 > 0:
            raise ConfigurationError("delta0 must be positive")
        if not 0 < self.t0 <= 0.5:
            raise ConfigurationError("t0 must lie in (0, 1/2]")
        if self.N < 2:
            raise ConfigurationError("N must be at least 2")

    def to_dict(self):
        return asdict(self)


def delta0_search(fam: LeafFamily, R: float | None = None, n_samples: int = 20000,
                  seed: int = 0, min_exponent: int = 20) -> float:
    """Largest ``2**-k`` for which the two-leaf slope bound holds on every sampled pair.

    Pairs satisfy ``|c - c'| < delta0``, ``|c|, |c'| <= 2R``; base points fill
    ``|z| <= 1/2``.  A share of the samples sits on the extreme shell
    ``|c - c'| ~ delta0``, ``|z| = 1/2`` where violations appear first.
    """
    R = fam.R if R is None else R
    rng = np.random.default_rng(seed)
    n_edge = n_samples // 4
    for k in range(min_exponent + 1):
        d0 = 2.0 ** -k
        r = 2 * R * np.sqrt(rng.random(n_samples))
        c = r * np.exp(2j * np.pi * rng.random(n_samples))
        rho = np.sqrt(rng.random(n_samples))
        rho[:n_edge] = 1 - 1e-9
        c2 = c + d0 * rho * np.exp(2j * np.pi * rng.random(n_samples))
        # radial projection onto |c| <= 2R is 1-Lipschitz, so |c - c2| < d0 survives
        c2 = np.where(np.abs(c2) > 2 * R, c2 * (2 * R / np.abs(c2)), c2)
        rz = 0.5 * np.sqrt(rng.random(n_samples))
        rz[:n_edge] = 0.5
        z = rz * np.exp(2j * np.pi * rng.random(n_samples))
        distinct = c != c2
        lhs, rhs, d = _pair_terms(fam, c[distinct], c2[distinct], z[distinct])
        if np.all((d < 1) & (lhs <= rhs * (1 + REL_TOL))):
            return d0
    raise ConfigurationError(f"no delta0 above 2^-{min_exponent} certified for {fam.label}")


def grid_cells(delta: float, R: float):
    """Integer cells ``(j, k)`` with ``|(j + k i) delta| <= 2R``."""
    n = int(math.floor(2 * R / delta))
    j, k = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1), indexing="ij")
    j, k = j.ravel(), k.ravel()
    keep = np.abs((j + 1j * k) * delta) <= 2 * R * (1 + 1e-12)
    return j[keep], k[keep]


def drift_profile(fam: LeafFamily, delta: float, radii, N: int = 2, R: float | None = None,
                  n_angles: int = 32) -> np.ndarray:
    """Max over cells, offsets and angles of ``|w~_jk(z, f_{c(j+l,k+m)}(z)) - (l + m i)|`` per radius."""
    R = fam.R if R is None else R
    j, k = grid_cells(delta, R)
    base = (j + 1j * k) * delta
    offs = [(l, m) for l in range(-N + 1, N) for m in range(-N + 1, N)]
    theta = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    out = []
    for r in np.atleast_1d(radii):
        z = (r * np.exp(1j * theta))[None, :]
        f0 = fam._value(base[:, None], z)
        den = fam._value(base[:, None] + delta, z) - f0
        worst = 0.0
        for l, m in offs:
            wt = (fam._value(base[:, None] + (l + 1j * m) * delta, z) - f0) / den
            worst = max(worst, float(np.max(np.abs(wt - (l + 1j * m)))))
        out.append(worst)
    return np.array(out)


def t0_grid(cap: float = T0_CAP, n: int = 40, ratio: float = 2 ** -0.25):
    return cap * ratio ** np.arange(n)


def compute_t0(fam: LeafFamily, delta_list, N: int = 2, R: float | None = None,
               n_radii: int = 6, n_angles: int = 32) -> float:
    """Largest grid radius on which every sampled corner drifts less than 1/10.

    The drift is holomorphic in ``z`` so its maximum over a disc sits on the
    boundary circle; each candidate radius is still checked on ``n_radii``
    concentric circles.
    """
    if N < 2:
        raise PreconditionError("N must be at least 2")
    R = fam.R if R is None else R
    for t in t0_grid():
        radii = t * np.linspace(1.0 / n_radii, 1.0, n_radii) * (1 - 1e-12)
        ok = all(np.all(drift_profile(fam, d, radii, N, R, n_angles) < DRIFT_LIMIT) for d in delta_list)
        if ok:
            return float(t)
    raise ConfigurationError(f"no t0 found for {fam.label}")


@dataclass
class SeparationReport:
    min_ratio: float
    min_sharp_ratio: float
    passed: bool

    @property
    def pass_(self):
        return self.passed


def separation_check(fam: LeafFamily, delta: float, t0: float, R: float | None = None,
                     n_radii: int = 8, n_angles: int = 32) -> SeparationReport:
    """Sampled lower bounds for neighbouring grid leaves on ``|z| <= t0``.

    ``min_ratio`` is ``min gap / delta**2``; ``min_sharp_ratio`` is
    ``min gap / delta**exp(4|z|)`` along radial lines.  Both must be >= 1.
    """
    R = fam.R if R is None else R
    j, k = grid_cells(delta, R)
    base = ((j + 1j * k) * delta)[:, None]
    radii = np.linspace(0, t0, n_radii + 1)
    theta = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    rr, tt = np.meshgrid(radii, theta, indexing="ij")
    z = (rr * np.exp(1j * tt)).ravel()[None, :]
    gap = np.abs(fam._value(base + delta, z) - fam._value(base, z))
    ratio = float(gap.min() / delta ** 2)
    sharp = float(np.min(gap / delta ** np.exp(4 * np.abs(z))))
    return SeparationReport(ratio, sharp, ratio >= 1 and sharp >= 1 - 1e-12)


def certify(fam: LeafFamily, delta_list, N: int = 2, R: float | None = None, seed: int = 0) -> GridConstants:
    R = fam.R if R is None else R
    d0 = delta0_search(fam, R, seed=seed)
    t0 = compute_t0(fam, delta_list, N, R)
    return GridConstants(delta0=d0, t0=t0, R=R, N=N)

