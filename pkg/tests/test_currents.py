import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from laminar.currents import (
    Bump, DirectedCurrent, Disintegration, Quadrature, RieszSamples, TestForm, area_form, bump_battery_01,
    bump_battery_11, bump_form_01, closedness_residual, current_pair, disintegrate, dw_wedge,
    hermitian_bump_form, lambda_lambdabar, lambda_wedge, leaf_integral, omega_on_v, pullback_coefficient,
    reconstruct_and_compare, residual_csv, riesz_samples, tangent_2field, tilted_closedness_oracle,
    wedge_defect,
)
from laminar.errors import ConfigurationError, DomainError
from laminar.lamination import LeafFamily

from conftest import BUILTINS

QUAD = Quadrature(64)
SHEAR = BUILTINS["shear"]
PRODUCT = BUILTINS["product"]
RHO = Bump(0.1, 0.3)

# scipy.integrate.quad of 2 pi r exp(1 - 1/(1 - r^2/0.09)) over [0, 0.3]
RADIAL_BUMP_INTEGRAL = 0.11413009450148366


def _radial_integral(radius):
    f = lambda r: 2 * math.pi * r * math.exp(1 - 1 / (1 - (r / radius) ** 2)) if r < radius else 0.0  # noqa: E731
    return integrate.quad(f, 0, radius, epsabs=1e-14, epsrel=1e-13)[0]


def test_frozen_oracle_is_current():
    assert _radial_integral(0.3) == pytest.approx(RADIAL_BUMP_INTEGRAL, rel=1e-12)


# -- quadrature -----------------------------------------------------------------

def test_quadrature_polynomial_exactness():
    q = Quadrature(8, center=0.1 - 0.2j, half_width=0.3)
    x, y = q.nodes.real - 0.1, q.nodes.imag + 0.2
    # int x^14 y^2 over the square: (2 h^15 / 15)(2 h^3 / 3)
    h = 0.3
    assert q.integrate(x ** 14 * y ** 2) == pytest.approx((2 * h ** 15 / 15) * (2 * h ** 3 / 3), rel=1e-12)
    assert q.area() == pytest.approx(0.36, rel=1e-14)
    assert np.all(q.weights > 0)


def test_quadrature_validation():
    with pytest.raises(ConfigurationError):
        Quadrature(0)
    with pytest.raises(ConfigurationError):
        Quadrature(8, half_width=0.0)


# -- leaf integrals -------------------------------------------------------------

def test_product_area_bump_matches_radial_oracle():
    om = area_form(RHO, (RHO.center, RHO.radius))
    val = leaf_integral(PRODUCT, 0.0, om, QUAD)
    assert val.real == pytest.approx(RADIAL_BUMP_INTEGRAL, rel=1e-5)
    assert abs(val.imag) < 1e-15
    assert leaf_integral(PRODUCT, 0.0, om, Quadrature(128)).real == pytest.approx(RADIAL_BUMP_INTEGRAL, rel=1e-7)


def test_shear_dw_dwbar_oracle():
    # (i/2) rho dw ^ dwb pulls back to |c a|^2 (i/2) rho dz ^ dzb
    om = TestForm((1, 1), {"22": lambda z, w: 0.5j * RHO(z) + 0 * w}, (RHO.center, RHO.radius))
    c = 1 + 0.5j
    expect = abs(c * 0.5) ** 2 * RADIAL_BUMP_INTEGRAL
    assert expect == pytest.approx(0.03566565453171365, rel=1e-14)
    assert leaf_integral(SHEAR, c, om, QUAD).real == pytest.approx(expect, rel=1e-5)


def test_support_disjoint_from_leaf():
    om = hermitian_bump_form(RHO, Bump(3.0, 0.5), 1.0, 0.2j, 1.0)
    assert leaf_integral(SHEAR, 0.2, om, QUAD) == 0


def test_lambda_lambdabar_vanishes(family):
    om = lambda_lambdabar(family, RHO, (RHO.center, RHO.radius))
    for c in (0.0, 0.7 - 0.3j, -1.2j):
        assert abs(leaf_integral(family, c, om, QUAD)) < 1e-14


def test_leaf_integral_domain_errors():
    om = area_form(RHO, (RHO.center, RHO.radius))
    with pytest.raises(ConfigurationError):
        leaf_integral(PRODUCT, 0.0, om, Quadrature(16, half_width=0.75))
    with pytest.raises(ConfigurationError):
        leaf_integral(PRODUCT, 0.0, area_form(RHO, (0.4, 0.3)), QUAD)
    with pytest.raises(ConfigurationError):
        leaf_integral(PRODUCT, 0.0, bump_battery_01(1)[0], QUAD)
    with pytest.raises(DomainError):
        leaf_integral(PRODUCT, 5.0, om, QUAD)


# -- pairing --------------------------------------------------------------------

def test_single_atom_equals_leaf_integral():
    om = bump_battery_11(1, seed=4)[0]
    c = 0.3 - 0.2j
    assert current_pair(DirectedCurrent([(c, 1.0)]), om, SHEAR, QUAD) == pytest.approx(
        leaf_integral(SHEAR, c, om, QUAD), rel=1e-13)


def test_linearity_in_atoms_and_forms(family):
    om1 = hermitian_bump_form(Bump(0.05, 0.3), Bump(0.1j, 3.0), 1.0, 0.3 - 0.1j, 0.7)
    om2 = hermitian_bump_form(Bump(-0.1, 0.35), Bump(0.4, 2.0), 0.6, 0.2j, 1.3)
    c1, c2 = 0.2 + 0.1j, -0.4 + 0.5j
    i1 = leaf_integral(family, c1, om1, QUAD)
    i2 = leaf_integral(family, c2, om1, QUAD)
    T = DirectedCurrent([(c1, 2.0), (c2, 3.0)])
    assert abs(current_pair(T, om1, family, QUAD) - (2 * i1 + 3 * i2)) <= 1e-12 * abs(2 * i1 + 3 * i2)
    combo = om1 + om2.scaled(-1.5)
    lhs = current_pair(T, combo, family, QUAD)
    rhs = current_pair(T, om1, family, QUAD) - 1.5 * current_pair(T, om2, family, QUAD)
    assert abs(lhs - rhs) <= 1e-12 * max(1, abs(rhs))


def test_hermitian_forms_pair_to_reals(family):
    T = DirectedCurrent.random(4, seed=2)
    for om in bump_battery_11(4, seed=1):
        v = current_pair(T, om, family, QUAD)
        assert abs(v.imag) <= 1e-13 * abs(v) and v.real > 0


def test_uniform_current_matches_per_leaf_oracle():
    T = DirectedCurrent([(c, 1.0) for c in (0, 0.5, -0.5j, 1 + 1j, -0.8)])
    om = area_form(RHO, (RHO.center, RHO.radius)) + TestForm(
        (1, 1), {"22": lambda z, w: 0.5j * RHO(z) + 0 * w}, (RHO.center, RHO.radius))
    # per leaf: (1 + |c a|^2) int rho dA
    oracle = sum((1 + abs(0.5 * c) ** 2) * RADIAL_BUMP_INTEGRAL for c in T.params)
    assert current_pair(T, om, SHEAR, QUAD).real == pytest.approx(oracle, rel=1e-5)


def test_empty_current_pairs_to_zero():
    assert current_pair(DirectedCurrent([]), bump_battery_11(1)[0], SHEAR, QUAD) == 0


def test_sum_support_is_enclosing_disc():
    a = area_form(RHO, (0.1, 0.2))
    b = area_form(RHO, (-0.1, 0.2))
    c, r = (a + b).z_support
    assert (c, r) == (pytest.approx(0.0), pytest.approx(0.3))
    assert (a + area_form(RHO, (0.1, 0.05))).z_support == (0.1, 0.2)


def test_current_validation():
    with pytest.raises(ConfigurationError):
        DirectedCurrent([(0.0, -1.0)])
    with pytest.raises(ConfigurationError):
        DirectedCurrent([(complex("nan"), 1.0)])
    T = DirectedCurrent.random(3, seed=1)
    assert DirectedCurrent.from_record(T.to_record()) == T


# -- tangent fields and omega(v) --------------------------------------------------

def test_tangent_examples():
    v1, v2 = tangent_2field(PRODUCT, 0.3, 0.2)
    np.testing.assert_array_equal(v1, [1, 0])
    np.testing.assert_array_equal(v2, [1j, 0])
    v1, v2 = tangent_2field(LeafFamily.shear(0.5), 1.0, 0.3)
    np.testing.assert_allclose(v1, [1, 0.5])
    np.testing.assert_allclose(v2, [1j, 0.5j])
    v1, _ = tangent_2field(LeafFamily.exp(0.2), 1.0, 0.0)
    np.testing.assert_allclose(v1, [1, 0.2])


def test_dz_dzbar_normalization(family):
    om = TestForm((1, 1), {"11": lambda z, w: 1 + 0 * w})
    assert omega_on_v(om, family, 0.4 - 0.1j, 0.2j) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 1), st.floats(0, 1))
def test_kappa_roundtrip(kr, ki, r, a):
    kappa = complex(kr, ki)
    om = TestForm((1, 1), {"11": lambda z, w: kappa + 0 * w})
    z = 0.9 * math.sqrt(r) * complex(math.cos(6.3 * a), math.sin(6.3 * a))
    for fam in BUILTINS.values():
        assert omega_on_v(om, fam, 0.5 + 0.2j, z) == kappa


@given(st.integers(0, 10_000), st.floats(0, 1), st.floats(0, 1))
def test_alternating_evaluation_matches_substitution(seed, r, a):
    om = bump_battery_11(1, seed=seed, z_radius=0.45, w_radius=3.0)[0]
    z = 0.4 * math.sqrt(r) * complex(math.cos(6.3 * a), math.sin(6.3 * a))
    for fam in BUILTINS.values():
        c = 0.3 - 0.6j
        direct = omega_on_v(om, fam, c, z)
        subst = pullback_coefficient(om, fam, c, z)
        assert abs(direct - subst) <= 1e-13 * max(1, abs(subst))


def test_leaf_annihilating_forms(family):
    s = lambda z, w: family._slope(family._project(z, w)[0], z)  # noqa: E731
    dz_lbar = TestForm((1, 1), {"11": lambda z, w: -np.conj(s(z, w)), "12": lambda z, w: 1 + 0 * w})
    l_dzbar = TestForm((1, 1), {"11": lambda z, w: -s(z, w), "21": lambda z, w: 1 + 0 * w})
    llbar = lambda_lambdabar(family, lambda z: 1 + 0 * z)
    for om in (dz_lbar, l_dzbar, llbar):
        for c, z in [(0.1, 0.2), (-0.5 + 0.9j, -0.3j), (1.4j, 0.6 + 0.1j)]:
            assert abs(omega_on_v(om, family, c, z)) < 1e-15


def test_omega_on_v_rejects_01_forms():
    with pytest.raises(ConfigurationError):
        omega_on_v(bump_battery_01(1)[0], PRODUCT, 0, 0)


# -- wedge defect ---------------------------------------------------------------

def test_wedge_defect_vanishes(family):
    forms = bump_battery_01(10, seed=0)
    for s in range(10):
        T = DirectedCurrent.random(1 + s % 10, seed=s)
        assert max(wedge_defect(T, phi, family, QUAD) for phi in forms) <= 1e-8


def test_wedge_with_zero_form():
    zero = TestForm((0, 1), {}, (0j, 0.3))
    assert wedge_defect(DirectedCurrent.random(3), zero, SHEAR, QUAD) == 0.0


def test_negative_control_on_shear():
    T = DirectedCurrent([(1.0, 1.0)])
    forms = bump_battery_01(10, seed=0)
    assert min(wedge_defect(T, phi, SHEAR, QUAD, control=True) for phi in forms) > 1e-3


def test_negative_control_oracle():
    # dw ^ (p1 dzb) pulls back to f' p1 dz ^ dzb; with p1 = rho(z) and f' = 0.5 on the leaf c = 1
    phi = TestForm((0, 1), {"1": lambda z, w: RHO(z) + 0 * w}, (RHO.center, RHO.radius))
    val = abs(current_pair(DirectedCurrent([(1.0, 1.0)]), dw_wedge(phi), SHEAR, QUAD))
    assert val == pytest.approx(2 * 0.5 * RADIAL_BUMP_INTEGRAL, rel=1e-5)
    assert abs(current_pair(DirectedCurrent([(1.0, 1.0)]), lambda_wedge(SHEAR, phi), SHEAR, QUAD)) < 1e-15


def test_wedge_requires_01():
    with pytest.raises(ConfigurationError):
        wedge_defect(DirectedCurrent.random(2), bump_battery_11(1)[0], SHEAR, QUAD)


# -- disintegration ---------------------------------------------------------------

def test_single_leaf_single_bin():
    s = riesz_samples(DirectedCurrent([(0.0, 1.0)]), SHEAR, 2000, QUAD)
    dis = disintegrate(SHEAR, s, bins=16)
    assert dis.occupied == 1
    assert dis.total_mass == pytest.approx(1.0, rel=1e-14)


def test_product_uniform_cloud_is_flat():
    rng = np.random.default_rng(3)
    n = 100_000
    z = 0.5 * ((2 * rng.random(n) - 1) + 1j * (2 * rng.random(n) - 1))
    w = rng.random(n) + 1j * rng.random(n)
    s = RieszSamples(z, w, np.full(n, 1.0 / n), w)
    dis = disintegrate(PRODUCT, s, bins=16)
    counts = dis.masses * n
    expected = n / 16
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    assert chi2 < 37.7     # 99.9% quantile of chi-square with 15 dof
    for cond in dis.conditionals:
        assert abs(cond.expect(lambda c, z: z.real)) < 0.02
        assert cond.expect(lambda c, z: z.real ** 2) == pytest.approx(1 / 12, rel=0.05)


def test_two_leaf_mass_ratio():
    T = DirectedCurrent([(0.0, 1.0), (1.0, 1.0)])
    dis = disintegrate(SHEAR, riesz_samples(T, SHEAR, 10_001, QUAD, seed=5), bins=4)
    m = dis.masses[dis.masses > 0]
    assert len(m) == 2
    assert m[0] / m[1] == pytest.approx(1.0, abs=0.02)


@given(st.integers(0, 1000), st.integers(1, 6), st.sampled_from([1, 4, 16, 64]))
def test_mass_conservation(seed, atoms, bins):
    T = DirectedCurrent.random(atoms, seed=seed)
    s = riesz_samples(T, SHEAR, 500, QUAD, seed=seed)
    dis = disintegrate(SHEAR, s, bins)
    assert dis.total_mass == pytest.approx(float(np.sum(s.weights)), rel=1e-13)
    assert dis.total_mass == pytest.approx(T.mass * QUAD.area(), rel=1e-13)


def test_disintegrate_errors():
    T = DirectedCurrent.random(2)
    with pytest.raises(ConfigurationError):
        disintegrate(SHEAR, riesz_samples(T, SHEAR, 0, QUAD))
    with pytest.raises(ConfigurationError):
        disintegrate(SHEAR, riesz_samples(T, SHEAR, 100, QUAD), bins=10)
    with pytest.raises(ConfigurationError):
        riesz_samples(T, SHEAR, -1, QUAD)


def test_samples_independent_of_atom_order():
    T = DirectedCurrent([(0.1, 1.0), (0.5j, 2.0)])
    a = riesz_samples(T, SHEAR, 1000, QUAD, seed=3)
    b = riesz_samples(T, SHEAR, 1000, QUAD, seed=3)
    np.testing.assert_array_equal(a.z, b.z)
    np.testing.assert_array_equal(a.w, b.w)


# -- reconstruction ----------------------------------------------------------------

def test_single_atom_reconstruction():
    T = DirectedCurrent([(0.3 + 0.2j, 1.5)])
    forms = bump_battery_11(5, seed=0)
    dis = disintegrate(SHEAR, riesz_samples(T, SHEAR, 100_000, QUAD, seed=1), bins=64)
    rows = reconstruct_and_compare(T, dis, forms, SHEAR, QUAD)
    assert max(r.residual for r in rows) <= 0.01


def test_exact_disintegration_reconstructs_to_quadrature_precision(family):
    T = DirectedCurrent.random(5, seed=8)
    rows = reconstruct_and_compare(T, Disintegration.from_current(T, QUAD), bump_battery_11(5), family, QUAD)
    assert max(r.residual for r in rows) <= 1e-12


def test_empty_current_reconstruction(tmp_path):
    rows = reconstruct_and_compare(DirectedCurrent([]), None, bump_battery_11(3), SHEAR, QUAD)
    assert all(r.residual == 0 for r in rows)
    text = residual_csv(rows, tmp_path / "r.csv")
    assert text.splitlines()[0] == "form_id,value_direct,value_reconstructed,residual"
    assert (tmp_path / "r.csv").read_text() == text


# -- closedness -------------------------------------------------------------------

def _closed_setup():
    T = DirectedCurrent.random(5, seed=4)
    return T, bump_battery_01(6, seed=2, z_radius=0.45)


def test_closedness_uniform(family):
    T, forms = _closed_setup()
    dis = Disintegration.from_current(T, QUAD)
    assert closedness_residual(dis, family, forms) <= 1e-4
    assert closedness_residual(dis, family, forms, g=lambda c: 1 + c.real) <= 1e-4


def test_closedness_tilted_matches_oracle(family):
    T, forms = _closed_setup()
    tilt = 1.5
    dis = Disintegration.from_current(T, QUAD, tau=lambda z: 1 + tilt * z.real)
    measured = closedness_residual(dis, family, forms)
    # the tilted leaf measure has mass ratio 1 to the area measure, so the oracle applies as is
    oracle = tilted_closedness_oracle(T, family, forms, QUAD, tilt)
    assert measured > 0.05
    assert measured == pytest.approx(oracle, rel=1e-4)


def test_closedness_zero_weight():
    T, forms = _closed_setup()
    dis = Disintegration.from_current(T, QUAD, tau=lambda z: 1 + z.real)
    assert closedness_residual(dis, SHEAR, forms, g=0) == 0.0
    assert closedness_residual(dis, SHEAR, forms, g=lambda c: 0.0) == 0.0


def test_partial_of_bump_matches_finite_difference():
    phi = bump_form_01(Bump(0.05, 0.3), Bump(0.2j, 2.0), 1 + 1j, -0.5, 0.3j, 0.1)
    z, w, h = 0.1 + 0.05j, 0.3 - 0.1j, 1e-6
    # Wirtinger d/dz = (d/dx - i d/dy) / 2
    for key in ("1", "2"):
        f = lambda z, w: phi.coef(key, z, w)  # noqa: E731
        dz = ((f(z + h, w) - f(z - h, w)) - 1j * (f(z + 1j * h, w) - f(z - 1j * h, w))) / (4 * h)
        dw = ((f(z, w + h) - f(z, w - h)) - 1j * (f(z, w + 1j * h) - f(z, w - 1j * h))) / (4 * h)
        assert abs(dz - phi.d_z[key](z, w)) < 1e-8
        assert abs(dw - phi.d_w[key](z, w)) < 1e-8


def test_partial_requires_derivatives():
    with pytest.raises(ConfigurationError):
        TestForm((0, 1), {"1": lambda z, w: z}).partial()
    with pytest.raises(ConfigurationError):
        bump_battery_11(1)[0].partial()
    with pytest.raises(ConfigurationError):
        TestForm((2, 0), {})
