import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from laminar.errors import ConfigurationError, PreconditionError
from laminar.estimates import (
    T0_CAP, GridConstants, NonvanishingSample, compute_t0, delta0_search, drift_profile,
    pair_slope_bound, random_nonvanishing_coefs, schwarz_battery, schwarz_log_bound,
    separation_check, two_leaf_battery,
)
from laminar.lamination import LeafFamily

from conftest import BUILTINS


# -- log bound on single samples -------------------------------------------------

def test_constant_has_zero_derivative():
    res = schwarz_log_bound(NonvanishingSample((-0.7 + 0.3j,)))
    assert res.lhs == 0.0
    assert res.holds


def test_exp_minus_one_minus_z():
    res = schwarz_log_bound(NonvanishingSample((-1.0, -1.0)))
    assert res.lhs == pytest.approx(math.exp(-1), rel=1e-14)
    assert res.rhs == pytest.approx(2 * math.exp(-1), rel=1e-14)
    assert res.holds


def test_small_slope_sample():
    res = schwarz_log_bound(NonvanishingSample((-0.1, -0.05)))
    assert res.lhs == pytest.approx(0.05 * math.exp(-0.1), rel=1e-14)
    assert res.rhs == pytest.approx(0.2 * math.exp(-0.1), rel=1e-14)
    assert res.holds


def test_derivative_matches_finite_difference():
    f = NonvanishingSample((-1.0, -0.3 + 0.2j, 0.1j))
    h = 1e-6
    fd = (f.value(h) - f.value(-h)) / (2 * h)
    assert abs(fd - f.derivative(0.0)) < 1e-9


def test_invalid_sample_rejected():
    # Re u = -0.5 + x reaches +0.5 on the unit circle
    with pytest.raises(PreconditionError):
        schwarz_log_bound(NonvanishingSample((-0.5, 1.0)))


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_random_samples_are_valid_and_obey_bound(seed, degree):
    u = random_nonvanishing_coefs(np.random.default_rng(seed), 5, degree=degree)
    for row in u:
        f = NonvanishingSample(tuple(row))
        assert f.is_valid()
        assert schwarz_log_bound(f).holds


def test_schwarz_battery_large():
    res = schwarz_battery(100_000, seed=7)
    assert res["violations"] == 0
    assert res["max_ratio"] <= 1.0


def test_battery_rejects_zero_samples():
    with pytest.raises(ConfigurationError):
        schwarz_battery(0)


def test_coarse_boundary_sampling_rejected():
    with pytest.raises(ConfigurationError):
        random_nonvanishing_coefs(np.random.default_rng(0), 3, degree=8, n_boundary=64)


# -- two-leaf estimate -------------------------------------------------------------

def test_pair_bound_product_zero():
    res = pair_slope_bound(BUILTINS["product"], 0.3, 0.1j, 0.2)
    assert res.lhs == 0.0 and res.holds


def test_pair_bound_shear_value():
    res = pair_slope_bound(LeafFamily.shear(0.5), 0.1, 0.0, 0.0)
    assert res.lhs == pytest.approx(0.05, rel=1e-13)
    assert res.rhs == pytest.approx(0.4 * math.log(10), rel=1e-13)
    assert res.holds


def test_pair_bound_exp_close_leaves():
    assert pair_slope_bound(LeafFamily.exp(0.2), 0.2 + 1e-3, 0.2, 0.25).holds


@pytest.mark.parametrize("c, c2, z", [(0.1, 0.0, 0.5), (0.1, 0.0, 0.6j), (0.2, 0.2, 0.0)])
def test_pair_bound_preconditions(c, c2, z):
    with pytest.raises(PreconditionError):
        pair_slope_bound(LeafFamily.shear(0.5), c, c2, z)


def test_pair_bound_far_leaves_rejected():
    with pytest.raises(PreconditionError):
        pair_slope_bound(BUILTINS["product"], 1.5, 0.0, 0.0)


def test_two_leaf_battery(family):
    res = two_leaf_battery(family, 10_000, seed=3)
    assert res["violations"] == 0
    assert res["checked"] + res["skipped"] == 10_000
    assert res["checked"] > 5_000


# -- grid constants ----------------------------------------------------------------

def test_delta0_product_top_of_grid():
    assert delta0_search(BUILTINS["product"]) == 1.0


@pytest.mark.parametrize("name", ["shear", "exp", "nonlinear"])
def test_delta0_positive(name):
    d0 = delta0_search(BUILTINS[name], 1.0)
    assert d0 > 0
    assert math.log2(d0) == int(math.log2(d0))
    if name == "shear":
        assert d0 >= 0.25


@pytest.mark.parametrize("name", ["product", "shear"])
def test_t0_cap_for_linear_families(name):
    assert compute_t0(BUILTINS[name], [0.1, 0.05]) == pytest.approx(T0_CAP)
    assert np.max(drift_profile(BUILTINS[name], 0.1, [T0_CAP])) < 1e-12


def test_t0_nonlinear_in_range():
    t0 = compute_t0(BUILTINS["nonlinear"], [0.1, 0.05], N=2, R=1.0)
    assert 0 < t0 <= T0_CAP


def test_t0_requires_two_neighbours():
    with pytest.raises(PreconditionError):
        compute_t0(BUILTINS["product"], [0.1], N=1)


def test_drift_does_not_grow_when_delta_shrinks():
    fam = BUILTINS["nonlinear"]
    radii = [0.05, 0.1, 0.17]
    coarse = drift_profile(fam, 0.2, radii)
    fine = drift_profile(fam, 0.05, radii)
    assert np.all(fine <= coarse * (1 + 1e-9) + 1e-12)


def test_separation_product_exact_ratio():
    rep = separation_check(BUILTINS["product"], 0.1, T0_CAP)
    assert rep.min_ratio == pytest.approx(10.0)
    assert rep.passed


def test_separation_shear_gap():
    rep = separation_check(LeafFamily.shear(0.5), 0.1, 0.17)
    # closed-form minimum gap is delta (1 - a t0)
    assert rep.min_ratio * 0.01 == pytest.approx(0.1 * (1 - 0.5 * 0.17), rel=1e-12)
    assert rep.passed


@pytest.mark.parametrize("delta", [0.2, 0.1, 0.05])
def test_separation_passes_on_builtins(family, delta):
    t0 = compute_t0(family, [delta])
    assert separation_check(family, delta, t0).passed


def test_sharp_bound_implies_square_bound():
    # e^{4 t0} <= 2 at the cap, so delta^{e^{4|z|}} >= delta^2
    assert math.exp(4 * T0_CAP) <= 2 + 1e-12
    rep = separation_check(BUILTINS["exp"], 0.05, T0_CAP)
    assert rep.min_sharp_ratio >= 1 - 1e-12
    assert rep.min_ratio >= 1


@pytest.mark.parametrize("kw", [dict(delta0=0.0, t0=0.1, R=1.0), dict(delta0=0.5, t0=0.0, R=1.0),
                                dict(delta0=0.5, t0=0.6, R=1.0), dict(delta0=0.5, t0=0.1, R=1.0, N=1)])
def test_grid_constants_validation(kw):
    with pytest.raises(ConfigurationError):
        GridConstants(**kw)


def test_grid_constants_roundtrip():
    g = GridConstants(0.5, 0.17, 1.0)
    assert GridConstants(**g.to_dict()) == g
