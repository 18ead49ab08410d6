import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_weighted.series import GridSpec, TruncatedSeries, sup_estimate
from volterra_weighted.weights import (
    AnalyticWitness,
    LPSpec,
    WeightSpecError,
    associated_weight_bounds,
    check_property_L,
    check_property_U,
    custom,
    dyadic_radius,
    essential_constant_estimate,
    extremal_lp,
    is_normal,
    logarithmic,
    make_weight,
    monomial_bounds,
    one,
    resolve_associated,
    standard,
    weight_report,
)

def _superpoly():
    """Decays faster than every power of 1 - r, so (U) fails."""
    return custom(lambda r: np.exp(-0.5 * np.log1p(-r) ** 2), "superpoly")


CATALOG = ["std:0.5", "std:1", "std:2", "log:0.5", "log:1", "one",
           "product:std:1,log:1", "omega:std:1"]


@pytest.mark.parametrize("spec", CATALOG)
def test_spec_round_trip_and_basic_shape(spec):
    w = make_weight(spec)
    assert make_weight(w.spec).spec == w.spec
    r = np.linspace(0, 0.999, 200)
    v = w(r)
    assert np.all(v > 0) and np.all(np.diff(v) <= 1e-15)
    w.validate()


@pytest.mark.parametrize("spec", CATALOG)
def test_witness_reproduces_weight(spec):
    w = make_weight(spec)
    assert w.analytic
    assert w.analytic_witness.max_relative_error(w, levels=20) < 1e-10


def test_closed_forms():
    r = np.array([0.0, 0.5, 0.9])
    np.testing.assert_allclose(standard(2)(r), (1 - r ** 2) ** 2)
    np.testing.assert_allclose(logarithmic(1)(r), 1 / (1 + np.log(1 / (1 - r ** 2))))
    np.testing.assert_allclose(make_weight("omega:std:1")(r), (1 - r ** 2) ** 2)
    np.testing.assert_allclose(make_weight("product:std:1,log:1")(r),
                               (1 - r ** 2) / (1 + np.log(1 / (1 - r ** 2))))
    assert one().boundary_value() == 1.0 and standard(1).boundary_value() == 0.0


@pytest.mark.parametrize("bad", ["", "std", "std:-1", "std:abc", "foo:1", "omega:",
                                 "std:1 junk", "log:0"])
def test_bad_specs_raise(bad):
    with pytest.raises(WeightSpecError):
        make_weight(bad)


def test_witness_validation():
    with pytest.raises(ValueError):
        AnalyticWitness(np.array([1.0, -0.5]))
    with pytest.raises(ValueError):
        AnalyticWitness(np.array([0.0, 1.0]))


def test_custom_weight_flags():
    w = custom(lambda r: (1 - r * r) ** 3, "cube")
    assert not w.analytic and w.typical
    assert not w.quasi_normal_whitelisted


def test_dyadic_radius():
    assert dyadic_radius(3) == pytest.approx(0.875)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_standard_weights_are_normal(alpha):
    w = standard(alpha)
    u = check_property_U(w)
    assert u.holds
    # the dyadic ratio tends to 2^-alpha
    assert u.table[-1]["ratio"] == pytest.approx(2 ** -alpha, abs=1e-3)
    assert check_property_L(w).holds
    assert is_normal(w)


@pytest.mark.parametrize("spec", ["log:0.5", "log:1", "one"])
def test_u_without_l(spec):
    w = make_weight(spec)
    holds_u, _ = check_property_U(w)
    holds_l, _ = check_property_L(w)
    assert holds_u and not holds_l
    assert not is_normal(w)


def test_l_fails_for_fast_decay():
    assert not check_property_U(_superpoly()).holds


def test_monomial_bounds_bracket_point_evaluation():
    w = standard(1.0)
    mb = monomial_bounds(w, 64)
    up = mb.upper(np.array([0.0, 0.5]))
    assert up[0] == pytest.approx(1.0)
    assert 0.75 <= up[1] <= 0.7699 + 1e-3


@pytest.mark.parametrize("spec", ["std:1", "log:1"])
def test_sandwich_is_ordered(spec):
    w = make_weight(spec)
    s = associated_weight_bounds(w, [0.3, 0.7, 0.95], lp=LPSpec(degree=16))
    assert np.all(s.lower <= s.upper + 1e-15)
    assert np.all(s.upper <= s.monomial_upper + 1e-15)
    np.testing.assert_allclose(s.lower, w(np.array([0.3, 0.7, 0.95])))


def test_lp_extremal_function_is_certified():
    w = standard(1.0)
    f, value, rows = extremal_lp(w, 0.5, LPSpec(degree=16))
    assert rows > 0
    norm = sup_estimate(f, w, GridSpec(levels=12, n_theta=512)).value
    # value = f(r) / ||f||, a lower bound for 1/nu~(r) <= 1/nu(r)
    assert value == pytest.approx(f(0.5).real / norm, rel=1e-9)
    assert value <= 1.0 / 0.75 + 1e-9
    assert 1.0 / value == pytest.approx(0.75, rel=1e-5)


def test_essential_constant_close_to_one_for_analytic_weight():
    c = essential_constant_estimate(standard(1.0), [0.5, 0.9])
    assert 1.0 <= c < 1.05


def test_resolution_policies():
    assert resolve_associated(standard(1)).policy == "analytic"
    w = custom(lambda r: (1 - r * r), "plain")
    assert resolve_associated(w).policy == "property_U"
    res = resolve_associated(_superpoly())
    assert res.policy == "sandwich"
    r = np.array([0.2, 0.6])
    assert np.all(res.upper(r) >= res.lower(r))


def test_report_shape():
    rep = weight_report(standard(1.0), (0.5,), 12, LPSpec(degree=16))
    assert rep["flags"]["normal"] and rep["flags"]["U"]
    assert len(rep["dyadic_table"]) == 13
    assert rep["sandwich"]["radii"] == [0.5]


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.0, 0.999))
def test_standard_weight_matches_formula(alpha, r):
    assert standard(alpha)(np.array([r]))[0] == pytest.approx((1 - r * r) ** alpha, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["std:1", "log:1", "std:0.5"]), st.floats(0.0, 0.99))
def test_monomial_upper_dominates_weight(spec, r):
    w = make_weight(spec)
    up = monomial_bounds(w, 256).upper(np.array([r]))[0]
    assert up >= float(w(np.array([r]))[0]) * (1 - 1e-12)
