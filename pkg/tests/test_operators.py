import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_weighted.operators import (
    CATALOG,
    NormEstimate,
    SearchSpec,
    apply_Sg,
    apply_Tg,
    cauchy_constant,
    log_bloch_seminorm,
    make_symbol,
    opnorm_lower,
)
from volterra_weighted.series import GridSpec, TruncatedSeries, differentiate, weighted_sup_norm
from volterra_weighted.weights import make_weight, one, standard

from conftest import random_series

NU1 = standard(1.0)


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_coefficients_match_closed_form(name):
    assert make_symbol(name).coefficient_mismatch() < 1e-12


@pytest.mark.parametrize("name", CATALOG + ("poly:[1, 2, 3]",))
def test_tg_of_one_and_sg_of_constant(backend, name):
    g = make_symbol(name)
    d = max(g.coeffs.degree, 1)
    t1 = apply_Tg(TruncatedSeries([1.0]), g, d)
    want = g.coeffs.truncated(d).coeffs.copy()
    want[0] = 0
    assert np.array_equal(t1.coeffs, want)
    assert not np.any(apply_Sg(TruncatedSeries([3.5 - 1j]), g, d).coeffs)


def test_operators_against_quadrature(backend, rng):
    g = make_symbol("cayleypow:0.5")
    f = TruncatedSeries(random_series(rng, 6))
    z = 0.6 * np.exp(0.7j)
    s = np.linspace(0, 1, 2001)
    path = s * z

    def trap(vals):
        return np.sum((vals[1:] + vals[:-1]) / 2) * (s[1] - s[0]) * z

    tg = trap(f(path) * g.dg(path))
    sg = trap(differentiate(f)(path) * g.g(path))
    assert abs(apply_Tg(f, g, 600)(z) - tg) < 1e-6
    assert abs(apply_Sg(f, g, 600)(z) - sg) < 1e-6


def test_out_degree_validation():
    with pytest.raises(ValueError):
        apply_Tg([1.0], make_symbol("identity"), 0)
    with pytest.raises(ValueError):
        make_symbol("nosuch")
    with pytest.raises(ValueError):
        make_symbol("poly:[]")
    with pytest.raises(ValueError):
        make_symbol("cayleypow:x")


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6),
       st.lists(st.floats(-3, 3), min_size=2, max_size=6))
def test_tg_and_sg_add_up_to_product(fc, gc):
    # T_g f + S_g f = f g - f(0) g(0)
    f = TruncatedSeries(fc)
    g = make_symbol("poly:" + str(list(gc)))
    d = f.degree + g.coeffs.degree
    lhs = apply_Tg(f, g, d) + apply_Sg(f, g, d)
    prod = np.convolve(f.coeffs, g.coeffs.coeffs)
    prod[0] = 0
    np.testing.assert_allclose(lhs.truncated(d).coeffs, np.pad(prod, (0, d + 1 - prod.size))[: d + 1],
                               atol=1e-9)


@pytest.mark.parametrize("name,kind,verdict,value", [
    ("neglog1mz", "log_gprime", "Finite", 2.0),
    ("identity", "log_gprime", "Finite", 0.0),
    ("cayleypow:0.5", "log_gprime", "Finite", 3.0),
    ("cayleypow:1", "log_gprime", "Finite", 4.0),
    ("expz", "log_gprime", "Finite", 1.0),
    ("neglog1mz", "log_g", "Divergent", None),
    ("identity", "log_g", "Divergent", None),
    ("zero", "log_gprime", "Divergent", None),
    ("poly:[1, 2, 3]", "log_gprime", "Divergent", None),
])
def test_log_bloch_verdicts(name, kind, verdict, value):
    res = log_bloch_seminorm(kind, make_symbol(name))
    assert res.verdict == verdict
    if value is not None:
        assert res.value == pytest.approx(value, abs=1e-3)


def test_log_bloch_detects_zero_between_samples():
    # g' = 2 + 6z vanishes at -1/3, off every grid ray only by chance
    res = log_bloch_seminorm("log_gprime", make_symbol("poly:[1, 2, 3]"), GridSpec(n_theta=7))
    assert res.verdict == "Divergent"


def test_cauchy_constant_dominates_random_ratios(rng):
    c = cauchy_constant(NU1)
    assert 1.0 < c < 10.0
    grid = GridSpec(levels=10, n_theta=128)
    omega = standard(2.0)
    for _ in range(5):
        f = TruncatedSeries(random_series(rng, 12))
        assert weighted_sup_norm(differentiate(f), omega, grid) <= c * weighted_sup_norm(f, NU1, grid)


def test_opnorm_lower_oracles():
    g = make_symbol("neglog1mz")
    est = opnorm_lower("Tg", g, NU1, NU1)
    assert 0.60 <= est.lower <= 1.0173824 * 1.01
    assert est.witness["family"]
    assert opnorm_lower("Tg", make_symbol("zero"), NU1, NU1).lower == 0.0


def test_opnorm_is_seeded():
    g = make_symbol("cayleypow:0.5")
    spec = SearchSpec(degree=4, n_random=4, restarts=1, sweeps=1, seed=7)
    a = opnorm_lower("Sg", g, NU1, NU1, search=spec)
    b = opnorm_lower("Sg", g, NU1, NU1, search=spec)
    assert a.to_dict() == b.to_dict()


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("VOLTERRA_SEED", "99")
    assert SearchSpec.from_env().seed == 99
    assert SearchSpec.from_env(seed=3).seed == 3
    with pytest.raises(ValueError):
        SearchSpec(degree=0)


def test_bloch_spaces_and_bad_names():
    est = opnorm_lower("Sg", make_symbol("identity"), NU1, NU1, "Bloch", "Bloch",
                       SearchSpec(degree=4, n_random=2, restarts=1, sweeps=1))
    assert est.lower > 0
    with pytest.raises(ValueError):
        opnorm_lower("Xg", make_symbol("identity"), NU1, NU1)


def test_norm_estimate_consistency():
    assert NormEstimate(1.0, 1.0).consistent()
    assert NormEstimate(1.0, 0.98).consistent() is False
    assert NormEstimate(1.0, None).consistent() is None
    assert one()(np.array([0.3]))[0] == 1.0
