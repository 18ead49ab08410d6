import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

from volterra_weighted.criteria import (
    AssocPolicy,
    QuadSpec,
    boundedness_sup,
    compactness_double_limit,
    pointwise_quantity,
    radial_integral,
    sg_into_hinf_compact,
)
from volterra_weighted.operators import SymbolSpec, make_symbol
from volterra_weighted.series import GridSpec, TruncatedSeries
from volterra_weighted.weights import custom, make_weight, one, standard

NU1, NU2 = standard(1.0), standard(2.0)
NEGLOG, IDENT, ZERO = make_symbol("neglog1mz"), make_symbol("identity"), make_symbol("zero")


def q_closed(t):
    return (1 - t * t) * (0.25 * math.log(1 / (1 - t)) + 0.5 * t / (1 - t) + 0.25 * math.log1p(t))


def test_radial_integral_log_divergence():
    assert radial_integral("IT", NEGLOG, one(), 0.0, 0.0, 1 - 2.0 ** -10) == pytest.approx(
        10 * math.log(2), rel=1e-9)


def test_radial_integral_is_and_ib():
    t = 0.999
    assert radial_integral("IS", make_symbol("poly:[1]"), one(), 0.0, 0.0, t) == pytest.approx(
        math.atanh(t), rel=1e-9)
    want = scipy_quad(lambda r: abs(math.exp(r * math.cos(1.0))) / (1 - r * r), 0, 0.9)[0]
    assert radial_integral("IB", make_symbol("expz"), NU1, 1.0, 0.0, 0.9) == pytest.approx(
        want, rel=1e-8)


@pytest.mark.parametrize("t", [0.3, 0.9, 0.9664, 0.999, 1 - 2.0 ** -14])
def test_q_partial_fractions(t):
    got = (1 - t * t) * radial_integral("IT", NEGLOG, NU1, 0.0, 0.0, t)
    assert got == pytest.approx(q_closed(t), rel=1e-9)


def test_radial_integral_reports_bad_radius():
    bad = SymbolSpec("bad", TruncatedSeries([0.0, 1.0]), lambda z: z,
                     lambda z: np.where(np.abs(z) > 0.5, np.nan, 1.0), lambda z: 0 * z)
    with pytest.raises(FloatingPointError, match="r=0.5"):
        radial_integral("IT", bad, NU1, 0.0, 0.0, 0.9)
    with pytest.raises(ValueError):
        radial_integral("IT", NEGLOG, NU1, 0.0, 0.5, 0.4)
    with pytest.raises(ValueError):
        radial_integral("IX", NEGLOG, NU1, 0.0, 0.0, 0.4)


def test_quadspec_validation():
    with pytest.raises(ValueError):
        QuadSpec(tol=0)


def test_boundedness_sup_positive_case():
    r = boundedness_sup("IT", NEGLOG, NU1, NU1)
    assert r.verdict == "Finite"
    assert 1.00 <= r.value <= 1.03
    assert r.value == pytest.approx(max(q_closed(t) for t in np.linspace(0.9, 0.99, 2000)), rel=1e-6)
    assert abs(r.witness["theta"]) <= 2 * math.pi / 256
    assert 0.9 <= r.witness["t"] <= 0.999
    assert r.to_dict()["kind"] == "IT"


def test_boundedness_sup_divergent_levels():
    r = boundedness_sup("IT", NEGLOG, one(), one())
    assert r.verdict == "Divergent"
    for m in (8, 10, 12):
        assert r.history[m] == pytest.approx(m * math.log(2), rel=1e-6)


def test_boundedness_sup_of_zero_symbol():
    r = boundedness_sup("IT", ZERO, NU1, NU1)
    assert r.value == 0.0 and r.verdict == "Finite"


def test_complex_symbol_uses_full_circle():
    g = make_symbol("poly:[0, [0, 1]]")        # g = i z
    r = boundedness_sup("IB", g, NU1, NU1, GridSpec(levels=10, n_theta=64))
    assert r.verdict == "Finite"
    assert 0 <= r.witness["theta"] < 2 * math.pi


@pytest.mark.parametrize("kind,g,nu,mu,want", [
    ("K1", IDENT, NU1, NU1, 1.0),                        # sup |z|
    ("K3", IDENT, NU1, NU2, 1.0),                        # sup r
    ("K4", IDENT, NU1, NU1, 2 / (3 * math.sqrt(3))),     # max (1 - r^2) r
    ("K5", NEGLOG, NU1, NU1, 2.0),
])
def test_pointwise_sup_closed_forms(kind, g, nu, mu, want):
    r = pointwise_quantity(kind, g, nu, mu, "Sup")
    assert r.verdict == "Finite"
    assert r.value == pytest.approx(want, abs=1e-3)


def test_pointwise_divergence():
    assert pointwise_quantity("K3", IDENT, NU2, NU1).verdict == "Divergent"


def test_pointwise_boundary_limits():
    assert pointwise_quantity("K5", IDENT, NU1, NU2, "BoundaryLimit").verdict == "ZeroLimit"
    assert pointwise_quantity("K5", NEGLOG, NU1, NU1, "BoundaryLimit").verdict == "NonzeroLimit"
    with pytest.raises(ValueError):
        pointwise_quantity("K5", NEGLOG, NU1, NU1, "Whatever")
    with pytest.raises(ValueError):
        pointwise_quantity("K9", NEGLOG, NU1, NU1)


def test_assoc_policies():
    r = pointwise_quantity("K2", IDENT, NU1, NU1)
    assert r.inputs["assoc"] == "analytic"
    forced = pointwise_quantity("K2", IDENT, NU1, NU1, assoc=AssocPolicy("nu"))
    assert forced.value == pytest.approx(r.value)
    fast = custom(lambda x: np.exp(-0.5 * np.log1p(-x) ** 2), "superpoly")
    s = pointwise_quantity("K2", IDENT, fast, fast, grid=GridSpec(levels=10, n_theta=32))
    assert s.inputs["assoc"] == "sandwich"
    lo, hi = s.witness["value_interval"]
    assert lo <= hi + 1e-12
    with pytest.raises(ValueError):
        AssocPolicy("guess").resolve(NU1)


def test_double_limit_profiles():
    p = compactness_double_limit("IT", IDENT, NU1, NU2)
    assert p.verdict == "Compact-consistent"
    assert p.at(12) < 0.05 * p.at(4)
    q = compactness_double_limit("IT", NEGLOG, NU1, NU1)
    assert q.verdict == "Noncompact-consistent"
    assert all(0.8 <= q.at(m) <= 1.1 for m in range(8, 13))
    assert q.as_result().mode == "DoubleLimit"
    assert q.to_dict()["levels"] == list(range(4, 13))
    with pytest.raises(ValueError):
        compactness_double_limit("IT", IDENT, NU1, NU2, m_min=4, m_max=6)


def test_sg_into_hinf():
    assert sg_into_hinf_compact(ZERO)
    assert not sg_into_hinf_compact(IDENT)


def test_results_are_deterministic():
    a = boundedness_sup("IS", IDENT, NU1, NU1, GridSpec(levels=10)).to_dict()
    b = boundedness_sup("IS", IDENT, NU1, NU1, GridSpec(levels=10)).to_dict()
    assert a == b
    assert make_weight("std:1").spec == "std:1"
