"""Acceptance criteria 1-12; each test records one PASS/FAIL line."""

import math

import numpy as np
import pytest

from conftest import random_series
from volterra_weighted.criteria import (
    boundedness_sup,
    compactness_double_limit,
    pointwise_quantity,
)
from volterra_weighted.operators import CATALOG, apply_Sg, apply_Tg, make_symbol, opnorm_lower
from volterra_weighted.series import (
    GridSpec,
    TruncatedSeries,
    cauchy_product,
    differentiate,
    volterra_antiderivative,
    weighted_sup_norm,
)
from volterra_weighted.verify import RunConfig, equivalence_matrix, run_cases, standard_sweep, to_json
from volterra_weighted.weights import (
    LPSpec,
    associated_weight_bounds,
    check_property_L,
    check_property_U,
    is_normal,
    make_weight,
    standard,
)

NU1, NU2 = standard(1.0), standard(2.0)
NEGLOG, IDENT = make_symbol("neglog1mz"), make_symbol("identity")
LOG2 = math.log(2.0)


def _antiderivative(t):
    return 0.25 * math.log(1 / (1 - t)) + 0.5 * t / (1 - t) + 0.25 * math.log1p(t)


def q_closed(t):
    return (1 - t * t) * _antiderivative(t)


def _restricted(m):
    tm = 1 - 2.0 ** -m
    ts = 1 - 2.0 ** -np.linspace(m, 40, 4000)
    return max((1 - t * t) * (_antiderivative(t) - _antiderivative(tm)) for t in ts)


@pytest.fixture(scope="module")
def positive_case():
    return boundedness_sup("IT", NEGLOG, NU1, NU1)


@pytest.fixture(scope="module")
def divergent_case():
    return boundedness_sup("IT", NEGLOG, make_weight("one"), make_weight("one"))


@pytest.fixture(scope="module")
def sweep():
    cases = standard_sweep()
    cfg = RunConfig(seed=42)
    reports = run_cases(cases, cfg, jobs=1)
    return cases, cfg, reports


# -- 1 ---------------------------------------------------------------------------------

def _brute_product(a, b):
    out = np.zeros(a.size + b.size - 1, dtype=complex)
    for i in range(a.size):
        for j in range(b.size):
            out[i + j] += a[i] * b[j]
    return out


def test_c01_series_arithmetic(acceptance):
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(200):
        a = random_series(rng, int(rng.integers(0, 65)))
        b = random_series(rng, int(rng.integers(0, 65)))
        prod = cauchy_product(TruncatedSeries(a), TruncatedSeries(b), a.size + b.size - 2)
        d = differentiate(TruncatedSeries(a)).coeffs
        v = volterra_antiderivative(TruncatedSeries(a)).coeffs
        want_d = np.array([k * a[k] for k in range(1, a.size)] or [0j])
        want_v = np.array([0j] + [a[k] / (k + 1) for k in range(a.size)])
        errs = [np.max(np.abs(prod.coeffs - _brute_product(a, b))),
                np.max(np.abs(d[:want_d.size] - want_d)),
                np.max(np.abs(v[:want_v.size] - want_v))]
        worst = max(worst, *errs)
    acceptance(1, worst <= 1e-12, f"max coefficient error {worst:.2e} over 200 random pairs")
    assert worst <= 1e-12


# -- 2 ---------------------------------------------------------------------------------

def test_c02_exact_operator_identities(acceptance):
    bad = []
    one, const = TruncatedSeries([1.0]), TruncatedSeries([3.5 - 2j])
    for name in CATALOG:
        g = make_symbol(name)
        d = max(g.coeffs.degree, 1)
        tg = apply_Tg(one, g, d).coeffs
        want = g.coeffs.truncated(d).coeffs.astype(complex).copy()
        want[0] = 0.0
        if not np.array_equal(tg, want):
            bad.append(f"Tg(1) {name}")
        if np.any(apply_Sg(const, g, d).coeffs != 0):
            bad.append(f"Sg(c) {name}")
    acceptance(2, not bad, f"{len(CATALOG)} catalog symbols, exact mismatches: {bad or 'none'}")
    assert not bad


# -- 3 ---------------------------------------------------------------------------------

def test_c03_weight_taxonomy(acceptance):
    problems = []
    for a in (0.5, 1.0, 2.0):
        if not is_normal(standard(a)):
            problems.append(f"std:{a} not normal")
        u = check_property_U(standard(a), 24)
        if abs(u.table[-1]["ratio"] - 2 ** -a) > 1e-3:
            problems.append(f"std:{a} ratio {u.table[-1]['ratio']:.5f}")
    for spec in ("log:0.5", "log:1", "one"):
        w = make_weight(spec)
        if not (check_property_U(w).holds and not check_property_L(w).holds):
            problems.append(f"{spec} is not U-without-L")
    acceptance(3, not problems, f"problems: {problems or 'none'}")
    assert not problems


# -- 4 ---------------------------------------------------------------------------------

def test_c04_associated_weight_sandwich(acceptance):
    s = associated_weight_bounds(NU1, [0.5], lp=LPSpec(degree=32))
    ok_point = (s.lower[0] == pytest.approx(0.75, abs=1e-12)
                and abs(s.monomial_upper[0] - 0.7699) <= 1e-3
                and s.lower[0] <= s.upper[0] <= s.monomial_upper[0])
    shrink_bad = []
    for spec in ("std:0.5", "std:1", "std:2", "log:0.5", "log:1", "one",
                 "product:std:1,log:1", "omega:std:1"):
        nu = make_weight(spec)
        if not nu.analytic:
            continue
        widths = [associated_weight_bounds(nu, [0.5, 0.9], lp=LPSpec(degree=d)).width
                  for d in (16, 32, 64)]
        for lo, hi in zip(widths[1:], widths[:-1]):
            if np.any(lo > hi + 1e-6):       # LP solver tolerance
                shrink_bad.append(spec)
    ok = ok_point and not shrink_bad
    acceptance(4, ok, f"nu_1(0.5): [{s.lower[0]:.4f}, monomial {s.monomial_upper[0]:.4f}], "
                      f"LP upper {s.upper[0]:.6f}; non-shrinking: {shrink_bad or 'none'}")
    assert ok


# -- 5 ---------------------------------------------------------------------------------

def test_c05_bounded_positive_case(acceptance, positive_case):
    r = positive_case
    t, th = r.witness["t"], r.witness["theta"]
    oracle = max(q_closed(x) for x in np.linspace(0.9, 0.999, 20000))
    ok = (r.verdict == "Finite" and 1.00 <= r.value <= 1.03 and abs(th) <= 2 * math.pi / 256
          and 0.9 <= t <= 0.999 and abs(r.value - oracle) <= 1e-6 * oracle)
    acceptance(5, ok, f"{r.verdict} value {r.value:.7f} (closed form {oracle:.7f}) "
                      f"at t={t:.4f}, theta={th:.2e}")
    assert ok


# -- 6 ---------------------------------------------------------------------------------

def test_c06_divergent_levels_grow_like_m_log2(divergent_case):
    r = divergent_case
    assert r.verdict == "Divergent"
    for m in (8, 10, 12):
        assert r.history[m] == pytest.approx(m * LOG2, rel=0.05)


@pytest.mark.xfail(strict=True, reason="the 10*m*log 2 target contradicts the exact "
                                       "integral m*log 2; see decisions ledger")
def test_c06_divergent_levels_literal_target(acceptance, divergent_case):
    r = divergent_case
    ratios = {m: r.history[m] / (10 * m * LOG2) for m in (8, 10, 12)}
    ok = r.verdict == "Divergent" and all(abs(q - 1) <= 0.05 for q in ratios.values())
    acceptance(6, ok, f"{r.verdict}; level/(10 m log2) = "
                      + ", ".join(f"{q:.3f}@{m}" for m, q in ratios.items())
                      + "; level/(m log2) = "
                      + ", ".join(f"{r.history[m] / (m * LOG2):.3f}" for m in ratios))
    assert ok


# -- 7 ---------------------------------------------------------------------------------

def test_c07_pointwise_cross_check(acceptance, positive_case):
    k5 = pointwise_quantity("K5", NEGLOG, NU1, NU1, "Sup")
    ok = 1.95 <= k5.value <= 2.00 and k5.verdict == "Finite" == positive_case.verdict
    acceptance(7, ok, f"K5 sup {k5.value:.5f} ({k5.verdict}), integral test {positive_case.verdict}")
    assert ok


# -- 8 ---------------------------------------------------------------------------------

def test_c08_compact_positive_case(acceptance):
    p = compactness_double_limit("IT", IDENT, NU1, NU2)
    lim = pointwise_quantity("K5", IDENT, NU1, NU2, "BoundaryLimit")
    ok = (p.verdict == "Compact-consistent" and p.at(12) < 0.05 * p.at(4)
          and lim.verdict == "ZeroLimit")
    acceptance(8, ok, f"{p.verdict}, C(12)/C(4) = {p.at(12) / p.at(4):.2e}; K5 limit {lim.verdict}")
    assert ok


# -- 9 ---------------------------------------------------------------------------------

def test_c09_bounded_not_compact(acceptance, positive_case):
    p = compactness_double_limit("IT", NEGLOG, NU1, NU1)
    vals = [p.at(m) for m in range(8, 13)]
    # oracle: sup over t >= t_m of (1 - t^2)(F(t) - F(t_m)), F the antiderivative in q_closed
    oracle = [_restricted(m) for m in range(8, 13)]
    ok = (p.verdict == "Noncompact-consistent" and all(0.8 <= v <= 1.1 for v in vals)
          and max(abs(v - o) for v, o in zip(vals, oracle)) <= 1e-3
          and positive_case.verdict == "Finite")
    acceptance(9, ok, f"{p.verdict}, C(8..12) = " + ", ".join(f"{v:.4f}" for v in vals)
                      + f"; restricted closed form {min(oracle):.6f}..{max(oracle):.6f}")
    assert ok


# -- 10 --------------------------------------------------------------------------------

def test_c10_norm_domination(acceptance, sweep):
    _, _, reports = sweep
    checked, bad = 0, []
    for rep in reports:
        n = rep["norm"]
        if n.get("criterion_upper") is not None:
            checked += 1
            if not n["lower"] <= n["criterion_upper"] * 1.01 + 1e-12:
                bad.append(rep["case"])
    est = opnorm_lower("Tg", NEGLOG, NU1, NU1)
    f1 = apply_Tg(TruncatedSeries([1.0]), NEGLOG, NEGLOG.coeffs.degree)
    oracle = weighted_sup_norm(f1, NU1, GridSpec(levels=14, n_theta=256))
    ok = not bad and checked > 0 and est.lower >= 0.60 and abs(oracle - 0.614) <= 0.01
    acceptance(10, ok, f"{checked} sweep cases with a finite upper bound, violations {len(bad)}; "
                       f"case 5 lower bound {est.lower:.4f}, f=1 ratio {oracle:.4f}")
    assert ok


# -- 11 --------------------------------------------------------------------------------

def test_c11_equivalence_matrix(acceptance, sweep):
    cases, cfg, reports = sweep
    first = to_json({"reports": reports,
                     "matrix": equivalence_matrix(cases, cfg, reports=reports).to_dict()})
    again = run_cases(cases, cfg, jobs=1)
    m = equivalence_matrix(cases, cfg, reports=again)
    second = to_json({"reports": again, "matrix": m.to_dict()})
    ok = m.n_flags == 0 and first == second
    acceptance(11, ok, f"{len(cases)} cases (12 weight/symbol tuples x 2 operators x 2 questions), "
                       f"{m.n_flags} flags, identical JSON: {first == second}")
    assert ok


# -- 12 --------------------------------------------------------------------------------

def test_c12_derivative_growth(acceptance):
    rng = np.random.default_rng(12)
    grid = GridSpec(levels=12, n_theta=128)
    worst = 0.0
    for _ in range(100):
        f = TruncatedSeries(random_series(rng, int(rng.integers(1, 33))))
        # nu_1 (1 - |z|^2) = nu_2
        lhs = weighted_sup_norm(differentiate(f), NU2, grid)
        worst = max(worst, lhs / weighted_sup_norm(f, NU1, grid))
    acceptance(12, worst <= 20, f"max ratio {worst:.3f} over 100 random polynomials (bound 20)")
    assert worst <= 20
