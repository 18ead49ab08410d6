"""Radial weights on the disk, their dyadic taxonomy and associated weights.

A weight is a positive nonincreasing function of ``r = |z|`` on [0, 1).
Families: ``std:a`` = (1-r^2)^a, ``log:a`` = (1 + log 1/(1-r^2))^-a, ``one``,
products, ``omega:mu`` = (1-r^2) mu(r), and arbitrary callables.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .series import GridSpec, TruncatedSeries, golden_polish, sup_estimate

# positivity/monotonicity slack for validating custom weights
_MONO_SLACK = 1e-12
DYADIC_THRESHOLD = 1e-3
WITNESS_TERMS = 4096


def dyadic_radius(n) -> np.ndarray:
    """r = 1 - 2**-n, exact in double precision for n <= 53."""
    return 1.0 - np.power(2.0, -np.asarray(n, dtype=float))


def _one_minus_r2(r):
    r = np.asarray(r, dtype=float)
    return (1.0 - r) * (1.0 + r)


@dataclass(frozen=True)
class AnalyticWitness:
    """Nonnegative Taylor coefficients of f with nu(r) = 1 / f(r)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0 or c[0] <= 0:
            raise ValueError("witness needs f(0) > 0")
        if np.any(c < 0):
            raise ValueError("witness coefficients must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def series(self) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs)

    def __call__(self, z):
        return self.series()(z)

    def trusted_radius(self, rel=1e-12) -> float:
        """Largest r at which the truncation tail is below ``rel`` relative to f(r)."""
        n = self.coeffs.size
        last = self.coeffs[-1]
        if last == 0.0 or n < 2:
            return 1.0
        # tail <= last * r^n / (1 - r), f(r) >= c_0
        for r in np.linspace(0.99, 0.0, 100):
            if last * r ** n / (1.0 - r) <= rel * self.coeffs[0]:
                return float(r)
        return 0.0

    def max_relative_error(self, nu, levels: int = 24) -> float:
        """max |1/f(r) - nu(r)| / nu(r) over trusted dyadic radii."""
        rmax = self.trusted_radius()
        r = dyadic_radius(np.arange(0, levels + 1))
        r = r[r <= rmax]
        f = np.real(self(r.astype(complex)))
        return float(np.max(np.abs(1.0 / f - nu(r)) / nu(r)))


def _mul_coeffs(a, b, n):
    return np.convolve(a, b)[:n]


def _pow_series(h, alpha, n):
    """Coefficients of h**alpha for h(0) = 1 (J.C.P. Miller recurrence)."""
    h = np.asarray(h, dtype=float)[:n]
    p = np.zeros(n)
    p[0] = 1.0
    for m in range(1, n):
        k = np.arange(1, min(m, h.size - 1) + 1)
        p[m] = np.dot(((alpha + 1.0) * k - m) * h[k], p[m - k]) / m
    return p


def _even(c_w, n_terms):
    """Coefficients in w = z^2 spread to z-powers."""
    out = np.zeros(2 * n_terms - 1)
    out[::2] = c_w[:n_terms]
    return out


class RadialWeight:
    """Radial weight nu(z) = nu(|z|) with taxonomy flags.

    ``evaluator`` maps an array of radii in [0, 1) to positive values.
    ``boundary`` is the limit at r = 1 (used only for norms of polynomials).
    """

    def __init__(self, family: str, evaluator: Callable, *, spec: str,
                 typical: bool, boundary: float | None = None,
                 witness: AnalyticWitness | None = None,
                 quasi_normal_whitelisted: bool = False,
                 std_exponent: float | None = None,
                 factors: Sequence["RadialWeight"] = ()):
        self.family = family
        self._eval = evaluator
        self.spec = spec
        self.typical = bool(typical)
        self._boundary = boundary
        self.analytic_witness = witness
        self.quasi_normal_whitelisted = bool(quasi_normal_whitelisted)
        self.std_exponent = std_exponent
        self.factors = tuple(factors)

    def __repr__(self):
        return f"RadialWeight({self.spec!r})"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.asarray(self._eval(r), dtype=float)

    @property
    def analytic(self) -> bool:
        return self.analytic_witness is not None

    def boundary_value(self) -> float:
        if self._boundary is not None:
            return float(self._boundary)
        return float(self(np.array([1.0 - 2.0 ** -52]))[0])

    def flags(self) -> dict:
        return {
            "family": self.family,
            "typical": self.typical,
            "analytic_witness": self.analytic,
            "quasi_normal_whitelisted": self.quasi_normal_whitelisted,
        }

    def validate(self, levels: int = 40):
        """Check positivity and monotonicity on the dyadic grid."""
        r = dyadic_radius(np.arange(0, levels + 1))
        v = self(r)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            bad = r[~(np.isfinite(v) & (v > 0))][0]
            raise ValueError(f"weight {self.spec} not strictly positive at r={float(bad):g}")
        if np.any(v[1:] > v[:-1] * (1.0 + _MONO_SLACK)):
            raise ValueError(f"weight {self.spec} is not nonincreasing")
        return self


def standard(alpha: float) -> RadialWeight:
    """nu_alpha(r) = (1 - r^2)^alpha."""
    alpha = float(alpha)
    if not alpha >= 0:
        raise ValueError("standard weight needs alpha >= 0")
    coeffs = np.ones(WITNESS_TERMS)
    for n in range(1, WITNESS_TERMS):
        coeffs[n] = coeffs[n - 1] * (n - 1 + alpha) / n
    witness = AnalyticWitness(_even(coeffs, WITNESS_TERMS) if alpha > 0 else [1.0])
    return RadialWeight(
        "standard", lambda r: _one_minus_r2(r) ** alpha,
        spec="one" if alpha == 0 else f"std:{_fmt(alpha)}",
        typical=alpha > 0, boundary=0.0 if alpha > 0 else 1.0, witness=witness,
        quasi_normal_whitelisted=alpha > 0, std_exponent=alpha)


def one() -> RadialWeight:
    w = standard(0.0)
    w.family = "one"
    return w


def logarithmic(alpha: float) -> RadialWeight:
    """nu_{log,alpha}(r) = (1 + log(1/(1-r^2)))^-alpha."""
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError("log weight needs alpha > 0")
    h = np.zeros(WITNESS_TERMS)
    h[0] = 1.0
    h[1:] = 1.0 / np.arange(1, WITNESS_TERMS)
    witness = AnalyticWitness(_even(_pow_series(h, alpha, WITNESS_TERMS), WITNESS_TERMS))
    return RadialWeight(
        "log", lambda r: (1.0 - np.log(_one_minus_r2(r))) ** (-alpha),
        spec=f"log:{_fmt(alpha)}", typical=True, boundary=0.0, witness=witness)


def product(*weights: RadialWeight) -> RadialWeight:
    if not weights:
        raise ValueError("product of no weights")
    if len(weights) == 1:
        return weights[0]
    ws = tuple(weights)

    def ev(r):
        out = np.ones_like(np.asarray(r, dtype=float))
        for w in ws:
            out = out * w(r)
        return out

    witness = None
    if all(w.analytic for w in ws):
        c = np.array([1.0])
        n = max(w.analytic_witness.coeffs.size for w in ws)
        for w in ws:
            c = _mul_coeffs(c, w.analytic_witness.coeffs, n)
        witness = AnalyticWitness(c)
    exps = [w.std_exponent for w in ws]
    std_exp = float(sum(exps)) if all(e is not None for e in exps) else None
    bvals = [w._boundary for w in ws]
    boundary = float(np.prod(bvals)) if all(b is not None for b in bvals) else None
    return RadialWeight(
        "product", ev, spec="product:" + ",".join(w.spec for w in ws),
        typical=any(w.typical for w in ws), boundary=boundary, witness=witness,
        quasi_normal_whitelisted=bool(std_exp and std_exp > 0),
        std_exponent=std_exp, factors=ws)


def omega_of(mu: RadialWeight) -> RadialWeight:
    """omega(r) = (1 - r^2) mu(r); always typical."""
    base = product(standard(1.0), mu)
    w = RadialWeight(
        "omega", base._eval, spec=f"omega:{mu.spec}", typical=True, boundary=0.0,
        witness=base.analytic_witness,
        quasi_normal_whitelisted=base.quasi_normal_whitelisted,
        std_exponent=base.std_exponent, factors=(mu,))
    return w


def custom(fn: Callable, name: str = "custom", *, typical: bool | None = None) -> RadialWeight:
    """Wrap a user function of r; validated on the dyadic grid."""
    w = RadialWeight("custom", fn, spec=name, typical=False)
    w.validate()
    if typical is None:
        typical = bool(w(dyadic_radius([48]))[0] < 1e-6 * w(np.array([0.0]))[0])
    w.typical = typical
    return w


def _fmt(x: float) -> str:
    return repr(float(x)).rstrip("0").rstrip(".") if "." in repr(float(x)) else repr(x)


# -- spec grammar ---------------------------------------------------------

_NUM = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")


class WeightSpecError(ValueError):
    pass


def make_weight(spec: str) -> RadialWeight:
    """Parse ``std:<a> | log:<a> | one | product:<spec>,<spec>... | omega:<spec>``."""
    if not isinstance(spec, str):
        raise WeightSpecError(f"weight spec must be a string, got {spec!r}")
    w, pos = _parse(spec.strip(), 0)
    if pos != len(spec.strip()):
        raise WeightSpecError(f"trailing input in weight spec {spec!r} at {pos}")
    return w


def _parse(s: str, pos: int):
    if s.startswith("one", pos):
        return one(), pos + 3
    for prefix, ctor in (("std:", standard), ("log:", logarithmic)):
        if s.startswith(prefix, pos):
            m = _NUM.match(s, pos + len(prefix))
            if not m:
                raise WeightSpecError(f"expected a number after {prefix!r} in {s!r}")
            alpha = float(m.group(0))
            if alpha < 0:
                raise WeightSpecError(f"negative exponent in {s!r}")
            try:
                return ctor(alpha), m.end()
            except ValueError as exc:
                raise WeightSpecError(str(exc)) from None
    if s.startswith("omega:", pos):
        inner, end = _parse(s, pos + 6)
        return omega_of(inner), end
    if s.startswith("product:", pos):
        factors = []
        p = pos + 8
        while True:
            w, p = _parse(s, p)
            factors.append(w)
            if p < len(s) and s[p] == ",":
                p += 1
                continue
            break
        return product(*factors), p
    raise WeightSpecError(f"malformed weight spec {s!r} at position {pos}")


# -- dyadic property tests -------------------------------------------------

@dataclass
class PropertyCheck:
    """Outcome of a dyadic property test; unpacks as ``(holds, value)``."""

    holds: bool
    value: float | int | None
    verdict: str
    table: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.holds, self.value))


def dyadic_values(nu: RadialWeight, n_max: int) -> np.ndarray:
    return nu(dyadic_radius(np.arange(0, n_max + 1)))


def _flat(seq, tol=DYADIC_THRESHOLD) -> bool:
    return float(np.max(seq) - np.min(seq)) <= tol


def check_property_U(nu: RadialWeight, n_max: int = 24) -> PropertyCheck:
    """inf_n nu(1 - 2^-(n+1)) / nu(1 - 2^-n) > 0, judged on levels n < n_max."""
    if n_max < 8:
        raise ValueError("n_max must be >= 8")
    v = dyadic_values(nu, n_max)
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise ValueError(f"weight {nu.spec} cannot be evaluated near the boundary")
    ratios = v[1:] / v[:-1]
    running = np.minimum.accumulate(ratios)
    q = max(2, n_max // 4)
    inf_ratio = float(running[-1])
    table = [{"n": n, "ratio": float(ratios[n]), "running_inf": float(running[n])}
             for n in range(n_max)]
    if not _flat(running[-q:]):
        return PropertyCheck(False, inf_ratio, "inconclusive", table)
    holds = inf_ratio > DYADIC_THRESHOLD
    return PropertyCheck(holds, inf_ratio, "holds" if holds else "fails", table)


def _hyperbolic_limit(n, y):
    """Limit of y_n = a - b/(n + c) through three equally spaced samples."""
    i2 = len(n) // 2
    n1, n2, n3 = float(n[0]), float(n[i2]), float(n[-1])
    y1, y2, y3 = float(y[0]), float(y[i2]), float(y[-1])
    if y3 == y2 or y2 == y1:
        return y3
    q = (y2 - y1) / (y3 - y2)
    if q == 1.0:
        return y3
    c = (n3 - q * n1) / (q - 1.0)
    denom = 1.0 / (n1 + c) - 1.0 / (n2 + c)
    if denom == 0 or not np.isfinite(c):
        return y3
    b = (y2 - y1) / denom
    return y3 + b / (n3 + c)


def check_property_L(nu: RadialWeight, n_max: int = 24, k_max: int = 4) -> PropertyCheck:
    """Search k <= k_max with limsup_n nu(1-2^-(n+k)) / nu(1-2^-n) < 1.

    The tail (last quarter of levels) is read as flat, monotone decreasing, or
    monotone increasing; an increasing tail is extrapolated with a
    ``a - b/(n+c)`` model, which separates logarithmic weights (limit 1)
    from power-type ones.
    """
    if n_max < 8 or k_max < 1:
        raise ValueError("need n_max >= 8 and k_max >= 1")
    v = dyadic_values(nu, n_max + k_max)
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise ValueError(f"weight {nu.spec} cannot be evaluated near the boundary")
    start = n_max - max(6, n_max // 4)
    if (n_max - start) % 2:
        start -= 1
    n = np.arange(start, n_max + 1)
    table = []
    any_inconclusive = False
    for k in range(1, k_max + 1):
        rho = v[n + k] / v[n]
        d = np.diff(rho)
        eps = 1e-12
        if np.all(d >= -eps) and np.any(d > eps) and not _flat(d, 1e-9):
            est, shape = max(float(np.max(rho)), _hyperbolic_limit(n, rho)), "increasing"
        elif np.all(d <= eps) or _flat(rho):
            est, shape = float(np.max(rho)), "flat" if _flat(rho) else "decreasing"
        else:
            est, shape = float("nan"), "oscillating"
        table.append({"k": k, "tail": [float(x) for x in rho], "shape": shape,
                      "limsup_estimate": est})
        if shape == "oscillating":
            any_inconclusive = True
            continue
        if est < 1.0 - DYADIC_THRESHOLD:
            return PropertyCheck(True, k, "holds", table)
    return PropertyCheck(False, None, "inconclusive" if any_inconclusive else "fails", table)


def is_normal(nu: RadialWeight, n_max: int = 24) -> bool:
    return bool(check_property_U(nu, n_max).holds and check_property_L(nu, n_max).holds)


# -- associated weight -------------------------------------------------------

@dataclass(frozen=True)
class LPSpec:
    """Extremal-function LP for the associated weight."""

    degree: int = 32
    n_radii: int = 24          # uniform radii of the general family's grid
    n_theta: int = 0           # angles on [0, pi]; 0 -> 2 * degree + 2
    n_phases: int = 16
    families: tuple = ("positive",)   # add "general" for the polar-grid LP
    check_grid: GridSpec = GridSpec(levels=12, substeps=4, n_theta=512)


@dataclass
class AssociatedSandwich:
    radii: np.ndarray
    lower: np.ndarray
    monomial_upper: np.ndarray
    lp_refined_upper: np.ndarray | None
    degree: int | None
    n_probes: int
    n_samples: int = 0

    @property
    def upper(self) -> np.ndarray:
        if self.lp_refined_upper is None:
            return self.monomial_upper
        return np.minimum(self.monomial_upper, self.lp_refined_upper)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "radii": [float(r) for r in self.radii],
            "lower": [float(x) for x in self.lower],
            "monomial_upper": [float(x) for x in self.monomial_upper],
            "lp_refined_upper": None if self.lp_refined_upper is None
            else [float(x) for x in self.lp_refined_upper],
            "upper": [float(x) for x in self.upper],
            "lp_degree": self.degree,
            "monomial_probes": self.n_probes,
            "lp_samples": self.n_samples,
        }


def _probe_degrees(n_max: int) -> np.ndarray:
    small = np.arange(0, min(n_max, 64) + 1)
    if n_max <= 64:
        return small
    big = np.unique(np.round(64 * 1.05 ** np.arange(1, 400)).astype(int))
    return np.concatenate([small, big[big <= n_max]])


def _sample_radii(levels: int = 40, per_level: int = 8) -> np.ndarray:
    j = np.arange(1, levels * per_level + 1)
    r = np.concatenate([np.linspace(0.0, 0.99, 397), -np.expm1(-np.log(2.0) * j / per_level)])
    return np.unique(r)


@dataclass(frozen=True)
class MonomialBounds:
    """M_n = sup_s s^n nu(s) for probed n; z^n / M_n lies in the unit ball."""

    degrees: np.ndarray
    maxima: np.ndarray

    def upper(self, radii) -> np.ndarray:
        """min_n M_n / r^n; only n = 0 is used at r = 0."""
        r = np.atleast_1d(np.asarray(radii, dtype=float))
        logm = np.log(self.maxima)
        with np.errstate(divide="ignore"):
            logr = np.log(np.where(r > 0.0, r, 1.0))
        out = np.exp(np.min(logm - np.multiply.outer(logr, self.degrees), axis=-1))
        return np.where(r > 0.0, out, self.maxima[self.degrees == 0][0])


def monomial_bounds(nu: RadialWeight, n_max: int) -> MonomialBounds:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    degs = _probe_degrees(n_max)
    s = _sample_radii()
    logv = np.log(nu(s))
    with np.errstate(divide="ignore"):
        logs = np.log(s)
    maxima = np.empty(degs.size)
    for idx, n in enumerate(degs):
        if n == 0:
            maxima[idx] = float(nu(np.array([0.0]))[0])
            continue
        phi = n * logs + logv
        i = int(np.argmax(phi))
        lo, hi = s[max(i - 1, 0)], s[min(i + 1, s.size - 1)]

        def f(x, n=n):
            return n * math.log(x) + math.log(float(nu(np.array([x]))[0])) if x > 0 else -np.inf

        _, best = golden_polish(f, float(s[i]), float(lo), float(hi), float(phi[i]), tol=1e-14)
        maxima[idx] = math.exp(best)
    return MonomialBounds(degs, maxima)


def _auto_n_max(radii) -> int:
    rmax = float(np.max(radii)) if len(radii) else 0.0
    return int(max(64, min(1 << 16, math.ceil(8.0 / max(1.0 - rmax, 1e-12)))))


def _solve_lp(obj, A, lo, hi, central=False):
    """max obj.x s.t. A x <= 1, lo <= x <= hi (HiGHS); None unless optimal."""
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if central:
        # interior point without crossover lands in the middle of a
        # degenerate optimal face instead of at an extreme vertex
        h.setOptionValue("solver", "ipm")
        h.setOptionValue("run_crossover", "off")
    m, k = A.shape
    h.addVars(k, np.full(k, float(lo)), np.full(k, float(hi)))
    h.changeColsCost(k, np.arange(k, dtype=np.int32), np.asarray(obj, dtype=float))
    h.changeObjectiveSense(highspy.ObjSense.kMaximize)
    h.addRows(m, np.full(m, -highspy.kHighsInf), np.ones(m), m * k,
              (np.arange(m) * k).astype(np.int32),
              np.tile(np.arange(k, dtype=np.int32), m), np.ascontiguousarray(A).ravel())
    h.run()
    ok = {highspy.HighsModelStatus.kOptimal}
    if central:
        # without crossover HiGHS may stop at "unknown"; any finite iterate is
        # usable because callers rescale by a recomputed norm
        ok.add(highspy.HighsModelStatus.kUnknown)
    if h.getModelStatus() not in ok:
        return None
    x = np.array(h.getSolution().col_value)
    return x if x.size == k and np.all(np.isfinite(x)) else None


def _lp_radii(lp: LPSpec, per: int) -> tuple[np.ndarray, float]:
    """Uniform plus dyadic radii up to the last level, and the unit circle."""
    levels = lp.check_grid.levels
    s_last = float(dyadic_radius(levels))
    radii = np.unique(np.concatenate([
        np.linspace(0.0, s_last, per + 1),
        dyadic_radius(np.arange(1, 4 * levels + 1) / 4.0), [1.0]]))
    return radii, s_last


def _rescaled_value(coeffs, nu, r, lp):
    f = TruncatedSeries(coeffs)
    fr = float(np.real(f(r)))
    if not fr > 0:
        return None
    norm = max(sup_estimate(f, nu, lp.check_grid).value, fr * float(nu(np.array([r]))[0]))
    return f, fr / norm


def _lp_positive(nu, r, lp, scale, n):
    """Nonnegative coefficients: |f(z)| <= f(|z|), so the real axis suffices."""
    radii, s_last = _lp_radii(lp, 64 * (lp.degree + 1))
    A = (radii[:, None] ** n) * scale * nu(np.minimum(radii, s_last))[:, None]
    d = _solve_lp((r ** n) * scale, A, 0.0, 1.0)
    if d is None:
        return None
    out = _rescaled_value(d * scale, nu, r, lp)
    return None if out is None else (*out, A.shape[0])


def _lp_general(nu, r, lp, scale, n):
    """Real coefficients of any sign; the modulus bound at each sample point is
    replaced by ``n_phases`` rotated half-planes (theta on [0, pi] by symmetry)."""
    radii, s_last = _lp_radii(lp, lp.n_radii)
    th = np.linspace(0.0, np.pi, lp.n_theta or 2 * lp.degree + 2)
    S, T = np.meshgrid(radii, th, indexing="ij")
    S, T = S.ravel(), T.ravel()
    w = nu(np.minimum(S, s_last))
    phases = 2.0 * np.pi * np.arange(lp.n_phases) / lp.n_phases
    base = (S[:, None] ** n) * scale * w[:, None]
    A = np.vstack([base * np.cos(np.outer(T, n) - p) for p in phases])
    d = _solve_lp((r ** n) * scale, A, -1.0, 1.0, central=True)
    if d is None:
        return None
    out = _rescaled_value(d * scale, nu, r, lp)
    return None if out is None else (*out, A.shape[0])


def extremal_lp(nu: RadialWeight, r: float, lp: LPSpec):
    """Lower bound for 1/nu~(r): max Re f(r) over polynomials of degree <= lp.degree
    with nu |f| <= 1. Returns (f, value, n_rows) or None.

    Two feasible families are optimised and the better certified value kept:

    * ``positive``: nonnegative coefficients, constrained on the real axis only
      (exact for this family, since |f(z)| <= f(|z|));
    * ``general``: real coefficients, with the modulus constraint linearised on
      a polar sample grid.

    Variables are d_n = M_n c_n, which the Cauchy estimate confines to [-1, 1]
    for every feasible f. Past the last sampled level the weight is frozen at
    its value there, which only tightens the constraint and lets the unit
    circle stand in for the outer annulus. Each candidate is rescaled by its
    norm recomputed on ``lp.check_grid``.
    """
    n = np.arange(lp.degree + 1)
    scale = 1.0 / monomial_bounds(nu, lp.degree).maxima
    best = None
    rows = 0
    for fam in lp.families:
        solver = {"positive": _lp_positive, "general": _lp_general}.get(fam)
        if solver is None:
            raise ValueError(f"unknown LP family {fam!r}")
        out = solver(nu, r, lp, scale, n)
        if out is None:
            continue
        rows += out[2]
        if best is None or out[1] > best[1]:
            best = out
    if best is None:
        return None
    return best[0], best[1], rows


def associated_weight_bounds(nu: RadialWeight, radii, n_max: int | None = None,
                             lp: LPSpec | None = None) -> AssociatedSandwich:
    """Two-sided estimate nu(r) <= nu~(r) <= upper(r) at the requested radii."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any((radii < 0) | (radii >= 1)):
        raise ValueError("radii must lie in [0, 1)")
    if n_max is None:
        n_max = _auto_n_max(radii)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    mb = monomial_bounds(nu, n_max)
    lower = nu(radii)
    mono = mb.upper(radii)
    lp_up = None
    rows = 0
    if lp is not None:
        lp_up = np.full(radii.shape, np.inf)
        for i, r in enumerate(radii):
            out = extremal_lp(nu, float(r), lp)
            if out is None:
                continue
            _, value, rows = out
            lp_up[i] = 1.0 / value
        lp_up = np.maximum(lp_up, lower)
    return AssociatedSandwich(radii, lower, mono, lp_up,
                              None if lp is None else lp.degree, int(mb.degrees.size), rows)


def essential_constant_estimate(nu: RadialWeight, radii, n_max: int | None = None,
                                lp: LPSpec | None = None) -> float:
    """max over radii of upper(r) / nu(r)."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if radii.size == 0:
        raise ValueError("radii must be nonempty")
    sw = associated_weight_bounds(nu, radii, n_max, lp)
    return float(np.max(sw.upper / sw.lower))


@dataclass
class AssocResolution:
    """How nu~ enters a criterion: exactly, up to a constant, or as an interval."""

    policy: str                      # "analytic" | "property_U" | "sandwich"
    lower: Callable                  # r -> lower bound for nu~
    upper: Callable                  # r -> upper bound for nu~
    note: str = ""


def resolve_associated(nu: RadialWeight, n_max: int = 1 << 14) -> AssocResolution:
    if nu.analytic:
        return AssocResolution("analytic", nu, nu, "nu analytic, so nu~ = nu")
    u = check_property_U(nu)
    if u.holds:
        return AssocResolution("property_U", nu, nu,
                               "nu satisfies (U), so nu~ is equivalent to nu")
    mb = monomial_bounds(nu, n_max)
    return AssocResolution("sandwich", nu, mb.upper,
                           "nu~ bracketed by nu and the monomial bound")


def weight_report(nu: RadialWeight, radii=(0.5, 0.9), n_max: int = 24,
                  lp: LPSpec | None = None) -> dict:
    u = check_property_U(nu, n_max)
    lcheck = check_property_L(nu, max(n_max, 8))
    sandwich = associated_weight_bounds(nu, radii, lp=lp)
    return {
        "spec": nu.spec,
        "flags": {
            **nu.flags(),
            "U": bool(u.holds),
            "L": bool(lcheck.holds),
            "normal": bool(u.holds and lcheck.holds),
            "U_inf_ratio": u.value,
            "L_best_k": lcheck.value,
        },
        "dyadic_table": [
            {"n": int(n), "r": float(dyadic_radius(n)), "nu": float(x)}
            for n, x in enumerate(dyadic_values(nu, n_max))
        ],
        "sandwich": sandwich.to_dict(),
    }
