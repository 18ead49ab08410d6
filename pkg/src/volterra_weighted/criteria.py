"""Boundedness and compactness criterion quantities for T_g and S_g.

Integral kinds (along rays z = r e^{i theta}):

    IT  |g'(z)| / nu(r)
    IS  |g(z)| / ((1 - r^2) nu(r))
    IB  |g(z)| / nu(r)

Pointwise kinds (nu~ is the associated weight):

    K1  mu |g| / nu            K2  mu |g| / nu~
    K3  mu |g| / ((1-|z|^2) nu)
    K4  (1-|z|^2) mu |g| / nu~  K5  (1-|z|^2) mu |g'| / nu~
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import roots_legendre

from .operators import SymbolSpec
from .results import (
    INCONCLUSIVE,
    CriterionResult,
    _clean,
    double_limit_verdict,
    limit_verdict,
    sup_verdict,
)
from .series import GridSpec, golden_polish, polar_polish, polar_sup
from .weights import RadialWeight, resolve_associated

INTEGRAL_KINDS = ("IT", "IS", "IB")
POINTWISE_KINDS = ("K1", "K2", "K3", "K4", "K5")
NEEDS_ASSOC = ("K2", "K4", "K5")


@dataclass(frozen=True)
class QuadSpec:
    """Gauss-Legendre panels of ``order`` nodes, bisected until the relative
    change of a segment sum drops below ``tol`` (at most ``max_panels``)."""

    order: int = 16
    tol: float = 1e-6
    max_panels: int = 1 << 16
    substeps: int = 4

    def __post_init__(self):
        if self.order < 1 or not self.tol > 0 or self.max_panels < 1:
            raise ValueError("invalid quadrature spec")


_GL_CACHE: dict = {}


def _gauss(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = roots_legendre(order)
    return _GL_CACHE[order]


def integrand(kind: str, g: SymbolSpec, nu: RadialWeight):
    """Vectorised integrand (r, theta) -> value for an integral kind."""
    if kind == "IT":
        def f(r, t):
            return np.abs(g.dg(r * np.exp(1j * t))) / nu(r)
    elif kind == "IS":
        def f(r, t):
            return np.abs(g.g(r * np.exp(1j * t))) / ((1.0 - r) * (1.0 + r) * nu(r))
    elif kind == "IB":
        def f(r, t):
            return np.abs(g.g(r * np.exp(1j * t))) / nu(r)
    else:
        raise ValueError(f"unknown integral kind {kind!r}")
    return f


def _checked(fun, r, t):
    with np.errstate(all="ignore"):
        v = fun(r[:, None], t[None, :])
    v = np.broadcast_to(v, (r.size, t.size))
    bad = ~np.isfinite(v)
    if np.any(bad):
        i = int(np.argwhere(bad)[0][0])
        raise FloatingPointError(f"integrand is not finite at r={float(r[i])!r}")
    return v


def _segment(fun, a, b, thetas, quad: QuadSpec):
    """Adaptive composite Gauss-Legendre on [a, b] for every angle at once."""
    x, w = _gauss(quad.order)

    def composite(panels):
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wts = (half[:, None] * w[None, :]).ravel()
        return wts @ _checked(fun, nodes, thetas)

    panels = 1
    coarse = composite(panels)
    while panels < quad.max_panels:
        panels *= 2
        fine = composite(panels)
        if np.all(np.abs(fine - coarse) <= quad.tol * np.abs(fine) + 1e-15):
            return fine
        coarse = fine
    return coarse


def _breakpoints(t_lo, t_hi, substeps):
    """t_lo, the geometric points 1 - 2^(-j/substeps) inside (t_lo, t_hi), t_hi."""
    j_hi = math.ceil(-math.log2(1.0 - t_hi) * substeps) + 1 if t_hi < 1 else 0
    j = np.arange(1, max(j_hi, 1) + 1)
    pts = -np.expm1(-math.log(2.0) * j / substeps)
    pts = pts[(pts > t_lo) & (pts < t_hi)]
    return np.concatenate([[t_lo], pts, [t_hi]])


def cumulative_integrals(fun, breaks, thetas, quad: QuadSpec) -> np.ndarray:
    """cum[k, j] = integral from breaks[0] to breaks[k] along angle thetas[j]."""
    breaks = np.asarray(breaks, dtype=float)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    out = np.zeros((breaks.size, thetas.size))
    for k in range(1, breaks.size):
        out[k] = out[k - 1] + _segment(fun, breaks[k - 1], breaks[k], thetas, quad)
    return out


def radial_integral(kind: str, g: SymbolSpec, nu: RadialWeight, theta: float,
                    t_lo: float, t_hi: float, quad: QuadSpec | None = None) -> float:
    """Integral of the kind's integrand along the ray at ``theta`` over [t_lo, t_hi]."""
    if not 0.0 <= t_lo < t_hi < 1.0:
        raise ValueError("need 0 <= t_lo < t_hi < 1")
    quad = quad or QuadSpec()
    fun = integrand(kind, g, nu)
    cum = cumulative_integrals(fun, _breakpoints(t_lo, t_hi, quad.substeps), [theta], quad)
    return float(cum[-1, 0])


# -- Sup over t and theta --------------------------------------------------------

def _inputs(kind, g, nu, mu, **extra):
    d = {"kind": kind, "g": g.name, "nu": nu.spec}
    if mu is not None:
        d["mu"] = mu.spec
    d.update(extra)
    return d


def boundedness_sup(kind: str, g: SymbolSpec, nu: RadialWeight, mu: RadialWeight,
                    grid: GridSpec | None = None, quad: QuadSpec | None = None) -> CriterionResult:
    """sup over t and theta of mu(t) * integral_0^t of the kind's integrand.

    ``history[m]`` is the sampled sup over t <= 1 - 2^-m; the reported value
    adds a golden-section polish in (t, theta) around the maximiser.
    """
    grid = grid or GridSpec()
    quad = quad or QuadSpec(substeps=grid.substeps)
    fun = integrand(kind, g, nu)
    t = grid.interior_radii()
    thetas = grid.thetas(half=g.real)
    cum = cumulative_integrals(fun, t, thetas, quad)
    Q = mu(t)[:, None] * cum
    row = Q.max(axis=1)
    levels = [float(np.max(row[: grid.level_index(m) + 1])) for m in range(grid.levels + 1)]
    i, j = np.unravel_index(int(np.argmax(Q)), Q.shape)
    val, t0, th0 = float(Q[i, j]), float(t[i]), float(thetas[j])
    polish = [val]
    if grid.refine and val > 0 and 0 < i < t.size - 1:
        def q(tt, th):
            if tt <= 0.0:
                return 0.0
            tt = min(tt, float(t[-1]))
            return float(mu(np.array([tt]))[0]) * radial_integral(kind, g, nu, th, 0.0, tt, quad)

        dth = float(thetas[1] - thetas[0]) if thetas.size > 1 else np.pi
        val, t0, th0, polish = polar_polish(q, t0, th0, val, float(t[i - 1]), float(t[i + 1]),
                                            dth, rel_tol=grid.refine_tol)
    th0 = abs(float(np.angle(np.exp(1j * th0)))) if g.real else float(np.mod(th0, 2 * np.pi))
    verdict, note = sup_verdict(levels)
    return CriterionResult(kind, "Sup", val, verdict, levels,
                           {"t": t0, "theta": th0, "polish": polish},
                           _inputs(kind, g, nu, mu), note)


# -- pointwise quantities ----------------------------------------------------------

@dataclass(frozen=True)
class AssocPolicy:
    """How the associated weight enters K2/K4/K5.

    ``auto``: nu~ = nu for an analytic witness, nu (equivalent) under (U),
    otherwise both ends of the monomial sandwich; ``nu`` forces nu~ = nu.
    """

    mode: str = "auto"

    def resolve(self, nu: RadialWeight):
        if self.mode == "nu":
            from .weights import AssocResolution
            return AssocResolution("forced", nu, nu, "nu~ replaced by nu on request")
        if self.mode != "auto":
            raise ValueError(f"unknown assoc policy {self.mode!r}")
        return resolve_associated(nu)


def pointwise_expression(kind: str, g: SymbolSpec, nu, mu, nu_tilde=None):
    """Vectorised (r, theta) -> value of a pointwise kind."""
    nt = nu_tilde if nu_tilde is not None else nu

    def om(r):
        return (1.0 - r) * (1.0 + r)

    exprs = {
        "K1": lambda r, t: mu(r) * np.abs(g.g(r * np.exp(1j * t))) / nu(r),
        "K2": lambda r, t: mu(r) * np.abs(g.g(r * np.exp(1j * t))) / nt(r),
        "K3": lambda r, t: mu(r) * np.abs(g.g(r * np.exp(1j * t))) / (om(r) * nu(r)),
        "K4": lambda r, t: om(r) * mu(r) * np.abs(g.g(r * np.exp(1j * t))) / nt(r),
        "K5": lambda r, t: om(r) * mu(r) * np.abs(g.dg(r * np.exp(1j * t))) / nt(r),
    }
    if kind not in exprs:
        raise ValueError(f"unknown pointwise kind {kind!r}")
    return exprs[kind]


def _pointwise_once(kind, g, nu, mu, mode, grid, nu_tilde):
    expr = pointwise_expression(kind, g, nu, mu, nu_tilde)

    def fun(r, t):
        with np.errstate(all="ignore"):
            return expr(r, t)

    if mode == "Sup":
        est = polar_sup(fun, grid, half=g.real)
        verdict, note = sup_verdict(est.levels)
        return est.value, verdict, note, est.levels, {"r": est.radius, "theta": est.theta}
    thetas = grid.thetas(half=g.real)
    r = np.array([float(1.0 - 2.0 ** -m) for m in range(grid.levels + 1)])
    vals = np.asarray(fun(r[:, None], thetas[None, :]), dtype=float)
    if np.any(np.isnan(vals)):
        raise FloatingPointError("pointwise expression is not finite on the grid")
    per_level = vals.max(axis=1)
    verdict, note = limit_verdict(per_level)
    j = int(np.argmax(vals[-1]))
    return (float(per_level[-1]), verdict, note, [float(x) for x in per_level],
            {"r": float(r[-1]), "theta": float(thetas[j])})


def pointwise_quantity(kind: str, g: SymbolSpec, nu: RadialWeight, mu: RadialWeight,
                       mode: str = "Sup", grid: GridSpec | None = None,
                       assoc: AssocPolicy | None = None) -> CriterionResult:
    """Sup (mode "Sup") or boundary behaviour (mode "BoundaryLimit") of a pointwise kind."""
    if mode not in ("Sup", "BoundaryLimit"):
        raise ValueError("mode must be Sup or BoundaryLimit")
    grid = grid or GridSpec()
    inputs = _inputs(kind, g, nu, mu, mode=mode)
    if kind not in NEEDS_ASSOC:
        value, verdict, note, hist, wit = _pointwise_once(kind, g, nu, mu, mode, grid, None)
        return CriterionResult(kind, mode, value, verdict, hist, wit, inputs, note)
    res = (assoc or AssocPolicy()).resolve(nu)
    inputs["assoc"] = res.policy
    if res.policy != "sandwich":
        value, verdict, note, hist, wit = _pointwise_once(kind, g, nu, mu, mode, grid, res.lower)
        note = "; ".join(x for x in (res.note, note) if x)
        return CriterionResult(kind, mode, value, verdict, hist, wit, inputs, note)
    # nu~ only bracketed: nu <= nu~ <= upper, so the quantity is bracketed the other way
    hi = _pointwise_once(kind, g, nu, mu, mode, grid, res.lower)
    lo = _pointwise_once(kind, g, nu, mu, mode, grid, res.upper)
    verdict = hi[1] if hi[1] == lo[1] else INCONCLUSIVE
    wit = dict(hi[4], value_interval=[lo[0], hi[0]])
    note = res.note if verdict != INCONCLUSIVE else res.note + "; ends of the sandwich disagree"
    return CriterionResult(kind, mode, hi[0], verdict, hi[3], wit, inputs, note)


# -- compactness double limit ---------------------------------------------------------

@dataclass
class CompactnessProfile:
    kind: str
    levels: list
    values: list
    witnesses: list
    extrapolated: float
    verdict: str
    inputs: dict = field(default_factory=dict)
    note: str = ""

    def at(self, m: int) -> float:
        return self.values[self.levels.index(m)]

    def as_result(self) -> CriterionResult:
        """View as a CriterionResult (mode DoubleLimit) for reports."""
        return CriterionResult(self.kind, "DoubleLimit", self.values[-1], self.verdict,
                               list(self.values),
                               {"m": self.levels[-1], **self.witnesses[-1],
                                "extrapolated": self.extrapolated},
                               self.inputs, self.note)

    def to_dict(self) -> dict:
        return _clean(asdict(self))


def compactness_double_limit(kind: str, g: SymbolSpec, nu: RadialWeight, mu: RadialWeight,
                             grid: GridSpec | None = None, quad: QuadSpec | None = None,
                             m_min: int = 4, m_max: int = 12,
                             extra_levels: int = 16) -> CompactnessProfile:
    """C(m) = max over t1 in (t2, 1) and theta of mu(t1) * int_{t2}^{t1}, t2 = 1 - 2^-m.

    t1 runs over the geometric sub-grid 1 - 2^-(m + j/s) up to ``extra_levels``
    further levels; the limit is extrapolated linearly in 2^-m from the last
    four levels.
    """
    if m_max - m_min < 4:
        raise ValueError("need at least five levels")
    grid = grid or GridSpec()
    s = grid.substeps
    quad = quad or QuadSpec(substeps=s)
    fun = integrand(kind, g, nu)
    thetas = grid.thetas(half=g.real)
    top = m_max + extra_levels
    j = np.arange(0, top * s + 1)
    t = -np.expm1(-math.log(2.0) * j / s)
    cum = cumulative_integrals(fun, t, thetas, quad)
    w = mu(t)
    levels, values, wits = [], [], []
    for m in range(m_min, m_max + 1):
        i2 = m * s
        i1 = np.arange(i2 + 1, (m + extra_levels) * s + 1)
        block = w[i1, None] * (cum[i1] - cum[i2][None, :])
        a, b = np.unravel_index(int(np.argmax(block)), block.shape)
        levels.append(m)
        values.append(float(max(block[a, b], 0.0)))
        wits.append({"t1": float(t[i1[a]]), "theta": float(thetas[b])})
    x = 2.0 ** -np.array(levels[-4:], dtype=float)
    slope, intercept = np.polyfit(x, np.array(values[-4:]), 1)
    verdict, note = double_limit_verdict(values)
    return CompactnessProfile(kind, levels, values, wits, float(intercept), verdict,
                              _inputs(kind, g, nu, mu), note)


def sg_into_hinf_compact(g: SymbolSpec) -> bool:
    """S_g into H^inf_mu with mu = 1 is compact exactly when g = 0."""
    return g.is_zero(1e-14)
