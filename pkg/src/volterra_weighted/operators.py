"""Symbols g, the operators T_g f = int_0^z f g' and S_g f = int_0^z f' g,
and lower estimates of their norms between weighted spaces.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .results import DIVERGENT, CriterionResult, sup_verdict
from .series import (
    GridSpec,
    TruncatedSeries,
    as_series,
    cauchy_product,
    differentiate,
    golden_polish,
    polar_sup,
    sup_estimate,
    weighted_sup_norm,
)

DEFAULT_TERMS = 2048
ZERO_COEFF_TOL = 1e-14


# -- symbols -----------------------------------------------------------------

@dataclass(frozen=True)
class SymbolSpec:
    """A symbol g with coefficients and vectorised evaluators of g, g', g''."""

    name: str
    coeffs: TruncatedSeries
    g: Callable
    dg: Callable
    d2g: Callable
    univalent: bool = False
    closed_form: bool = True

    @property
    def real(self) -> bool:
        return self.coeffs.is_real()

    def is_zero(self, tol: float = ZERO_COEFF_TOL) -> bool:
        return bool(np.all(np.abs(self.coeffs.coeffs) <= tol))

    def coefficient_mismatch(self, radius: float = 0.9, n: int = 64) -> float:
        """max |coefficient evaluation - closed form| on the circle |z| = radius."""
        z = radius * np.exp(2j * np.pi * np.arange(n) / n)
        return float(np.max(np.abs(self.coeffs(z) - self.g(z))))


def _poly_symbol(name, coeffs, univalent=False) -> SymbolSpec:
    c = as_series(coeffs)
    d1 = differentiate(c)
    d2 = differentiate(d1)
    return SymbolSpec(name, c, c.__call__, d1.__call__, d2.__call__,
                      univalent=univalent, closed_form=False)


@lru_cache(maxsize=None)
def _neglog_coeffs(terms):
    c = np.zeros(terms)
    c[1:] = 1.0 / np.arange(1, terms)
    return c


@lru_cache(maxsize=None)
def _exp_coeffs(terms):
    c = np.ones(terms)
    for k in range(1, terms):
        c[k] = c[k - 1] / k
    return c


@lru_cache(maxsize=None)
def _cayley_coeffs(gamma, terms):
    # exp of h = 2 gamma atanh(z): n e_n = sum_k k h_k e_{n-k}
    h = np.zeros(terms)
    h[1::2] = 2.0 * gamma / np.arange(1, terms, 2)
    kh = np.arange(terms) * h
    e = np.zeros(terms)
    e[0] = 1.0
    for m in range(1, terms):
        e[m] = np.dot(kh[1:m + 1], e[m - 1::-1]) / m
    return e


def _neglog(terms):
    return SymbolSpec(
        "neglog1mz", TruncatedSeries(_neglog_coeffs(terms)),
        lambda z: -np.log(1.0 - z), lambda z: 1.0 / (1.0 - z),
        lambda z: 1.0 / (1.0 - z) ** 2, univalent=True)


def _cayleypow(gamma, terms):
    if not gamma > 0:
        raise ValueError("cayleypow needs gamma > 0")

    def g(z):
        return np.exp(gamma * np.log((1.0 + z) / (1.0 - z)))

    return SymbolSpec(
        f"cayleypow:{gamma:g}", TruncatedSeries(_cayley_coeffs(gamma, terms)), g,
        lambda z: g(z) * 2.0 * gamma / (1.0 - z * z),
        lambda z: g(z) * (4.0 * gamma ** 2 + 4.0 * gamma * z) / (1.0 - z * z) ** 2,
        univalent=gamma <= 1.0)


def make_symbol(name: str, terms: int = DEFAULT_TERMS) -> SymbolSpec:
    """Catalog lookup: neglog1mz, identity, cayleypow:<gamma>, expz, zero, poly:[...]."""
    name = name.strip()
    if name == "neglog1mz":
        return _neglog(terms)
    if name == "identity":
        one = lambda z: np.ones_like(np.asarray(z, dtype=complex))  # noqa: E731
        zero = lambda z: np.zeros_like(np.asarray(z, dtype=complex))  # noqa: E731
        return SymbolSpec("identity", TruncatedSeries([0.0, 1.0]),
                          lambda z: np.asarray(z, dtype=complex), one, zero, univalent=True)
    if name == "zero":
        zero = lambda z: np.zeros_like(np.asarray(z, dtype=complex))  # noqa: E731
        return SymbolSpec("zero", TruncatedSeries([0.0]), zero, zero, zero)
    if name == "expz":
        return SymbolSpec("expz", TruncatedSeries(_exp_coeffs(terms)),
                          np.exp, np.exp, np.exp, univalent=True)
    if name.startswith("cayleypow:"):
        try:
            gamma = float(name.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad cayleypow exponent in {name!r}") from None
        return _cayleypow(gamma, terms)
    if name.startswith("poly:"):
        try:
            raw = json.loads(name.split(":", 1)[1])
            coeffs = [complex(x) if not isinstance(x, list) else complex(*x) for x in raw]
        except (ValueError, TypeError):
            raise ValueError(f"bad coefficient list in {name!r}") from None
        if not coeffs:
            raise ValueError("poly: needs at least one coefficient")
        c = np.array(coeffs)
        univalent = c.size >= 2 and c[1] != 0 and np.all(c[2:] == 0)
        return _poly_symbol(name, c, univalent=bool(univalent))
    raise ValueError(f"unknown symbol {name!r}")


CATALOG = ("neglog1mz", "identity", "cayleypow:0.5", "cayleypow:1", "expz", "zero")


# -- operators on coefficients ---------------------------------------------

def apply_Sg(f, g: SymbolSpec, out_degree: int) -> TruncatedSeries:
    """S_g f = int_0^z f' g, truncated at ``out_degree``.

    Coefficient n is (1/n) sum_j j f_j g_{n-j}, so constants map to exact zeros.
    """
    if out_degree < 1:
        raise ValueError("out_degree must be >= 1")
    f = as_series(f)
    zdf = f.coeffs * np.arange(f.coeffs.size)
    c = cauchy_product(zdf, g.coeffs, out_degree).coeffs.copy()
    c[1:] /= np.arange(1, out_degree + 1)
    c[0] = 0.0
    return TruncatedSeries(c)


def apply_Tg(f, g: SymbolSpec, out_degree: int) -> TruncatedSeries:
    """T_g f = int_0^z f g', truncated at ``out_degree``.

    Uses T_g f = f g - f(0) g(0) - S_g f, which keeps T_g 1 = g - g(0) exact.
    """
    if out_degree < 1:
        raise ValueError("out_degree must be >= 1")
    fg = cauchy_product(f, g.coeffs, out_degree).coeffs.copy()
    fg -= apply_Sg(f, g, out_degree).coeffs
    fg[0] = 0.0
    return TruncatedSeries(fg)


# -- log-Bloch hypotheses ------------------------------------------------------

LOG_KINDS = ("log_gprime", "log_g")


def log_bloch_seminorm(h_kind: str, g: SymbolSpec, grid: GridSpec | None = None) -> CriterionResult:
    """sup (1-|z|^2) |h'/h| for h = g' (log_gprime) or h = g (log_g)."""
    if h_kind not in LOG_KINDS:
        raise ValueError(f"h_kind must be one of {LOG_KINDS}")
    grid = grid or GridSpec()
    num, den = (g.d2g, g.dg) if h_kind == "log_gprime" else (g.dg, g.g)
    radii = grid.interior_radii()
    thetas = grid.thetas(half=g.real)
    Z = radii[:, None] * np.exp(1j * thetas[None, :])
    with np.errstate(all="ignore"):
        D = np.abs(den(Z))
        N = np.abs(num(Z))
    inputs = {"h_kind": h_kind, "g": g.name}
    scale = max(float(np.max(D)), 1e-300)
    zero = (D <= 1e-14 * scale) | ~np.isfinite(D)
    if np.any(zero):
        i, j = np.argwhere(zero)[0]
        return CriterionResult(
            h_kind, "Sup", math.inf, DIVERGENT, [math.inf],
            {"r": float(radii[i]), "theta": float(thetas[j])}, inputs,
            "denominator vanishes on the grid")

    def fun(r, t):
        z = r * np.exp(1j * t)
        with np.errstate(all="ignore"):
            return (1.0 - r) * (1.0 + r) * np.abs(num(z)) / np.abs(den(z))

    est = polar_sup(fun, grid, half=g.real)
    # zeros strictly between grid points: argument principle on the outer circle
    circle = radii[-1] * np.exp(2j * np.pi * np.arange(4 * grid.n_theta) / (4 * grid.n_theta))
    with np.errstate(all="ignore"):
        w = den(circle)
    winding = int(round(np.sum(np.angle(np.roll(w, -1) / w)) / (2 * np.pi)))
    if winding != 0:
        return CriterionResult(
            h_kind, "Sup", math.inf, DIVERGENT, est.levels + [math.inf],
            {"r": est.radius, "theta": est.theta}, inputs,
            f"denominator has {winding} zero(s) inside the grid; witness near the largest sample")
    verdict, note = sup_verdict(est.levels)
    return CriterionResult(h_kind, "Sup", est.value, verdict, est.levels,
                           {"r": est.radius, "theta": est.theta}, inputs, note)


# -- derivative growth constant ------------------------------------------------

def cauchy_constant(nu, levels: int = 30, n_rho: int = 64) -> float:
    """C with sup nu(z) (1-|z|^2) |f'(z)| <= C ||f||_{H^inf_nu}.

    The Cauchy estimate on the circle of radius rho around z gives
    |f'(z)| <= ||f|| / (rho nu(|z| + rho)); the bound is minimised over
    rho = x (1 - r) and maximised over radii up to ``levels`` dyadic levels.
    """
    j = np.arange(0, 4 * levels + 1)
    r = -np.expm1(-np.log(2.0) * j / 4.0)
    x = np.linspace(0.02, 0.98, n_rho)
    rho = x[None, :] * (1.0 - r[:, None])
    ratio = nu(r)[:, None] * (1.0 - r[:, None] ** 2) / (rho * nu(r[:, None] + rho))
    return float(np.max(np.min(ratio, axis=1)))


# -- operator norm lower bounds -------------------------------------------------

SPACES = ("Hinf", "Bloch")
OPS = ("Tg", "Sg")


@dataclass(frozen=True)
class SearchSpec:
    degree: int = 8
    n_random: int = 8
    restarts: int = 3
    sweeps: int = 2
    seed: int = 42
    grid: GridSpec = GridSpec(levels=12, substeps=4, n_theta=128, refine=False)

    def __post_init__(self):
        if min(self.degree, self.restarts) < 1 or self.n_random < 0 or self.sweeps < 0:
            raise ValueError("search budget must be >= 1")

    @classmethod
    def from_env(cls, **kw) -> "SearchSpec":
        """Honour VOLTERRA_SEED unless a seed is passed explicitly."""
        if "seed" not in kw and os.environ.get("VOLTERRA_SEED"):
            kw["seed"] = int(os.environ["VOLTERRA_SEED"])
        return cls(**kw)


@dataclass
class NormEstimate:
    lower: float
    criterion_upper: float | None = None
    witness: dict = field(default_factory=dict)
    history: list = field(default_factory=list)

    def consistent(self, rtol: float = 0.01) -> bool | None:
        if self.criterion_upper is None or not math.isfinite(self.criterion_upper):
            return None
        return bool(self.lower <= self.criterion_upper * (1.0 + rtol) + 1e-12)

    def to_dict(self) -> dict:
        from .results import _clean
        return _clean({"lower": self.lower, "criterion_upper": self.criterion_upper,
                       "witness": self.witness, "history": self.history})


_GL_X, _GL_W = roots_legendre(16)


class _Discretised:
    """Linear maps c -> samples of f, f' and (op f), (op f)' on a shared grid.

    (op z^k) on H^inf codomains is built by 16-point Gauss-Legendre quadrature
    along rays, cumulative over the radial panels of the grid, using the
    closed-form g and g'.
    """

    def __init__(self, op, g: SymbolSpec, nu, mu, domain, codomain, degree, grid):
        self.domain, self.codomain = domain, codomain
        radii_dom = grid.radii()                       # polynomials: closed disk
        radii_cod = grid.interior_radii()
        thetas = grid.thetas(half=False)
        k = np.arange(degree + 1)
        e = np.exp(1j * thetas)
        wd = np.asarray([nu.boundary_value() if r >= 1.0 else float(nu(np.array([r]))[0])
                         for r in radii_dom])
        Zd = (radii_dom[:, None] * e[None, :]).ravel()
        if domain == "Hinf":
            self.dom = (wd.repeat(thetas.size)[:, None]) * Zd[:, None] ** k
        else:
            dz = np.where(k > 0, k * Zd[:, None] ** np.maximum(k - 1, 0), 0.0)
            self.dom = (wd.repeat(thetas.size)[:, None]) * dz
        wc = mu(radii_cod).repeat(thetas.size)
        Zc = (radii_cod[:, None] * e[None, :]).ravel()
        with np.errstate(all="ignore"):
            if codomain == "Bloch":
                self.cod = wc[:, None] * self._deriv_basis(op, g, Zc, k)
            else:
                self.cod = wc[:, None] * self._integrated_basis(op, g, radii_cod, e, k)
        self.cod[~np.isfinite(self.cod)] = 0.0

    @staticmethod
    def _deriv_basis(op, g, z, k):
        if op == "Tg":
            return (z[:, None] ** k) * g.dg(z)[:, None]
        dz = np.where(k > 0, k * z[:, None] ** np.maximum(k - 1, 0), 0.0)
        return dz * g.g(z)[:, None]

    def _integrated_basis(self, op, g, radii, e, k):
        a, b = radii[:-1], radii[1:]
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        wts = (half[:, None] * _GL_W[None, :]).ravel()
        z = nodes[:, None] * e[None, :]                      # (panels*16, n_theta)
        h = self._deriv_basis(op, g, z.ravel(), k).reshape(z.shape + (k.size,))
        # d(op f)/dr along the ray = h(z) e^{i theta}
        contrib = (wts[:, None, None] * h * e[None, :, None]).reshape(
            a.size, _GL_X.size, e.size, k.size).sum(axis=1)
        cum = np.concatenate([np.zeros((1, e.size, k.size), complex),
                              np.cumsum(contrib, axis=0)])
        return cum.reshape(-1, k.size)

    def dom_norm(self, c):
        v = float(np.max(np.abs(self.dom @ c)))
        return v + abs(c[0]) if self.domain == "Bloch" else v

    def cod_norm(self, c):
        return float(np.max(np.abs(self.cod @ c)))

    def ratio(self, c):
        d = self.dom_norm(c)
        return self.cod_norm(c) / d if d > 0 else 0.0


def _exact_domain_norm(c, nu, domain, grid):
    f = TruncatedSeries(c)
    if domain == "Hinf":
        return sup_estimate(f, nu, grid).value
    return abs(complex(c[0])) + weighted_sup_norm(differentiate(f), nu, grid)


def opnorm_lower(op_kind: str, g: SymbolSpec, nu, mu, domain_kind: str = "Hinf",
                 codomain_kind: str = "Hinf", search: SearchSpec | None = None) -> NormEstimate:
    """max of ||op f|| / ||f|| over a deterministic family of test polynomials.

    Family: f = 1, normalised monomials, random complex polynomials, then
    coordinate ascent over the 2 (degree + 1) real and imaginary coefficient
    directions from the best ``restarts`` starts. Norms share one sampling
    grid; the winning f has its domain norm recomputed on a refined grid.
    """
    if op_kind not in OPS or domain_kind not in SPACES or codomain_kind not in SPACES:
        raise ValueError("unknown operator or space")
    search = search or SearchSpec()
    D = search.degree
    if g.is_zero():
        return NormEstimate(0.0, witness={"family": "zero operator", "coeffs": [[1.0, 0.0]]},
                            history=[0.0])
    disc = _Discretised(op_kind, g, nu, mu, domain_kind, codomain_kind, D, search.grid)
    rng = np.random.default_rng(search.seed)
    cands = []
    for n in range(D + 1):
        c = np.zeros(D + 1, complex)
        c[n] = 1.0
        cands.append(("constant" if n == 0 else f"monomial z^{n}", c))
    for i in range(search.n_random):
        c = rng.standard_normal(D + 1) + 1j * rng.standard_normal(D + 1)
        cands.append((f"random #{i}", c))
    scored = sorted(((disc.ratio(c), -i, name, c) for i, (name, c) in enumerate(cands)),
                    key=lambda t: (t[0], t[1]), reverse=True)
    history = [scored[0][0]]
    best = None
    for val, neg_i, name, c in scored[: search.restarts]:
        c = c / max(disc.dom_norm(c), 1e-300)
        for _ in range(search.sweeps):
            for j in range(2 * (D + 1)):
                direc = np.zeros(D + 1, complex)
                direc[j // 2] = 1.0 if j % 2 == 0 else 1j
                step = 1.0 / max(disc.dom_norm(direc), 1e-300)
                t, val2 = golden_polish(lambda t: disc.ratio(c + t * step * direc),
                                        0.0, -1.0, 1.0, val, tol=1e-6, maxiter=40)
                if val2 > val:
                    c = c + t * step * direc
                    c = c / max(disc.dom_norm(c), 1e-300)
                    val = val2
        if best is None or val > best[0]:
            best = (val, name, c)
        history.append(val)
    _, name, c = best
    fine = GridSpec(levels=search.grid.levels + 2, substeps=search.grid.substeps,
                    n_theta=max(256, search.grid.n_theta))
    dnorm = max(_exact_domain_norm(c, nu, domain_kind, fine), disc.dom_norm(c))
    lower = disc.cod_norm(c) / dnorm if dnorm > 0 else 0.0
    history.append(lower)
    witness = {
        "family": name,
        "degree": D,
        "coeffs": [[float(x.real), float(x.imag)] for x in c / dnorm],
        "seed": search.seed,
    }
    return NormEstimate(lower, witness=witness, history=history)
