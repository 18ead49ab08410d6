"""Truncated power series on the unit disk and their weighted sup-norms.

A :class:`TruncatedSeries` holds complex Taylor coefficients ``c_0..c_N``.
Weighted norms are sampled on a polar :class:`GridSpec` whose radii cluster
geometrically at the boundary, ``r_j = 1 - 2**(-j / substeps)``, followed by
a golden-section polish around the sampled maximiser.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients ``c_0..c_N`` of a polynomial / truncated Taylor series."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=np.complex128)
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def monomial(cls, n: int, scale: complex = 1.0) -> "TruncatedSeries":
        c = np.zeros(n + 1, dtype=np.complex128)
        c[n] = scale
        return cls(c)

    @classmethod
    def constant(cls, value: complex) -> "TruncatedSeries":
        return cls([value])

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other):
        n = max(self.coeffs.size, other.coeffs.size)
        out = np.zeros(n, dtype=np.complex128)
        out[: self.coeffs.size] += self.coeffs
        out[: other.coeffs.size] += other.coeffs
        return TruncatedSeries(out)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs * factor)

    def truncated(self, degree: int) -> "TruncatedSeries":
        out = np.zeros(degree + 1, dtype=np.complex128)
        m = min(out.size, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        return TruncatedSeries(out)

    def is_real(self) -> bool:
        return bool(np.all(self.coeffs.imag == 0.0))


def as_series(a) -> TruncatedSeries:
    return a if isinstance(a, TruncatedSeries) else TruncatedSeries(a)


def cauchy_product(a, b, out_degree: int) -> TruncatedSeries:
    """Product of two series truncated at ``out_degree``."""
    if out_degree < 0:
        raise ValueError("out_degree must be >= 0")
    a, b = as_series(a), as_series(b)
    return TruncatedSeries(kernels.cauchy_product(a.coeffs, b.coeffs, out_degree))


def differentiate(a) -> TruncatedSeries:
    """Termwise derivative; a constant maps to the zero series of degree 0."""
    a = as_series(a)
    if a.degree == 0:
        return TruncatedSeries([0.0])
    k = np.arange(1, a.coeffs.size)
    return TruncatedSeries(k * a.coeffs[1:])


def volterra_antiderivative(a) -> TruncatedSeries:
    """Primitive vanishing at the origin, ``z -> int_0^z a``; degree grows by one."""
    a = as_series(a)
    out = np.zeros(a.coeffs.size + 1, dtype=np.complex128)
    out[1:] = a.coeffs / np.arange(1, a.coeffs.size + 1)
    return TruncatedSeries(out)


def evaluate(a, z):
    """Horner evaluation; accepts scalars or arrays of points."""
    a = as_series(a)
    zz = np.asarray(z, dtype=np.complex128)
    vals = kernels.horner(a.coeffs, zz)
    return complex(vals) if zz.ndim == 0 else vals


@dataclass(frozen=True)
class GridSpec:
    """Polar sampling grid of the closed disk.

    ``levels`` dyadic levels with ``substeps`` radii each; level ``k`` ends at
    ``r = 1 - 2**-k``. ``boundary`` adds the unit circle (used for norms of
    polynomials, where the weight is extended by its boundary limit).
    """

    levels: int = 14
    substeps: int = 4
    n_theta: int = 256
    refine: bool = True
    refine_tol: float = 1e-4
    boundary: bool = True

    def __post_init__(self):
        if self.levels < 1 or self.substeps < 1 or self.n_theta < 1:
            raise ValueError("grid needs at least one level, substep and angle")
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be positive")

    def interior_radii(self) -> np.ndarray:
        return _interior_radii(self.levels, self.substeps)

    def radii(self) -> np.ndarray:
        r = self.interior_radii()
        return np.append(r, 1.0) if self.boundary else r

    def thetas(self, half: bool = False) -> np.ndarray:
        return grid_thetas(self.n_theta, half)

    def level_index(self, k: int) -> int:
        """Index into :meth:`interior_radii` of the dyadic radius ``1 - 2**-k``."""
        return k * self.substeps


@lru_cache(maxsize=64)
def _interior_radii(levels: int, substeps: int) -> np.ndarray:
    j = np.arange(1, levels * substeps + 1)
    r = np.concatenate([[0.0], -np.expm1(-np.log(2.0) * j / substeps)])
    r.setflags(write=False)
    return r


@lru_cache(maxsize=64)
def grid_thetas(n_theta: int, half: bool = False) -> np.ndarray:
    """Equispaced angles on [0, 2pi), or on [0, pi] for conjugation-symmetric data."""
    if half:
        m = max(1, n_theta // 2)
        th = np.linspace(0.0, np.pi, m + 1)
    else:
        th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    th.setflags(write=False)
    return th


@dataclass
class SupEstimate:
    """Sampled supremum (a lower estimate) with its maximiser."""

    value: float
    radius: float
    theta: float
    history: list = field(default_factory=list)

    @property
    def witness(self) -> complex:
        return self.radius * np.exp(1j * self.theta)


def weight_values(nu, radii):
    """nu on ``radii`` with r = 1 replaced by the boundary limit of nu."""
    radii = np.asarray(radii, dtype=float)
    out = np.empty_like(radii)
    inside = radii < 1.0
    out[inside] = nu(radii[inside])
    if not np.all(inside):
        out[~inside] = nu.boundary_value()
    return out


def golden_polish(fun, x0, lo, hi, f0, *, tol=1e-10, maxiter=60):
    """Maximise a scalar function on [lo, hi]; never returns worse than (x0, f0)."""
    if not hi > lo:
        return x0, f0
    res = minimize_scalar(lambda x: -fun(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": tol * max(1.0, abs(hi)), "maxiter": maxiter})
    if res.success and -res.fun > f0:
        return float(res.x), float(-res.fun)
    return x0, f0


def polar_polish(fun, r0, t0, val0, r_lo, r_hi, dtheta, *, rel_tol, rounds=6):
    """Alternate golden-section steps in radius and angle around (r0, t0).

    Returns (value, r, theta, history) with a nondecreasing history.
    """
    history = [val0]
    r, t, val = r0, t0, val0
    for _ in range(rounds):
        prev = val
        r, val = golden_polish(lambda x: fun(x, t), r, r_lo, r_hi, val)
        t, val = golden_polish(lambda x: fun(r, x), t, t - dtheta, t + dtheta, val)
        history.append(val)
        if val - prev <= rel_tol * max(abs(val), 1e-300):
            break
    return val, r, t, history


def sup_estimate(a, nu, grid: GridSpec | None = None) -> SupEstimate:
    """sup over the sampled disk of nu(|z|) |a(z)|, with refinement history."""
    a = as_series(a)
    grid = grid or GridSpec()
    radii = grid.radii()
    w = weight_values(nu, radii)
    thetas = grid.thetas()
    val, i, j = kernels.weighted_absmax(a.coeffs, radii, w, thetas)
    val = float(val)
    r0, t0 = float(radii[i]), float(thetas[j])
    if not grid.refine or a.degree == 0 or val == 0.0:
        return SupEstimate(val, r0, t0, [val])

    def fun(r, t):
        r = min(max(r, 0.0), 1.0)
        wr = float(weight_values(nu, [r])[0])
        return wr * abs(evaluate(a, r * np.exp(1j * t)))

    r_lo = float(radii[max(i - 1, 0)])
    r_hi = float(radii[min(i + 1, radii.size - 1)])
    dtheta = 2.0 * np.pi / thetas.size
    val, r, t, hist = polar_polish(fun, r0, t0, val, r_lo, r_hi, dtheta,
                                   rel_tol=grid.refine_tol)
    return SupEstimate(val, r, float(np.mod(t, 2 * np.pi)), hist)


def weighted_sup_norm(a, nu, grid: GridSpec | None = None) -> float:
    """||a||_{H^inf_nu} estimated from below on the grid."""
    return sup_estimate(a, nu, grid).value


def weighted_bloch_norm(a, nu, grid: GridSpec | None = None) -> float:
    """|a(0)| + sup nu |a'|."""
    a = as_series(a)
    return float(abs(a.coeffs[0])) + weighted_sup_norm(differentiate(a), nu, grid)


@dataclass
class LevelSup:
    """Supremum of a function of (r, theta) over the grid, tracked per level.

    ``levels[k]`` is the sampled sup over radii ``r <= 1 - 2**-k``; the final
    ``value`` includes the local polish around the overall maximiser.
    """

    value: float
    radius: float
    theta: float
    levels: list
    polish: list


def polar_sup(fun, grid: GridSpec, *, half: bool = False, radii=None) -> LevelSup:
    """Sup of ``fun(r, theta)`` (vectorised, real, >= 0) on a polar grid.

    NaN entries propagate as errors to the caller; ``inf`` is allowed and
    reported as the value.
    """
    radii = grid.interior_radii() if radii is None else np.asarray(radii, dtype=float)
    thetas = grid.thetas(half)
    vals = np.asarray(fun(radii[:, None], thetas[None, :]), dtype=float)
    vals = np.broadcast_to(vals, (radii.size, thetas.size))
    if np.any(np.isnan(vals)):
        i = int(np.argwhere(np.isnan(vals))[0][0])
        raise FloatingPointError(f"integrand is not finite at r={radii[i]!r}")
    row = vals.max(axis=1)
    cum = np.maximum.accumulate(row)
    levels = [float(cum[min(k * grid.substeps, radii.size - 1)])
              for k in range(grid.levels + 1)]
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    val = float(vals[i, j])
    r0, t0 = float(radii[i]), float(thetas[j])
    if not grid.refine or not np.isfinite(val) or val == 0.0:
        return LevelSup(val, r0, t0, levels, [val])

    def f1(r, t):
        v = float(np.asarray(fun(np.array([[r]]), np.array([[t]]))).ravel()[0])
        return v if np.isfinite(v) else -np.inf

    r_lo = float(radii[max(i - 1, 0)])
    r_hi = float(radii[min(i + 1, radii.size - 1)])
    dtheta = float(thetas[1] - thetas[0]) if thetas.size > 1 else np.pi
    val2, r, t, hist = polar_polish(f1, r0, t0, val, r_lo, r_hi, dtheta,
                                    rel_tol=grid.refine_tol)
    if half:
        t = float(np.clip(t, 0.0, np.pi)) if 0.0 <= t <= np.pi else abs(float(np.angle(np.exp(1j * t))))
    else:
        t = float(np.mod(t, 2 * np.pi))
    return LevelSup(val2, r, t, levels, hist)
