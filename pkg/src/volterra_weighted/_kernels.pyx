# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: polynomial evaluation on point clouds and polar grids.

Every routine here has a numpy twin in ``_kernels_py`` with identical
semantics; ``kernels`` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

# Complex arithmetic is spelled out on (re, im) pairs: C99 complex multiply
# goes through __muldc3 for its NaN/inf rules, which is several times slower.


DEF LANES = 8


cdef inline void _horner_lanes(const double[::1] c, Py_ssize_t n, double* zr, double* zi,
                              double* outr, double* outi) noexcept nogil:
    """Horner on LANES points at once; independent chains hide FP latency."""
    cdef double ar[LANES]
    cdef double ai[LANES]
    cdef double t, cr, ci
    cdef Py_ssize_t k, q
    for q in range(LANES):
        ar[q] = c[2 * n - 2]
        ai[q] = c[2 * n - 1]
    for k in range(n - 2, -1, -1):
        cr = c[2 * k]
        ci = c[2 * k + 1]
        for q in range(LANES):
            t = ar[q] * zr[q] - ai[q] * zi[q] + cr
            ai[q] = ar[q] * zi[q] + ai[q] * zr[q] + ci
            ar[q] = t
    for q in range(LANES):
        outr[q] = ar[q]
        outi[q] = ai[q]


def horner(const double complex[::1] coeffs, const double complex[::1] z):
    """Evaluate sum(coeffs[k] * z**k) at every point of ``z``."""
    cdef Py_ssize_t n = coeffs.shape[0]
    cdef Py_ssize_t m = z.shape[0]
    cdef Py_ssize_t i, q, p, blocks
    cdef double zr[LANES]
    cdef double zi[LANES]
    cdef double outr[LANES]
    cdef double outi[LANES]
    out = np.zeros(m, dtype=np.complex128)
    if n == 0 or m == 0:
        return out
    cdef double[::1] res = out.view(np.float64)
    cdef const double[::1] c = np.asarray(coeffs).view(np.float64)
    cdef const double[::1] zz = np.asarray(z).view(np.float64)
    blocks = (m + LANES - 1) // LANES
    with nogil:
        for i in range(blocks):
            for q in range(LANES):
                # pad the last block by repeating its first point
                p = LANES * i + q if LANES * i + q < m else LANES * i
                zr[q] = zz[2 * p]
                zi[q] = zz[2 * p + 1]
            _horner_lanes(c, n, zr, zi, outr, outi)
            for q in range(LANES):
                if LANES * i + q < m:
                    res[2 * (LANES * i + q)] = outr[q]
                    res[2 * (LANES * i + q) + 1] = outi[q]
    return out


def weighted_absmax(const double complex[::1] coeffs,
                    const double[::1] radii,
                    const double[::1] weights,
                    const double[::1] thetas):
    """Return (max, i_r, i_theta) of weights[i] * |p(radii[i] e^{i thetas[j]})|.

    Ties resolve to the first index in row-major (radius, angle) order.
    """
    cdef Py_ssize_t n = coeffs.shape[0]
    cdef Py_ssize_t nr = radii.shape[0]
    cdef Py_ssize_t nt = thetas.shape[0]
    cdef Py_ssize_t i, j, q
    cdef double best = -1.0, val, r, w
    cdef Py_ssize_t bi = 0, bj = 0
    cdef double zr[LANES]
    cdef double zi[LANES]
    cdef double outr[LANES]
    cdef double outi[LANES]
    if n == 0:
        return 0.0, 0, 0
    cdef const double[::1] c = np.asarray(coeffs).view(np.float64)
    cdef double[::1] ct = np.cos(np.asarray(thetas))
    cdef double[::1] st = np.sin(np.asarray(thetas))
    with nogil:
        for i in range(nr):
            r = radii[i]
            w = weights[i]
            if w == 0.0:
                if 0.0 > best:
                    best = 0.0
                    bi = i
                    bj = 0
                continue
            for j in range(0, nt, LANES):
                for q in range(LANES):
                    zr[q] = r * ct[j + q] if j + q < nt else r * ct[j]
                    zi[q] = r * st[j + q] if j + q < nt else r * st[j]
                _horner_lanes(c, n, zr, zi, outr, outi)
                for q in range(LANES):
                    if j + q < nt:
                        val = w * sqrt(outr[q] * outr[q] + outi[q] * outi[q])
                        if val > best:
                            best = val
                            bi = i
                            bj = j + q
    return best, bi, bj


def cauchy_product(const double complex[::1] a,
                   const double complex[::1] b,
                   Py_ssize_t out_degree):
    """Truncated convolution c_k = sum_{i+j=k} a_i b_j for k <= out_degree."""
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t k, i, lo, hi
    cdef double sr, si, ur, ui, xr, xi, yr, yi
    out = np.zeros(out_degree + 1, dtype=np.complex128)
    cdef double[::1] c = out.view(np.float64)
    cdef const double[::1] av = np.asarray(a).view(np.float64)
    cdef const double[::1] bv = np.asarray(b).view(np.float64)
    for k in range(out_degree + 1):
        lo = k - nb + 1
        if lo < 0:
            lo = 0
        hi = k if k < na - 1 else na - 1
        # two independent accumulator pairs
        sr = 0.0
        si = 0.0
        ur = 0.0
        ui = 0.0
        i = lo
        while i + 1 <= hi:
            xr = av[2 * i]
            xi = av[2 * i + 1]
            yr = bv[2 * (k - i)]
            yi = bv[2 * (k - i) + 1]
            sr = sr + xr * yr - xi * yi
            si = si + xr * yi + xi * yr
            xr = av[2 * i + 2]
            xi = av[2 * i + 3]
            yr = bv[2 * (k - i) - 2]
            yi = bv[2 * (k - i) - 1]
            ur = ur + xr * yr - xi * yi
            ui = ui + xr * yi + xi * yr
            i += 2
        if i <= hi:
            xr = av[2 * i]
            xi = av[2 * i + 1]
            yr = bv[2 * (k - i)]
            yi = bv[2 * (k - i) + 1]
            sr = sr + xr * yr - xi * yi
            si = si + xr * yi + xi * yr
        c[2 * k] = sr + ur
        c[2 * k + 1] = si + ui
    return out
