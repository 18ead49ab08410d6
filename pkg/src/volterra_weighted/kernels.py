"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise the numpy
implementation takes over. Setting ``VOLTERRA_PURE_PYTHON=1`` forces the
fallback, which is how the test-suite exercises both paths.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("VOLTERRA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"


def backends():
    """Mapping of every importable backend name to its module."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels as compiled
    except ImportError:
        return out
    out["cython"] = compiled
    return out


def horner(coeffs, z):
    z = np.asarray(z, dtype=np.complex128)
    flat = np.ascontiguousarray(z.ravel())
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    return np.asarray(_impl.horner(c, flat)).reshape(z.shape)


def weighted_absmax(coeffs, radii, weights, thetas):
    return _impl.weighted_absmax(
        np.ascontiguousarray(coeffs, dtype=np.complex128),
        np.ascontiguousarray(radii, dtype=float),
        np.ascontiguousarray(weights, dtype=float),
        np.ascontiguousarray(thetas, dtype=float),
    )


def cauchy_product(a, b, out_degree):
    return np.asarray(_impl.cauchy_product(
        np.ascontiguousarray(a, dtype=np.complex128),
        np.ascontiguousarray(b, dtype=np.complex128),
        int(out_degree),
    ))
