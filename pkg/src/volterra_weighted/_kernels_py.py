"""Pure numpy fallback for the compiled kernels in ``_kernels.pyx``."""

import numpy as np

# points per block in weighted_absmax, keeps the temporary grid small
_BLOCK = 1 << 15


def horner(coeffs, z):
    """Evaluate sum(coeffs[k] * z**k) at every point of ``z``."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if coeffs.size == 0:
        return np.zeros(z.shape, dtype=np.complex128)
    acc = np.full(z.shape, coeffs[-1], dtype=np.complex128)
    for c in coeffs[-2::-1]:
        acc *= z
        acc += c
    return acc


def weighted_absmax(coeffs, radii, weights, thetas):
    """Return (max, i_r, i_theta) of weights[i] * |p(radii[i] e^{i thetas[j]})|."""
    radii = np.asarray(radii, dtype=float)
    weights = np.asarray(weights, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    if len(coeffs) == 0:
        return 0.0, 0, 0
    unit = np.cos(thetas) + 1j * np.sin(thetas)
    rows = max(1, _BLOCK // max(1, thetas.size))
    best, bi, bj = -1.0, 0, 0
    for start in range(0, radii.size, rows):
        r = radii[start:start + rows]
        z = (r[:, None] * unit.real[None, :]) + 1j * (r[:, None] * unit.imag[None, :])
        vals = weights[start:start + rows, None] * np.abs(horner(coeffs, z))
        flat = int(np.argmax(vals))
        i, j = divmod(flat, thetas.size)
        if vals[i, j] > best:
            best, bi, bj = float(vals[i, j]), start + i, j
    return best, bi, bj


def cauchy_product(a, b, out_degree):
    """Truncated convolution c_k = sum_{i+j=k} a_i b_j for k <= out_degree."""
    full = np.convolve(np.asarray(a, dtype=np.complex128),
                       np.asarray(b, dtype=np.complex128))
    out = np.zeros(out_degree + 1, dtype=np.complex128)
    m = min(out.size, full.size)
    out[:m] = full[:m]
    return out
