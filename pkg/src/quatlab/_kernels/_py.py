"""Pure-numpy reference implementations of the hot field kernels.

Quaternion fields are carried as pairs of complex arrays (z0, z1) with
q = z0 + z1 j; the anti-commutation j z = z* j turns every quaternion
product into four complex multiplies.  The compiled backend in ``_cy``
implements the same functions with fused loops; this module is the
fallback and the correctness reference.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def qmul(a0, a1, b0, b1):
    """Hamilton product (a0 + a1 j)(b0 + b1 j) in symplectic components."""
    return a0 * b0 - a1 * np.conj(b1), a0 * b1 + a1 * np.conj(b0)


def qmul_conj(a0, a1, b0, b1):
    """Product a * conj(b) in symplectic components."""
    return a0 * np.conj(b0) + a1 * np.conj(b1), a1 * b0 - a0 * b1


def gradient_axis(f, axis, h, periodic):
    """Second-order central difference along one axis.

    Periodic grids wrap; dirichlet-zero grids use zero ghost nodes.
    """
    if periodic:
        return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)
    out = np.zeros_like(f)
    lo = [slice(None)] * f.ndim
    hi = [slice(None)] * f.ndim
    mid = [slice(None)] * f.ndim
    lo[axis] = slice(0, -2)
    hi[axis] = slice(2, None)
    mid[axis] = slice(1, -1)
    out[tuple(mid)] = (f[tuple(hi)] - f[tuple(lo)]) / (2.0 * h)
    first = [slice(None)] * f.ndim
    first[axis] = 0
    second = [slice(None)] * f.ndim
    second[axis] = 1
    out[tuple(first)] = f[tuple(second)] / (2.0 * h)
    last = [slice(None)] * f.ndim
    last[axis] = -1
    penult = [slice(None)] * f.ndim
    penult[axis] = -2
    out[tuple(last)] = -f[tuple(penult)] / (2.0 * h)
    return out


def second_diff_axis(f, axis, h, periodic):
    """Compact 3-point second difference along one axis."""
    h2 = h * h
    if periodic:
        return (np.roll(f, -1, axis=axis) - 2.0 * f + np.roll(f, 1, axis=axis)) / h2
    up = np.zeros_like(f)
    dn = np.zeros_like(f)
    src = [slice(None)] * f.ndim
    dst = [slice(None)] * f.ndim
    src[axis] = slice(1, None)
    dst[axis] = slice(0, -1)
    up[tuple(dst)] = f[tuple(src)]
    src[axis] = slice(0, -1)
    dst[axis] = slice(1, None)
    dn[tuple(dst)] = f[tuple(src)]
    return (up - 2.0 * f + dn) / h2
