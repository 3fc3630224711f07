# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled field kernels: fused quaternion products and 3-point stencils.

Mirrors the reference implementations in ``_py``; any axis of a
C-contiguous array is handled by viewing it as (outer, n, inner).
"""

import numpy as np

cimport numpy as cnp

BACKEND = "cython"

ctypedef double complex cplx


def qmul(a0, a1, b0, b1):
    out0 = np.empty_like(a0)
    out1 = np.empty_like(a0)
    _qmul_flat(a0.reshape(-1), a1.reshape(-1), b0.reshape(-1), b1.reshape(-1),
               out0.reshape(-1), out1.reshape(-1))
    return out0, out1


def qmul_conj(a0, a1, b0, b1):
    out0 = np.empty_like(a0)
    out1 = np.empty_like(a0)
    _qmul_conj_flat(a0.reshape(-1), a1.reshape(-1), b0.reshape(-1), b1.reshape(-1),
                    out0.reshape(-1), out1.reshape(-1))
    return out0, out1


cdef void _qmul_flat(const cplx[::1] a0, const cplx[::1] a1,
                     const cplx[::1] b0, const cplx[::1] b1,
                     cplx[::1] o0, cplx[::1] o1) noexcept nogil:
    cdef Py_ssize_t i, n = a0.shape[0]
    for i in range(n):
        o0[i] = a0[i] * b0[i] - a1[i] * b1[i].conjugate()
        o1[i] = a0[i] * b1[i] + a1[i] * b0[i].conjugate()


cdef void _qmul_conj_flat(const cplx[::1] a0, const cplx[::1] a1,
                          const cplx[::1] b0, const cplx[::1] b1,
                          cplx[::1] o0, cplx[::1] o1) noexcept nogil:
    cdef Py_ssize_t i, n = a0.shape[0]
    for i in range(n):
        o0[i] = a0[i] * b0[i].conjugate() + a1[i] * b1[i].conjugate()
        o1[i] = a1[i] * b0[i] - a0[i] * b1[i]


cdef inline (Py_ssize_t, Py_ssize_t, Py_ssize_t) _split(tuple shape, int axis):
    cdef Py_ssize_t outer = 1, inner = 1, i
    for i in range(axis):
        outer *= shape[i]
    for i in range(axis + 1, len(shape)):
        inner *= shape[i]
    return outer, shape[axis], inner


def gradient_axis(f, int axis, double h, bint periodic):
    cdef Py_ssize_t outer, n, inner
    outer, n, inner = _split(f.shape, axis)
    out = np.empty_like(f)
    _grad(f.reshape(outer, n, inner), out.reshape(outer, n, inner), h, periodic)
    return out


def second_diff_axis(f, int axis, double h, bint periodic):
    cdef Py_ssize_t outer, n, inner
    outer, n, inner = _split(f.shape, axis)
    out = np.empty_like(f)
    _diff2(f.reshape(outer, n, inner), out.reshape(outer, n, inner), h, periodic)
    return out


cdef void _grad(const cplx[:, :, ::1] f, cplx[:, :, ::1] out,
                double h, bint periodic) noexcept nogil:
    cdef Py_ssize_t o, i, k, up, dn
    cdef Py_ssize_t no = f.shape[0], n = f.shape[1], ni = f.shape[2]
    cdef double s = 1.0 / (2.0 * h)
    cdef cplx lo, hi
    for o in range(no):
        for i in range(n):
            up = i + 1
            dn = i - 1
            if periodic:
                if up == n:
                    up = 0
                if dn < 0:
                    dn = n - 1
            for k in range(ni):
                hi = f[o, up, k] if up < n else 0
                lo = f[o, dn, k] if dn >= 0 else 0
                out[o, i, k] = (hi - lo) * s


cdef void _diff2(const cplx[:, :, ::1] f, cplx[:, :, ::1] out,
                 double h, bint periodic) noexcept nogil:
    cdef Py_ssize_t o, i, k, up, dn
    cdef Py_ssize_t no = f.shape[0], n = f.shape[1], ni = f.shape[2]
    cdef double s = 1.0 / (h * h)
    cdef cplx lo, hi
    for o in range(no):
        for i in range(n):
            up = i + 1
            dn = i - 1
            if periodic:
                if up == n:
                    up = 0
                if dn < 0:
                    dn = n - 1
            for k in range(ni):
                hi = f[o, up, k] if up < n else 0
                lo = f[o, dn, k] if dn >= 0 else 0
                out[o, i, k] = (hi - 2.0 * f[o, i, k] + lo) * s
