# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for batched polynomial evaluation.

Polynomials arrive as a coefficient vector ``coeffs`` (T,) and an exponent
matrix ``exps`` (T, n). Both functions mirror ``_kernels_py`` exactly.
"""
import numpy as np

from libc.math cimport fabs


cdef inline void _ipow(double lo, double hi, Py_ssize_t k, double* out_lo, double* out_hi) noexcept nogil:
    cdef double a = 1.0, b = 1.0
    cdef Py_ssize_t j
    for j in range(k):
        a *= lo
        b *= hi
    if k % 2 == 1 or lo >= 0.0:
        out_lo[0] = a
        out_hi[0] = b
    elif hi <= 0.0:
        out_lo[0] = b
        out_hi[0] = a
    else:
        out_lo[0] = 0.0
        out_hi[0] = a if a > b else b


cdef inline void _imul(double al, double ah, double bl, double bh, double* lo, double* hi) noexcept nogil:
    cdef double p1 = al * bl, p2 = al * bh, p3 = ah * bl, p4 = ah * bh
    cdef double mn = p1, mx = p1
    if p2 < mn: mn = p2
    if p3 < mn: mn = p3
    if p4 < mn: mn = p4
    if p2 > mx: mx = p2
    if p3 > mx: mx = p3
    if p4 > mx: mx = p4
    lo[0] = mn
    hi[0] = mx


def interval_eval_boxes(const double[::1] coeffs, const Py_ssize_t[:, ::1] exps,
                        const double[:, ::1] lo, const double[:, ::1] hi):
    """Natural interval extension of a polynomial over each of ``m`` boxes."""
    cdef Py_ssize_t m = lo.shape[0], n = lo.shape[1], T = coeffs.shape[0]
    out_lo_arr = np.zeros(m)
    out_hi_arr = np.zeros(m)
    cdef double[::1] out_lo = out_lo_arr
    cdef double[::1] out_hi = out_hi_arr
    cdef Py_ssize_t b, t, i, e
    cdef double s_lo, s_hi, tl, th, pl, ph, c
    with nogil:
        for b in range(m):
            s_lo = 0.0
            s_hi = 0.0
            for t in range(T):
                tl = 1.0
                th = 1.0
                for i in range(n):
                    e = exps[t, i]
                    if e == 0:
                        continue
                    _ipow(lo[b, i], hi[b, i], e, &pl, &ph)
                    _imul(tl, th, pl, ph, &tl, &th)
                c = coeffs[t]
                if c >= 0.0:
                    s_lo += c * tl
                    s_hi += c * th
                else:
                    s_lo += c * th
                    s_hi += c * tl
            out_lo[b] = s_lo
            out_hi[b] = s_hi
    return out_lo_arr, out_hi_arr


def eval_points(const double[::1] coeffs, const Py_ssize_t[:, ::1] exps, const double[:, ::1] X):
    """Evaluate a polynomial at each row of ``X``."""
    cdef Py_ssize_t k = X.shape[0], n = X.shape[1], T = coeffs.shape[0]
    out_arr = np.zeros(k)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, t, i, j, e
    cdef double s, v, x
    with nogil:
        for r in range(k):
            s = 0.0
            for t in range(T):
                v = coeffs[t]
                for i in range(n):
                    e = exps[t, i]
                    x = X[r, i]
                    for j in range(e):
                        v *= x
                s += v
            out[r] = s
    return out_arr
