"""Numpy fallback for the compiled kernels in ``_kernels.pyx``.

Vectorised over boxes / points; loops over terms and variables only.
"""
import numpy as np


def _ipow(lo, hi, k):
    a = lo**k
    b = hi**k
    if k % 2 == 1:
        return a, b
    plo = np.where(lo >= 0.0, a, np.where(hi <= 0.0, b, 0.0))
    phi = np.where(lo >= 0.0, b, np.where(hi <= 0.0, a, np.maximum(a, b)))
    return plo, phi


def _imul(al, ah, bl, bh):
    p = np.stack([al * bl, al * bh, ah * bl, ah * bh])
    return p.min(axis=0), p.max(axis=0)


def interval_eval_boxes(coeffs, exps, lo, hi):
    m, n = lo.shape
    s_lo = np.zeros(m)
    s_hi = np.zeros(m)
    for c, e in zip(coeffs, exps):
        tl = np.ones(m)
        th = np.ones(m)
        for i in range(n):
            if e[i] == 0:
                continue
            pl, ph = _ipow(lo[:, i], hi[:, i], int(e[i]))
            tl, th = _imul(tl, th, pl, ph)
        if c >= 0.0:
            s_lo += c * tl
            s_hi += c * th
        else:
            s_lo += c * th
            s_hi += c * tl
    return s_lo, s_hi


def eval_points(coeffs, exps, X):
    out = np.zeros(X.shape[0])
    for c, e in zip(coeffs, exps):
        v = np.full(X.shape[0], c)
        for i in range(X.shape[1]):
            if e[i]:
                v = v * X[:, i] ** int(e[i])
        out += v
    return out
