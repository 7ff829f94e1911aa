"""Backend selection for the hot polynomial kernels.

The compiled extension is used when it imports cleanly; setting the
environment variable ``VISICUT_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

import numpy as np

from . import _kernels_py

_compiled = None
if os.environ.get("VISICUT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"
_impl = _compiled if _compiled is not None else _kernels_py


def available_backends():
    names = ["numpy"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return _impl
    if name == "numpy":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def _prep(coeffs, exps):
    return (np.ascontiguousarray(coeffs, dtype=np.float64),
            np.ascontiguousarray(exps, dtype=np.intp))


def interval_eval_boxes(coeffs, exps, lo, hi, backend=None):
    c, e = _prep(coeffs, exps)
    lo = np.ascontiguousarray(lo, dtype=np.float64)
    hi = np.ascontiguousarray(hi, dtype=np.float64)
    if c.size == 0:
        return np.zeros(lo.shape[0]), np.zeros(lo.shape[0])
    return get_backend(backend).interval_eval_boxes(c, e, lo, hi)


def eval_points(coeffs, exps, X, backend=None):
    c, e = _prep(coeffs, exps)
    X = np.ascontiguousarray(X, dtype=np.float64)
    if c.size == 0:
        return np.zeros(X.shape[0])
    return get_backend(backend).eval_points(c, e, X)
