"""Sparse multivariate polynomials and interval boxes.

A :class:`MultiPoly` is an immutable map from exponent vectors to nonzero
coefficients, kept in graded-lex order so that two equal polynomials have
identical term lists. Points are plain 1-d float arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .unipoly import UniPoly

#: relative pad applied to every interval bound (no directed rounding)
INTERVAL_PAD = 1e-12


class DimensionError(ValueError):
    pass


def as_point(x, n: int | None = None) -> np.ndarray:
    p = np.asarray(x, dtype=float).reshape(-1)
    if n is not None and p.size != n:
        raise DimensionError(f"expected a point of dimension {n}, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    return p


def pad_interval(lo, hi):
    """Widen ``[lo, hi]`` by ``1e-12 * (1 + |bound|)`` on each side."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return lo - INTERVAL_PAD * (1.0 + np.abs(lo)), hi + INTERVAL_PAD * (1.0 + np.abs(hi))


@dataclass(frozen=True)
class IntervalVector:
    """Axis-aligned box ``[lo, hi]`` in R^n."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.array(self.lo, dtype=float).reshape(-1)
        hi = np.array(self.hi, dtype=float).reshape(-1)
        if lo.shape != hi.shape:
            raise DimensionError("lo and hi differ in length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite")
        if np.any(lo > hi):
            raise ValueError(f"empty box: lo={lo.tolist()} hi={hi.tolist()}")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def n(self) -> int:
        return self.lo.size

    @property
    def widths(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def contains_box(self, other: "IntervalVector", tol: float = 0.0) -> bool:
        return bool(np.all(other.lo >= self.lo - tol) and np.all(other.hi <= self.hi + tol))

    def intersect(self, other: "IntervalVector") -> "IntervalVector | None":
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if np.any(lo > hi):
            return None
        return IntervalVector(lo, hi)

    def hull(self, other: "IntervalVector") -> "IntervalVector":
        return IntervalVector(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(size, self.n))

    def __eq__(self, other):
        if not isinstance(other, IntervalVector):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __hash__(self):
        return hash((self.lo.tobytes(), self.hi.tobytes()))

    def __repr__(self):
        pairs = ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in zip(self.lo, self.hi))
        return f"IntervalVector({pairs})"


def _grlex_key(e: tuple[int, ...]):
    return (sum(e), e)


class MultiPoly:
    """Sparse polynomial in ``n`` variables.

    Construct from an iterable of ``(coefficient, exponents)`` pairs; repeated
    exponent vectors are merged and zero coefficients dropped.

    >>> g = MultiPoly(2, [(1.0, (2, 1)), (-3.0, (0, 0))])
    >>> g.degree
    3
    """

    __slots__ = ("n", "_terms", "_coeffs", "_exps")

    def __init__(self, n: int, terms: Iterable[tuple[float, Sequence[int]]] = ()):
        if n < 1:
            raise ValueError("a polynomial needs at least one variable")
        acc: dict[tuple[int, ...], float] = {}
        for c, e in terms:
            e = tuple(int(k) for k in e)
            if len(e) != n:
                raise DimensionError(f"exponent vector {e} has length {len(e)}, expected {n}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            c = float(c)
            if not np.isfinite(c):
                raise ValueError("non-finite coefficient")
            acc[e] = acc.get(e, 0.0) + c
        items = sorted(((e, c) for e, c in acc.items() if c != 0.0), key=lambda t: _grlex_key(t[0]))
        self.n = n
        self._terms = tuple((c, e) for e, c in items)
        self._coeffs = np.array([c for c, _ in self._terms], dtype=float)
        self._exps = np.array([e for _, e in self._terms], dtype=np.intp).reshape(-1, n)
        self._coeffs.flags.writeable = False
        self._exps.flags.writeable = False

    # construction helpers
    @classmethod
    def constant(cls, n: int, c: float) -> "MultiPoly":
        return cls(n, [(c, (0,) * n)])

    @classmethod
    def variable(cls, n: int, i: int) -> "MultiPoly":
        e = [0] * n
        e[i] = 1
        return cls(n, [(1.0, e)])

    @classmethod
    def from_quadratic(cls, Q, b, c: float) -> "MultiPoly":
        """Build ``x^T Q x + b^T x + c``."""
        Q = np.asarray(Q, dtype=float)
        b = np.asarray(b, dtype=float)
        n = b.size
        terms = [(c, (0,) * n)]
        for i in range(n):
            e = [0] * n
            e[i] = 1
            terms.append((b[i], tuple(e)))
            for j in range(n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                terms.append((Q[i, j], tuple(e)))
        return cls(n, terms)

    # basic properties
    @property
    def terms(self) -> tuple[tuple[float, tuple[int, ...]], ...]:
        return self._terms

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def exps(self) -> np.ndarray:
        return self._exps

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return int(self._exps.sum(axis=1).max())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def term_map(self) -> dict[tuple[int, ...], float]:
        return {e: c for c, e in self._terms}

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, self._terms))

    def __repr__(self):
        if not self._terms:
            return f"MultiPoly({self.n}, 0)"
        parts = []
        for c, e in self._terms:
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{c:+.6g}" + (f"*{mono}" if mono else ""))
        return f"MultiPoly({self.n}, {' '.join(parts)})"

    # arithmetic
    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = MultiPoly.constant(self.n, other)
        self._check_same(other)
        return MultiPoly(self.n, self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.n, [(-c, e) for c, e in self._terms])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return MultiPoly(self.n, [(c * other, e) for c, e in self._terms])
        self._check_same(other)
        out = []
        for c1, e1 in self._terms:
            for c2, e2 in other._terms:
                out.append((c1 * c2, tuple(a + b for a, b in zip(e1, e2))))
        return MultiPoly(self.n, out)

    __rmul__ = __mul__

    def _check_same(self, other):
        if not isinstance(other, MultiPoly):
            raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")
        if other.n != self.n:
            raise DimensionError(f"variable counts differ: {self.n} vs {other.n}")

    # evaluation
    def __call__(self, x) -> float:
        return self.eval(x)

    def eval(self, x) -> float:
        """Value at a single point."""
        x = as_point(x, self.n)
        total = 0.0
        for c, e in self._terms:
            v = c
            for xi, k in zip(x, e):
                if k:
                    v *= xi**k
            total += v
        return float(total)

    def eval_many(self, X) -> np.ndarray:
        """Values at each row of ``X`` (shape ``(m, n)``)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n:
            raise DimensionError(f"points have dimension {X.shape[1]}, expected {self.n}")
        return kernels.eval_points(self._coeffs, self._exps, X)

    def partial(self, i: int) -> "MultiPoly":
        out = []
        for c, e in self._terms:
            if e[i] == 0:
                continue
            d = list(e)
            d[i] -= 1
            out.append((c * e[i], d))
        return MultiPoly(self.n, out)

    def gradient(self) -> list["MultiPoly"]:
        return [self.partial(i) for i in range(self.n)]

    def interval_eval(self, box: IntervalVector) -> tuple[float, float]:
        """Enclosure of the range over ``box`` (natural extension, padded)."""
        if box.n != self.n:
            raise DimensionError(f"box has dimension {box.n}, expected {self.n}")
        lo, hi = self.interval_eval_boxes(box.lo[None, :], box.hi[None, :])
        return float(lo[0]), float(hi[0])

    def interval_eval_boxes(self, lo, hi) -> tuple[np.ndarray, np.ndarray]:
        """Padded enclosures over a stack of boxes ``lo``/``hi`` of shape ``(m, n)``."""
        rlo, rhi = kernels.interval_eval_boxes(self._coeffs, self._exps, lo, hi)
        return pad_interval(rlo, rhi)

    def restrict_to_segment(self, x, xbar) -> UniPoly:
        """Univariate ``p(lam) = self(x + lam * (xbar - x))``, expanded exactly."""
        x = as_point(x, self.n)
        d = as_point(xbar, self.n) - x
        deg = max(self.degree, 0)
        total = np.zeros(deg + 1)
        # binomial rows (x_i + lam d_i)^k, cached per (i, k)
        cache: dict[tuple[int, int], np.ndarray] = {}
        for c, e in self._terms:
            acc = np.array([c])
            for i, k in enumerate(e):
                if k == 0:
                    continue
                row = cache.get((i, k))
                if row is None:
                    row = np.array([comb(k, j) * x[i] ** (k - j) * d[i] ** j for j in range(k + 1)])
                    cache[(i, k)] = row
                acc = np.convolve(acc, row)
            total[: acc.size] += acc
        return UniPoly(total).trim(1e-14)

    def quadratic_form(self) -> tuple[np.ndarray, np.ndarray, float]:
        """Split a degree <= 2 polynomial as ``x^T Q x + b^T x + c`` with ``Q`` symmetric."""
        if self.degree > 2:
            raise ValueError(f"polynomial has degree {self.degree}; a quadratic form needs degree <= 2")
        n = self.n
        Q = np.zeros((n, n))
        b = np.zeros(n)
        c = 0.0
        for coef, e in self._terms:
            idx = [i for i, k in enumerate(e) for _ in range(k)]
            if not idx:
                c += coef
            elif len(idx) == 1:
                b[idx[0]] += coef
            elif idx[0] == idx[1]:
                Q[idx[0], idx[0]] += coef
            else:
                Q[idx[0], idx[1]] += coef / 2.0
                Q[idx[1], idx[0]] += coef / 2.0
        return Q, b, c

    # serialization
    def to_json(self) -> list[dict]:
        return [{"c": c, "e": list(e)} for c, e in self._terms]

    @classmethod
    def from_json(cls, data: Sequence[dict], n: int | None = None) -> "MultiPoly":
        terms = [(m["c"], m["e"]) for m in data]
        if n is None:
            if not terms:
                raise ValueError("cannot infer the variable count of an empty polynomial")
            n = len(terms[0][1])
        return cls(n, terms)


def dot_gradient(g: MultiPoly, direction: Sequence[MultiPoly]) -> MultiPoly:
    """``sum_i dg/dx_i * direction[i]`` as a polynomial."""
    out = MultiPoly(g.n)
    for gi, di in zip(g.gradient(), direction):
        out = out + gi * di
    return out
