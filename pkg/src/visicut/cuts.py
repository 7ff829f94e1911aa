"""Affine underestimators by term-wise McCormick rules, and the cuts they give.

Each monomial of degree <= 3 gets a set of candidate affine under- (or, for
negative coefficients, over-) estimators over the box; the candidate with
the largest value at ``xbar`` is kept, ties going to the lexicographically
smallest coefficient vector. Since the sum ``L`` is affine it is its own
gradient cut: ``L(x) <= 0`` for all of ``S`` whenever ``L`` underestimates
``g`` on a box containing the relevant part of ``S``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .polycore import IntervalVector, MultiPoly, as_point
from .visibility import ProblemInstance

NO_CUT_TOL = 1e-9
VALID_TOL = 1e-7
MIN_FEASIBLE = 10
TIE_TOL = 1e-12


class UnsupportedTermError(ValueError):
    pass


@dataclass(frozen=True)
class AffineFunction:
    """``a @ x + b``."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(a)) and np.isfinite(self.b)):
            raise ValueError("affine function must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.a + self.b

    def __add__(self, other: "AffineFunction") -> "AffineFunction":
        return AffineFunction(self.a + other.a, self.b + other.b)

    def scaled(self, s: float) -> "AffineFunction":
        return AffineFunction(s * self.a, s * self.b)

    def key(self) -> tuple:
        return tuple(self.a) + (self.b,)


def _zero(n):
    return AffineFunction(np.zeros(n), 0.0)


def _lin(n, coefs: dict[int, float], b: float) -> AffineFunction:
    a = np.zeros(n)
    for i, v in coefs.items():
        a[i] += v
    return AffineFunction(a, b)


def _bilinear(n, i, j, li, ui, lj, uj, under: bool) -> list[AffineFunction]:
    """McCormick facets of ``x_i x_j`` (under- or overestimators)."""
    if under:
        return [
            _lin(n, {i: lj, j: li}, -li * lj),
            _lin(n, {i: uj, j: ui}, -ui * uj),
        ]
    return [
        _lin(n, {i: uj, j: li}, -li * uj),
        _lin(n, {i: lj, j: ui}, -ui * lj),
    ]


def _square(n, i, l, u, under: bool) -> list[AffineFunction]:
    """Tangents at both endpoints (under) or the secant (over) of ``x_i^2``."""
    if under:
        return [_lin(n, {i: 2.0 * t}, -t * t) for t in (l, u)]
    return [_lin(n, {i: l + u}, -l * u)]


def _degree2(n, idx: list[int], box: IntervalVector, under: bool) -> list[AffineFunction]:
    i, j = idx
    if i == j:
        return _square(n, i, box.lo[i], box.hi[i], under)
    return _bilinear(n, i, j, box.lo[i], box.hi[i], box.lo[j], box.hi[j], under)


def _pick(cands: list[AffineFunction], xbar: np.ndarray) -> AffineFunction:
    vals = np.array([c(xbar) for c in cands])
    best = float(np.max(vals))
    tol = TIE_TOL * (1.0 + abs(best))
    top = [c for c, v in zip(cands, vals) if v >= best - tol]
    return min(top, key=AffineFunction.key)


def _term_candidates(n, coef: float, e: tuple[int, ...], box: IntervalVector):
    """Affine underestimators of ``coef * x^e`` over ``box``."""
    idx = [i for i, k in enumerate(e) for _ in range(k)]
    deg = len(idx)
    if deg == 0:
        return [AffineFunction(np.zeros(n), coef)]
    if deg == 1:
        return [_lin(n, {idx[0]: coef}, 0.0)]
    if deg == 2:
        return [f.scaled(coef) for f in _degree2(n, idx, box, under=coef > 0)]
    if deg == 3:
        out = []
        # every split of the monomial as (degree-2 part w) * x_k
        for k in sorted(set(idx)):
            rest = list(idx)
            rest.remove(k)
            w_poly = MultiPoly(n, [(1.0, [rest.count(i) for i in range(n)])])
            wl, wu = w_poly.interval_eval(box)
            lk, uk = box.lo[k], box.hi[k]
            # estimators of coef * w * x_k with w treated as a variable:
            # each is coef * (p * w + q * x_k + r)
            if coef > 0:
                outer = [(lk, wl, -wl * lk), (uk, wu, -wu * uk)]
            else:
                outer = [(uk, wl, -wl * uk), (lk, wu, -wu * lk)]
            for p, q, r in outer:
                pw = coef * p  # coefficient of w in the estimator of coef * w * x_k
                base = _lin(n, {k: coef * q}, coef * r)
                if pw == 0.0:
                    out.append(base)
                    continue
                for wf in _degree2(n, rest, box, under=pw > 0):
                    out.append(base + wf.scaled(pw))
        return out
    raise UnsupportedTermError(
        f"monomial {coef:+g}*x^{list(e)} has degree {deg}; only degree <= 3 is supported"
    )


def mccormick_under(g: MultiPoly, box: IntervalVector, xbar) -> AffineFunction:
    """Affine ``L <= g`` on ``box``, built term by term."""
    n = g.n
    xbar = as_point(xbar, n)
    if box.n != n:
        raise ValueError(f"box has dimension {box.n}, expected {n}")
    bad = [(c, e) for c, e in g.terms if sum(e) > 3]
    if bad:
        c, e = bad[0]
        raise UnsupportedTermError(
            f"monomial {c:+g}*x^{list(e)} has degree {sum(e)}; only degree <= 3 is supported"
        )
    total = _zero(n)
    for c, e in g.terms:
        total = total + _pick(_term_candidates(n, c, e, box), xbar)
    return total


@dataclass(frozen=True)
class Cut:
    """``alpha @ (x - xbar) >= rhs``."""

    alpha: np.ndarray
    rhs: float
    xbar: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float).reshape(-1)
        xbar = np.array(self.xbar, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(alpha)) and np.isfinite(self.rhs)):
            raise ValueError("cut must be finite")
        if not np.any(alpha):
            raise ValueError("cut normal must be nonzero")
        alpha.flags.writeable = False
        xbar.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "xbar", xbar)
        object.__setattr__(self, "rhs", float(self.rhs))

    def lhs(self, X) -> np.ndarray:
        return (np.atleast_2d(np.asarray(X, dtype=float)) - self.xbar) @ self.alpha

    def slack(self, X) -> np.ndarray:
        return self.lhs(X) - self.rhs

    def flipped(self) -> "Cut":
        return Cut(-self.alpha, self.rhs, self.xbar)

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha.tolist(),
            "rhs": self.rhs,
            "frame": "xbar-centered",
            "xbar": self.xbar.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Cut":
        if data.get("frame", "xbar-centered") != "xbar-centered":
            raise ValueError(f"unknown cut frame {data.get('frame')!r}")
        return cls(data["alpha"], data["rhs"], data["xbar"])


def cut_from_affine(L: AffineFunction, xbar) -> Cut | None:
    """Rewrite ``L(x) <= 0`` as ``alpha @ (x - xbar) >= 1``, if ``L(xbar) > 0``."""
    xbar = as_point(xbar, L.a.size)
    v = float(L(xbar))
    if v <= NO_CUT_TOL or not np.any(L.a):
        return None
    return Cut(-L.a / v, 1.0, xbar)


def gradient_cut(g: MultiPoly, D: IntervalVector, xbar) -> Cut | None:
    """Cut from the McCormick underestimator over ``D``; None if it misses ``xbar``."""
    return cut_from_affine(mccormick_under(g, D, xbar), xbar)


@dataclass(frozen=True)
class CutReport:
    status: str  # "valid", "violated" or "inconclusive"
    max_violation: float
    feasible_samples: int
    worst_point: np.ndarray | None = None


def sample_feasible(inst: ProblemInstance, samples: int, seed: int) -> np.ndarray:
    """Uniform box samples that satisfy ``g <= 0`` and the linear constraints."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    X = inst.C.box.sample(rng, samples)
    keep = inst.C.feasible_mask(X) & (inst.g.eval_many(X) <= 0.0)
    return X[keep]


def validate_cut(cut: Cut, inst: ProblemInstance, samples: int = 10_000, seed: int = 0) -> CutReport:
    X = sample_feasible(inst, samples, seed)
    if len(X) < MIN_FEASIBLE:
        return CutReport("inconclusive", 0.0, len(X))
    viol = -cut.slack(X)
    k = int(np.argmax(viol))
    worst = max(float(viol[k]), 0.0)
    status = "valid" if worst <= VALID_TOL else "violated"
    return CutReport(status, worst, len(X), X[k] if worst > 0 else None)


C1_DOMINATES = "c1_dominates"
C2_DOMINATES = "c2_dominates"
INCOMPARABLE = "incomparable"


def compare_cuts(c1: Cut, c2: Cut, box: IntervalVector, samples: int = 1000,
                 seed: int = 0, tol: float = 1e-12) -> str:
    """Which cut cuts off more of ``box`` (weakly)?

    ``c1`` dominates when its slack is pointwise no larger than ``c2``'s on
    the box: every point ``c2`` cuts off is cut off by ``c1`` too. The slack
    difference is affine, so its range over the box is exact; sampling only
    confirms the verdict.
    """
    if not np.allclose(c1.xbar, c2.xbar):
        raise ValueError("cuts must share the frame")
    da = c1.alpha - c2.alpha
    d0 = -(da @ c1.xbar) - (c1.rhs - c2.rhs)
    hi = float(np.sum(np.maximum(da * box.lo, da * box.hi)) + d0)
    lo = float(np.sum(np.minimum(da * box.lo, da * box.hi)) + d0)
    scale = tol * (1.0 + np.abs(da) @ np.maximum(np.abs(box.lo), np.abs(box.hi)) + abs(d0))
    if hi <= scale:
        verdict = C1_DOMINATES
    elif lo >= -scale:
        verdict = C2_DOMINATES
    else:
        verdict = INCOMPARABLE
    if samples > 0 and verdict != INCOMPARABLE:
        X = box.sample(np.random.default_rng(seed), samples)
        diff = c1.slack(X) - c2.slack(X)
        sign = 1.0 if verdict == C1_DOMINATES else -1.0
        if np.max(sign * diff) > 1e3 * scale + 1e-12:
            raise ArithmeticError("sampling contradicts the interval verdict")
    return verdict


def cut_as_inequality(cut: Cut) -> tuple[np.ndarray, float]:
    """``(a, r)`` with the cut written as ``a @ x >= r`` in original coordinates."""
    return cut.alpha.copy(), float(cut.rhs + cut.alpha @ cut.xbar)
