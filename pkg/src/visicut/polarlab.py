"""Reverse polars of finite point sets, decided exactly by linear programming.

For a finite set ``S`` and a viewpoint ``xbar`` the reverse polar is the
polyhedron ``{alpha : alpha @ (x - xbar) >= 1 for x in S}``. Everything here
works in the frame centred at ``xbar``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linprog import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, NumericalBreakdown, solve

DISTINCT_TOL = 1e-9
COLLINEAR_TOL = 1e-9
IMPLY_TOL = 1e-7
HULL_TOL = 1e-8

_FREE = (-np.inf, np.inf)


class PointSetError(ValueError):
    pass


class HypothesisError(ValueError):
    """A theorem hypothesis (such as ``0 not in conv S``) fails for this input."""


@dataclass(frozen=True)
class FinitePointSet:
    points: np.ndarray  # shape (m, n)
    xbar: np.ndarray

    def __post_init__(self):
        xbar = np.array(self.xbar, dtype=float).reshape(-1)
        pts = np.array(self.points, dtype=float).reshape(-1, xbar.size)
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(xbar))):
            raise PointSetError("points must be finite")
        for i in range(len(pts)):
            d = np.linalg.norm(pts[i + 1 :] - pts[i], axis=1)
            if np.any(d <= DISTINCT_TOL):
                j = i + 1 + int(np.argmin(d))
                raise PointSetError(f"points {i} and {j} coincide")
        pts.flags.writeable = False
        xbar.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "xbar", xbar)

    @classmethod
    def at_origin(cls, points, n: int | None = None) -> "FinitePointSet":
        pts = np.asarray(points, dtype=float)
        if n is None:
            n = pts.shape[1] if pts.ndim == 2 and pts.size else 2
        return cls(pts.reshape(-1, n), np.zeros(n))

    @property
    def n(self) -> int:
        return self.xbar.size

    def __len__(self):
        return len(self.points)

    @property
    def centered(self) -> np.ndarray:
        return self.points - self.xbar

    def subset(self, mask) -> "FinitePointSet":
        return FinitePointSet(self.points[np.asarray(mask, dtype=bool)], self.xbar)

    def union(self, other: "FinitePointSet") -> "FinitePointSet":
        _same_frame(self, other)
        pts = list(self.points)
        for q in other.points:
            if not any(np.linalg.norm(q - p) <= DISTINCT_TOL for p in pts):
                pts.append(q)
        return FinitePointSet(np.array(pts).reshape(-1, self.n), self.xbar)

    def as_set(self) -> set[tuple[float, ...]]:
        return {tuple(p) for p in self.points}


@dataclass(frozen=True)
class PolarPolyhedron:
    """``{alpha : rows @ alpha >= 1}``; no rows means all of space."""

    rows: np.ndarray  # shape (m, n)

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def contains(self, alpha, tol: float = 1e-9) -> bool:
        return bool(np.all(self.rows @ np.asarray(alpha, dtype=float) >= 1.0 - tol))

    def _constraints(self):
        return [(r, ">=", 1.0) for r in self.rows]


def _same_frame(a: FinitePointSet, b: FinitePointSet):
    if a.n != b.n or not np.allclose(a.xbar, b.xbar, atol=1e-12):
        raise PointSetError("point sets must share the viewpoint")


def reverse_polar(ps: FinitePointSet) -> PolarPolyhedron:
    return PolarPolyhedron(ps.centered.reshape(-1, ps.n))


def separate(ps: FinitePointSet) -> np.ndarray | None:
    """A point of the reverse polar (a separating normal), or None when empty."""
    poly = reverse_polar(ps)
    if len(poly.rows) == 0:
        return np.zeros(ps.n)
    res = solve(LinearProgram(np.zeros(ps.n), poly._constraints(), [_FREE] * ps.n))
    if res.status == INFEASIBLE:
        return None
    if res.status != OPTIMAL:
        raise NumericalBreakdown(f"unexpected status {res.status}")
    return res.x


def origin_in_hull(ps: FinitePointSet) -> bool:
    """Decide ``xbar in conv(points)`` with a convex-combination LP."""
    m = len(ps)
    if m == 0:
        return False
    P = ps.centered
    cons = [(P[:, i], "=", 0.0) for i in range(ps.n)]
    cons.append((np.ones(m), "=", 1.0))
    return solve(LinearProgram(np.zeros(m), cons)).status == OPTIMAL


def polar_empty(ps: FinitePointSet) -> bool:
    """True iff the reverse polar is empty; both LP characterizations must agree."""
    empty = separate(ps) is None
    if empty != origin_in_hull(ps):
        raise NumericalBreakdown("polar emptiness and hull membership disagree")
    return empty


def min_scale_in_hull(ps: FinitePointSet, x) -> float | None:
    """``min{mu >= 0 : xbar + mu (x - xbar) in conv(points)}``, or None."""
    d = np.asarray(x, dtype=float) - ps.xbar
    if np.linalg.norm(d) == 0.0:
        raise ValueError("x must differ from xbar")
    m = len(ps)
    if m == 0:
        return None
    P = ps.centered
    # variables (mu, w_1..w_m): mu d = sum w_j p_j, sum w = 1
    cons = [(np.concatenate(([d[i]], -P[:, i])), "=", 0.0) for i in range(ps.n)]
    cons.append((np.concatenate(([0.0], np.ones(m))), "=", 1.0))
    obj = np.zeros(m + 1)
    obj[0] = 1.0
    res = solve(LinearProgram(obj, cons))
    if res.status == INFEASIBLE:
        return None
    if res.status != OPTIMAL:
        raise NumericalBreakdown(f"unexpected status {res.status}")
    return float(res.x[0])


def radial_visible_subset(ps: FinitePointSet) -> FinitePointSet:
    """Drop every point hidden behind another point on its ray from ``xbar``."""
    P = ps.centered
    norms = np.linalg.norm(P, axis=1)
    if np.any(norms <= DISTINCT_TOL):
        raise PointSetError("xbar is one of the points")
    keep = np.ones(len(P), dtype=bool)
    for i in range(len(P)):
        for j in range(len(P)):
            if i == j or norms[j] >= norms[i]:
                continue
            # p_j = t p_i with 0 < t < 1
            t = float(P[j] @ P[i]) / norms[i] ** 2
            if 0.0 < t < 1.0 and np.linalg.norm(P[j] - t * P[i]) <= COLLINEAR_TOL * norms[i]:
                keep[i] = False
                break
    return ps.subset(keep)


def hull_visible_subset(ps: FinitePointSet) -> FinitePointSet:
    """Points of ``S`` that are visible from ``xbar`` within ``conv S``."""
    if polar_empty(ps):
        raise HypothesisError("xbar lies in the convex hull of the points")
    keep = []
    for p in ps.points:
        mu = min_scale_in_hull(ps, p)
        keep.append(mu is not None and mu >= 1.0 - HULL_TOL)
    return ps.subset(keep)


def hull_vertices(ps: FinitePointSet) -> FinitePointSet:
    """Points not in the convex hull of the others."""
    m = len(ps)
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        others = np.delete(ps.points, i, axis=0)
        if len(others) == 0:
            continue
        cons = [(others[:, k], "=", ps.points[i, k]) for k in range(ps.n)]
        cons.append((np.ones(len(others)), "=", 1.0))
        if solve(LinearProgram(np.zeros(len(others)), cons)).status == OPTIMAL:
            keep[i] = False
    return ps.subset(keep)


def shadow_sample(ps: FinitePointSet, scales: Sequence[float]) -> FinitePointSet:
    scales = [float(s) for s in scales]
    if any(s < 1.0 for s in scales):
        raise ValueError("shadow scales must be >= 1")
    uniq: list[np.ndarray] = []
    for s in scales:
        for p in ps.points:
            q = ps.xbar + s * (p - ps.xbar)
            if not any(np.linalg.norm(q - u) <= DISTINCT_TOL for u in uniq):
                uniq.append(q)
    return FinitePointSet(np.array(uniq).reshape(-1, ps.n), ps.xbar)


def implied_row(poly: PolarPolyhedron, row) -> bool:
    """Does ``row @ alpha >= 1`` hold on all of ``poly``?  (``poly`` nonempty.)"""
    n = len(row)
    res = solve(LinearProgram(np.asarray(row, dtype=float), poly._constraints(), [_FREE] * n))
    if res.status == UNBOUNDED:
        return False
    if res.status == INFEASIBLE:
        return True
    return res.objective >= 1.0 - IMPLY_TOL


def first_unimplied_row(source: FinitePointSet, target: FinitePointSet) -> np.ndarray | None:
    """First row of ``target``'s polar not implied by ``source``'s polar."""
    poly = reverse_polar(source)
    for r in reverse_polar(target).rows:
        # a row already present in the source is implied without an LP
        if len(poly.rows) and np.min(np.max(np.abs(poly.rows - r), axis=1)) <= 1e-12:
            continue
        if not implied_row(poly, r):
            return r
    return None


def polar_contained(a: FinitePointSet, b: FinitePointSet) -> bool:
    """Is the reverse polar of ``a`` contained in that of ``b``?"""
    _same_frame(a, b)
    if polar_empty(a):
        return True
    if polar_empty(b):
        return False
    return first_unimplied_row(a, b) is None


def generator_equal(a: FinitePointSet, b: FinitePointSet) -> bool:
    """True iff the two sets have the same reverse polar."""
    _same_frame(a, b)
    ea, eb = polar_empty(a), polar_empty(b)
    if ea or eb:
        return ea and eb
    return first_unimplied_row(a, b) is None and first_unimplied_row(b, a) is None


def random_point_set(
    rng: np.random.Generator,
    n: int,
    m: int,
    spread: float = 3.0,
    hidden: float = 0.3,
) -> FinitePointSet:
    """Random points around an offset centre, some placed behind others.

    A fraction ``hidden`` of the points are scaled copies of earlier ones,
    which makes the radial and hull filters nontrivial. No point comes within
    1e-6 of the origin.
    """
    centre = rng.normal(size=n)
    centre *= rng.uniform(0.0, 2.0) / max(np.linalg.norm(centre), 1e-12)
    pts: list[np.ndarray] = []
    while len(pts) < m:
        if pts and rng.random() < hidden:
            q = pts[rng.integers(len(pts))] * rng.uniform(1.1, 3.0)
        else:
            q = centre + rng.uniform(-spread / 2, spread / 2, size=n)
        if np.linalg.norm(q) < 1e-6:
            continue
        if any(np.linalg.norm(q - p) <= 1e-6 for p in pts):
            continue
        pts.append(q)
    return FinitePointSet(np.array(pts), np.zeros(n))


CHECKS = ("visible", "shadow", "smallest-inter", "smallest-closed")


def generator_candidate(check: str, ps: FinitePointSet, rng: np.random.Generator | None = None) -> FinitePointSet:
    """The set each generator statement claims has the same reverse polar as ``ps``."""
    if check == "visible":
        return radial_visible_subset(ps)
    if check == "shadow":
        rng = rng if rng is not None else np.random.default_rng(0)
        return ps.union(shadow_sample(ps, rng.uniform(1.0, 5.0, size=2)))
    if check == "smallest-inter":
        return hull_visible_subset(ps)
    if check == "smallest-closed":
        hv = hull_visible_subset(ps)
        vert = hull_vertices(ps).as_set()
        return hv.subset([tuple(p) in vert for p in hv.points])
    raise ValueError(f"unknown check {check!r}; expected one of {CHECKS}")


def mutate_candidate(ps: FinitePointSet, cand: FinitePointSet) -> FinitePointSet:
    """A corrupted candidate that is guaranteed to change the reverse polar."""
    if polar_empty(ps):
        return FinitePointSet(ps.points[:1], ps.xbar)
    for p in cand.points:
        mutated = cand.union(FinitePointSet((ps.xbar + 0.5 * (p - ps.xbar))[None, :], ps.xbar))
        if first_unimplied_row(ps, mutated) is not None:
            return mutated
    return cand


@dataclass(frozen=True)
class LabOutcome:
    passed: bool
    polar_empty_set: bool
    polar_empty_candidate: bool
    set_size: int
    candidate_size: int
    counterexample_row: np.ndarray | None = None
    counterexample_side: str | None = None

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "polar_empty_set": self.polar_empty_set,
            "polar_empty_candidate": self.polar_empty_candidate,
            "set_size": self.set_size,
            "candidate_size": self.candidate_size,
            "counterexample_row": None if self.counterexample_row is None else self.counterexample_row.tolist(),
            "counterexample_side": self.counterexample_side,
        }


def compare_generators(ps: FinitePointSet, cand: FinitePointSet) -> LabOutcome:
    """Generator equality with a dumped witness row when it fails."""
    ea, eb = polar_empty(ps), polar_empty(cand)
    row = side = None
    if ea or eb:
        passed = ea and eb
    else:
        row = first_unimplied_row(ps, cand)
        side = "candidate row not implied by set" if row is not None else None
        if row is None:
            row = first_unimplied_row(cand, ps)
            side = "set row not implied by candidate" if row is not None else None
        passed = row is None
    return LabOutcome(passed, ea, eb, len(ps), len(cand), row, side)
