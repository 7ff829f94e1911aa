"""Seeded random instances and surface points for property checks."""
from __future__ import annotations

import numpy as np

from .polycore import IntervalVector, MultiPoly
from .visibility import ConvexDomain, LinearConstraint, ProblemInstance


def random_quadratic_instance(
    rng: np.random.Generator,
    n: int | None = None,
    with_linear: bool | None = None,
    max_tries: int = 100,
) -> ProblemInstance:
    """Quadratic ``g`` on a random box with ``g(xbar) > 0`` and ``S`` nonempty.

    ``c`` is shifted so that ``g(xbar)`` lands in ``[0.05, 1]``; instances
    where no box sample satisfies ``g <= 0`` are redrawn.
    """
    for _ in range(max_tries):
        k = int(rng.integers(2, 5)) if n is None else n
        A = rng.uniform(-1.0, 1.0, size=(k, k))
        Q = 0.5 * (A + A.T)
        b = rng.uniform(-1.0, 1.0, size=k)
        lo = rng.uniform(-2.0, 0.0, size=k)
        hi = lo + rng.uniform(1.0, 3.0, size=k)
        box = IntervalVector(lo, hi)
        xbar = rng.uniform(lo, hi)
        raw = float(xbar @ Q @ xbar + b @ xbar)
        c = -raw + rng.uniform(0.05, 1.0)
        g = MultiPoly.from_quadratic(Q, b, c)
        linear = ()
        use_lin = bool(rng.random() < 0.3) if with_linear is None else with_linear
        if use_lin:
            a = rng.normal(size=k)
            linear = (LinearConstraint(a, "<=", float(a @ xbar) + rng.uniform(0.2, 1.5)),)
        dom = ConvexDomain(box, linear)
        X = box.sample(rng, 2000)
        if np.any(dom.feasible_mask(X) & (g.eval_many(X) <= 0.0)):
            return ProblemInstance(g, dom, xbar)
    raise RuntimeError("could not draw an instance with nonempty S")


def line_surface_points(inst: ProblemInstance, origin, direction) -> list[np.ndarray]:
    """Points of ``{g = 0}`` on the line ``origin + t direction`` inside ``C``."""
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    p = inst.g.restrict_to_segment(origin, origin + direction)
    if p.degree < 1:
        return []
    roots = np.roots(p.coeffs[::-1])
    out = []
    for t in roots:
        if abs(t.imag) > 1e-12 * max(1.0, abs(t)):
            continue
        x = origin + float(t.real) * direction
        if inst.C.contains(x, tol=0.0):
            out.append(x)
    return out


def random_surface_points(
    inst: ProblemInstance,
    rng: np.random.Generator,
    count: int,
    from_xbar: float = 0.5,
    max_lines: int | None = None,
) -> np.ndarray:
    """Surface points from random lines; a share of the lines pass through ``xbar``.

    Lines through ``xbar`` produce both the first hit (always visible) and
    hits further out (often hidden); free lines produce arbitrary points.
    """
    n = inst.n
    pts: list[np.ndarray] = []
    tries = 0
    limit = max_lines if max_lines is not None else 50 * count + 100
    while len(pts) < count and tries < limit:
        tries += 1
        d = rng.normal(size=n)
        d /= np.linalg.norm(d)
        o = inst.xbar if rng.random() < from_xbar else inst.C.box.sample(rng, 1)[0]
        for x in line_surface_points(inst, o, d):
            if abs(inst.g(x)) <= inst.surface_tol:
                pts.append(x)
    return np.array(pts[:count]).reshape(-1, n)


def first_hits(inst: ProblemInstance, rng: np.random.Generator, count: int,
               max_rays: int | None = None) -> np.ndarray:
    """First surface point along random rays from ``xbar`` (each one visible)."""
    n = inst.n
    pts: list[np.ndarray] = []
    tries = 0
    limit = max_rays if max_rays is not None else 50 * count + 100
    while len(pts) < count and tries < limit:
        tries += 1
        d = rng.normal(size=n)
        d /= np.linalg.norm(d)
        hits = []
        for x in line_surface_points(inst, inst.xbar, d):
            t = float((x - inst.xbar) @ d)
            if t > 0:
                hits.append((t, x))
        if hits:
            x = min(hits, key=lambda h: h[0])[1]
            if abs(inst.g(x)) <= inst.surface_tol:
                pts.append(x)
    return np.array(pts).reshape(-1, n)


def visible_by_ray_scan(inst: ProblemInstance, x, grid: int = 20_001) -> bool:
    """Brute-force visibility: ``g > 0`` at every grid point of ``(x, xbar]``."""
    lam = np.linspace(0.0, 1.0, grid)[1:]
    X = np.asarray(x, dtype=float) + lam[:, None] * (inst.xbar - np.asarray(x, dtype=float))
    return bool(np.all(inst.g.eval_many(X) > 0.0))
