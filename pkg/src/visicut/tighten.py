"""Box enclosures of the region ``{x in C : g(x) = 0, guard(x) >= 0}``.

:func:`prune_enclosure` runs an interval branch-and-prune: all boxes of one
level are processed together as ``(m, n)`` arrays, contracted with bound
propagation on the linear pieces and a mean-value step on ``g = 0``,
discarded when a constraint is provably violated, and bisected along their
widest relative side. The result is the hull of the surviving leaves.

For quadratic surfaces with an affine guard, :func:`exact_quadratic_box`
returns the tightest box directly by enumerating first-order critical
points on every face of the polyhedral part.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .polycore import INTERVAL_PAD, IntervalVector, MultiPoly, pad_interval
from .visibility import EXACT_QUADRATIC, RegionDescription

NONEMPTY = "nonempty"
PROVED_EMPTY = "proved_empty"

DEFAULT_DEPTH = 18
DEFAULT_MAX_BOXES = 400_000


@dataclass(frozen=True)
class Enclosure:
    box: IntervalVector | None
    leaves_kept: int
    depth_used: int
    status: str

    @property
    def empty(self) -> bool:
        return self.status == PROVED_EMPTY


def _loosen(lo, hi):
    return lo - INTERVAL_PAD * (1.0 + np.abs(lo)), hi + INTERVAL_PAD * (1.0 + np.abs(hi))


def _fbbt_batch(lo, hi, alpha, beta):
    """Propagate ``alpha @ x + beta >= 0`` onto every box; returns (lo, hi, alive)."""
    lo = lo.copy()
    hi = hi.copy()
    n = lo.shape[1]
    alive = np.ones(len(lo), dtype=bool)
    nz = np.nonzero(alpha)[0]
    if nz.size == 0:
        alive &= beta >= 0.0
        return lo, hi, alive
    for _ in range(max(n, 1)):
        changed = False
        # upper bound of each term, then of all terms but one
        term_hi = np.where(alpha > 0, alpha * hi, alpha * lo)
        total_hi = term_hi.sum(axis=1) + beta
        for i in nz:
            rest_hi = total_hi - term_hi[:, i]
            bound = -rest_hi / alpha[i]
            bound = bound - INTERVAL_PAD * (1.0 + np.abs(bound)) * np.sign(alpha[i])
            if alpha[i] > 0:
                upd = bound > lo[:, i]
                if upd.any():
                    lo[upd, i] = bound[upd]
                    changed = True
            else:
                upd = bound < hi[:, i]
                if upd.any():
                    hi[upd, i] = bound[upd]
                    changed = True
        alive &= np.all(lo <= hi, axis=1)
        if not changed:
            break
    alive &= np.all(lo <= hi, axis=1)
    return lo, hi, alive


def fbbt_halfspace(box: IntervalVector, alpha, beta: float) -> IntervalVector | None:
    """Tighten ``box`` against ``alpha @ x + beta >= 0``; None when infeasible."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    lo, hi, alive = _fbbt_batch(box.lo[None, :], box.hi[None, :], alpha, float(beta))
    if not alive[0]:
        return None
    return IntervalVector(lo[0], np.maximum(hi[0], lo[0]))


class _Problem:
    """Precomputed pieces of a region for the batched contractor."""

    def __init__(self, region: RegionDescription):
        g = region.surface
        self.region = region
        self.g = (g.coeffs, g.exps)
        self.grad = [(p.coeffs, p.exps) for p in g.gradient()]
        self.halfspaces = []
        if region.kind == EXACT_QUADRATIC:
            self.halfspaces.append((np.asarray(region.alpha), float(region.beta)))
            self.h = None
        else:
            self.h = (region.h.coeffs, region.h.exps)
        for c in region.domain.linear:
            a, r = c.as_geq()
            self.halfspaces.append((np.asarray(a), -r))

    def _ieval(self, poly, lo, hi):
        c, e = poly
        return pad_interval(*kernels.interval_eval_boxes(c, e, lo, hi))

    def contract(self, lo, hi, passes: int = 2):
        for _ in range(passes):
            alive = np.ones(len(lo), dtype=bool)
            for alpha, beta in self.halfspaces:
                lo, hi, ok = _fbbt_batch(lo, hi, alpha, beta)
                alive &= ok
            lo, hi = lo[alive], hi[alive]
            if len(lo) == 0:
                break
            glo, ghi = self._ieval(self.g, lo, hi)
            alive = (glo <= 0.0) & (ghi >= 0.0)
            if self.h is not None:
                _, hhi = self._ieval(self.h, lo, hi)
                alive &= hhi >= 0.0
            lo, hi = lo[alive], hi[alive]
            if len(lo) == 0:
                break
            lo, hi, alive = self._mean_value(lo, hi)
            lo, hi = lo[alive], hi[alive]
            if len(lo) == 0:
                break
        return lo, hi

    def _mean_value(self, lo, hi):
        """One Jacobi sweep of the mean-value contractor for ``g = 0``."""
        m = 0.5 * (lo + hi)
        r = 0.5 * (hi - lo)
        gm = kernels.eval_points(*self.g, m)
        G = [self._ieval(p, lo, hi) for p in self.grad]
        mag = np.stack([np.maximum(np.abs(a), np.abs(b)) for a, b in G], axis=1)
        spread = mag * r
        total = spread.sum(axis=1)
        new_lo = lo.copy()
        new_hi = hi.copy()
        for i, (ga, gb) in enumerate(G):
            ok = (ga > 0.0) | (gb < 0.0)
            if not ok.any():
                continue
            s = total - spread[:, i]
            pad = INTERVAL_PAD * (1.0 + np.abs(gm) + s) + 1e-15 * np.abs(gm)
            n_lo = -gm - s - pad
            n_hi = -gm + s + pad
            with np.errstate(divide="ignore", invalid="ignore"):
                q = np.stack([n_lo / ga, n_lo / gb, n_hi / ga, n_hi / gb])
            q_lo, q_hi = _loosen(m[:, i] + q.min(axis=0), m[:, i] + q.max(axis=0))
            new_lo[ok, i] = np.maximum(lo[ok, i], q_lo[ok])
            new_hi[ok, i] = np.minimum(hi[ok, i], q_hi[ok])
        alive = np.all(new_lo <= new_hi, axis=1)
        return new_lo, new_hi, alive


def prune_enclosure(
    region: RegionDescription,
    max_depth: int = DEFAULT_DEPTH,
    min_width: float | None = None,
    max_boxes: int = DEFAULT_MAX_BOXES,
) -> Enclosure:
    """Outer box of the region by interval branch-and-prune.

    Every point of the region lies in the returned box. ``min_width``
    defaults to ``1e-4`` times the widest side of the domain; boxes narrower
    than that are kept but no longer split. If the number of live boxes
    would exceed ``max_boxes`` the search stops early (still sound).
    """
    if not 1 <= max_depth <= 40:
        raise ValueError(f"max_depth must be in [1, 40], got {max_depth}")
    box0 = region.domain.box
    w0 = box0.widths
    if min_width is None:
        min_width = 1e-4 * max(float(np.max(w0)), 1e-300)
    if not min_width > 0:
        raise ValueError("min_width must be positive")
    rel_scale = np.where(w0 > 0, w0, 1.0)
    prob = _Problem(region)
    lo = box0.lo[None, :].copy()
    hi = box0.hi[None, :].copy()
    depth = 0
    for level in range(max_depth + 1):
        lo, hi = prob.contract(lo, hi)
        depth = level
        if len(lo) == 0:
            return Enclosure(None, 0, level, PROVED_EMPTY)
        if level == max_depth:
            break
        widths = hi - lo
        k = np.argmax(widths / rel_scale, axis=1)
        wk = widths[np.arange(len(lo)), k]
        split = wk >= min_width
        if not split.any() or len(lo) + int(split.sum()) > max_boxes:
            break
        rows = np.nonzero(split)[0]
        cols = k[rows]
        mid = 0.5 * (lo[rows, cols] + hi[rows, cols])
        left_hi = hi[rows].copy()
        left_hi[np.arange(rows.size), cols] = mid
        right_lo = lo[rows].copy()
        right_lo[np.arange(rows.size), cols] = mid
        keep = ~split
        lo = np.concatenate([lo[keep], lo[rows], right_lo])
        hi = np.concatenate([hi[keep], left_hi, hi[rows]])
    box = IntervalVector(lo.min(axis=0), hi.max(axis=0))
    return Enclosure(box, len(lo), depth, NONEMPTY)


def _face(A: np.ndarray, b: np.ndarray, n: int):
    """Affine parametrization ``x0 + N z`` of ``{A x = b}``, or None if degenerate."""
    if A.shape[0] == 0:
        return np.zeros(n), np.eye(n)
    U, s, Vt = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-12 * max(s[0], 1.0)))
    if rank < A.shape[0]:
        return None
    x0 = Vt[:rank].T @ ((U[:, :rank].T @ b) / s[:rank])
    return x0, Vt[rank:].T


def _face_critical_points(Q, b, c, x0, N, f, rng) -> list[np.ndarray]:
    """Points of ``{g = 0}`` on the face where ``f @ z`` is stationary."""
    k = N.shape[1]
    Qt = N.T @ Q @ N
    bt = N.T @ (2.0 * Q @ x0 + b)
    ct = float(x0 @ Q @ x0 + b @ x0 + c)
    ct_ref = float(np.abs(x0) @ np.abs(Q) @ np.abs(x0) + np.abs(b) @ np.abs(x0) + abs(c))
    ft = N.T @ f
    if np.max(np.abs(ft), initial=0.0) <= 1e-12 * max(1.0, np.max(np.abs(f))):
        ft = rng.normal(size=k)  # objective constant on the face: any generic direction
    mu, V = np.linalg.eigh(Qt)
    fh = V.T @ ft
    bh = V.T @ bt
    qscale = max(1.0, float(np.max(np.abs(mu), initial=0.0)))
    zero = np.abs(mu) <= 1e-12 * qscale
    P = ~zero
    out = []

    def emit(w):
        out.append(x0 + N @ (V @ w))

    def w_of(s):
        w = np.zeros(k)
        w[P] = (s * fh[P] - bh[P]) / (2.0 * mu[P])
        return w

    def q_of(w):
        return float(np.sum(mu * w * w) + bh @ w + ct)

    fz = np.abs(fh[zero]) > 1e-12 * max(1.0, np.max(np.abs(fh)))
    if not zero.any():
        # q(w(s)) = a2 s^2 + a1 s + a0
        u = fh / (2.0 * mu)
        v = -bh / (2.0 * mu)
        a2 = float(np.sum(mu * u * u))
        a1 = float(np.sum(2.0 * mu * u * v) + bh @ u)
        a0 = float(np.sum(mu * v * v) + bh @ v + ct)
        # magnitudes of the summands, to tell cancellation noise from signal
        r1 = float(np.sum(np.abs(2.0 * mu * u * v)) + np.abs(bh) @ np.abs(u))
        r0 = float(np.sum(np.abs(mu) * v * v) + np.abs(bh) @ np.abs(v) + ct_ref)
        for s in _quadratic_roots(a2, a1, a0, r1, r0):
            emit(w_of(s))
        return out
    if not fz.any():
        # objective and constraint both ignore the zero directions: a family,
        # whose extreme values reappear on smaller faces
        return out
    zi = np.nonzero(zero)[0]
    lead = zi[np.argmax(np.abs(fh[zi]))]
    s = bh[lead] / fh[lead]
    if np.max(np.abs(s * fh[zi] - bh[zi])) > 1e-9 * max(1.0, np.max(np.abs(bh))):
        return out
    if zi.size > 1 or abs(s) <= 1e-14:
        return out
    w = w_of(s)
    # q is affine in w[lead] with slope bh[lead]
    w[lead] = 0.0
    w[lead] = -q_of(w) / bh[lead]
    emit(w)
    return out


def _quadratic_roots(a2: float, a1: float, a0: float, r1: float = 0.0, r0: float = 0.0) -> list[float]:
    """Real roots of ``a2 s^2 + a1 s + a0``; ``r1``, ``r0`` are the magnitudes
    of the summands behind ``a1`` and ``a0`` (noise below 1e-13 of them is zero)."""
    if abs(a1) <= 1e-13 * r1:
        a1 = 0.0
    if abs(a0) <= 1e-13 * r0:
        a0 = 0.0
    scale = max(abs(a2), abs(a1), abs(a0), 1e-300)
    if abs(a2) <= 1e-14 * scale:
        if abs(a1) <= 1e-14 * scale:
            return []
        return [-a0 / a1]
    disc = a1 * a1 - 4.0 * a2 * a0
    band = 1e-14 * max(a1 * a1, abs(4.0 * a2 * a0), r1 * r1, abs(4.0 * a2) * r0, 1e-300)
    if disc < -band:
        return []
    # a near-zero discriminant is a tangency: take the double root exactly
    sq = np.sqrt(disc) if disc > band else 0.0
    # stable form
    qv = -0.5 * (a1 + np.copysign(sq, a1 if a1 != 0 else 1.0))
    roots = [qv / a2]
    if qv != 0.0:
        roots.append(a0 / qv)
    else:
        roots.append(-roots[0])
    return roots


def exact_quadratic_box(region: RegionDescription, max_dim: int = 6) -> IntervalVector | None:
    """Tightest box of a quadratic region, or None when the region is empty.

    Each coordinate extreme of ``{g = 0, alpha @ x + beta >= 0}`` within the
    polyhedral domain is attained at a stationary point of the coordinate on
    some face (or at a vertex lying on the surface), so enumerating faces
    and solving the restricted Lagrange system finds every candidate.
    """
    if region.kind != EXACT_QUADRATIC:
        raise ValueError("exact box needs a quadratic region")
    dom = region.domain
    n = dom.n
    if n > max_dim:
        raise ValueError(f"face enumeration limited to n <= {max_dim}")
    Q, b, c = region.surface.quadratic_form()
    rows, rhs = [], []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        rows += [e, e]
        rhs += [dom.box.lo[i], dom.box.hi[i]]
    rows.append(np.asarray(region.alpha))
    rhs.append(-region.beta)
    for con in dom.linear:
        rows.append(np.asarray(con.a))
        rhs.append(con.rhs)
    rows = np.array(rows)
    rhs = np.array(rhs)
    rng = np.random.default_rng(12345)
    g = region.surface
    gscale = 1.0 + max(abs(v) for v in g.interval_eval(dom.box))
    candidates = []
    for size in range(0, n + 1):
        for J in combinations(range(len(rows)), size):
            face = _face(rows[list(J)], rhs[list(J)], n)
            if face is None:
                continue
            x0, N = face
            if N.shape[1] == 0:
                pts = [x0]
            else:
                pts = []
                for k in range(n):
                    f = np.zeros(n)
                    f[k] = 1.0
                    pts += _face_critical_points(Q, b, c, x0, N, f, rng)
            for x in pts:
                if abs(g(x)) > 1e-9 * gscale:
                    continue
                if float(region.alpha @ x + region.beta) < -1e-9 * (1.0 + np.abs(region.alpha) @ np.abs(x)):
                    continue
                if not dom.contains(x, tol=1e-9):
                    continue
                candidates.append(np.clip(x, dom.box.lo, dom.box.hi))
    if not candidates:
        return None
    P = np.array(candidates)
    lo, hi = pad_interval(P.min(axis=0), P.max(axis=0))
    return IntervalVector(np.maximum(lo, dom.box.lo), np.minimum(hi, dom.box.hi))


def tightest_box(region: RegionDescription, max_depth: int = DEFAULT_DEPTH,
                 min_width: float | None = None) -> Enclosure:
    """Exact box for quadratic regions, branch-and-prune otherwise."""
    if region.kind == EXACT_QUADRATIC and region.n <= 6:
        box = exact_quadratic_box(region)
        if box is None:
            return Enclosure(None, 0, 0, PROVED_EMPTY)
        return Enclosure(box, 0, 0, NONEMPTY)
    return prune_enclosure(region, max_depth, min_width)
