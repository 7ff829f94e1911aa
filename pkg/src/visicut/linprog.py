"""Dense two-phase primal simplex for small linear programs.

Problems are brought to standard form (shifted or split variables, slack
and surplus columns, artificials on ``>=`` rows) and solved on a full
tableau. Pricing is Dantzig's rule until the objective stalls for ``n``
consecutive pivots, after which Bland's rule takes over for good.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class NumericalBreakdown(ArithmeticError):
    """The tableau lost accuracy (non-finite entries, runaway growth, cycling)."""


@dataclass(frozen=True)
class LinearProgram:
    """``minimize c @ x`` subject to ``a @ x (<=|=|>=) rhs`` and ``lo <= x <= hi``.

    ``bounds`` defaults to ``(0, inf)`` for every variable.
    """

    objective: np.ndarray
    constraints: Sequence[tuple[Sequence[float], str, float]] = ()
    bounds: Sequence[tuple[float, float]] | None = None

    def __post_init__(self):
        c = np.array(self.objective, dtype=float).reshape(-1)
        n = c.size
        rows = []
        for a, sense, rhs in self.constraints:
            a = np.array(a, dtype=float).reshape(-1)
            if a.size != n:
                raise ValueError(f"constraint has {a.size} coefficients, expected {n}")
            if sense not in ("<=", "=", ">="):
                raise ValueError(f"unknown sense {sense!r}")
            if not (np.all(np.isfinite(a)) and np.isfinite(rhs)):
                raise ValueError("constraint coefficients must be finite")
            rows.append((a, sense, float(rhs)))
        if not np.all(np.isfinite(c)):
            raise ValueError("objective must be finite")
        bounds = [(0.0, np.inf)] * n if self.bounds is None else [
            (float(lo), float(hi)) for lo, hi in self.bounds
        ]
        if len(bounds) != n:
            raise ValueError(f"expected {n} bounds, got {len(bounds)}")
        for lo, hi in bounds:
            if lo > hi or lo == np.inf or hi == -np.inf:
                raise ValueError(f"invalid bound [{lo}, {hi}]")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", tuple(rows))
        object.__setattr__(self, "bounds", tuple(bounds))

    @property
    def n(self) -> int:
        return self.objective.size

    def max_violation(self, x) -> float:
        x = np.asarray(x, dtype=float)
        v = 0.0
        for a, sense, rhs in self.constraints:
            r = float(a @ x - rhs) / (1.0 + abs(rhs))
            if sense == "<=":
                v = max(v, r)
            elif sense == ">=":
                v = max(v, -r)
            else:
                v = max(v, abs(r))
        for xi, (lo, hi) in zip(x, self.bounds):
            v = max(v, lo - xi, xi - hi)
        return v


@dataclass(frozen=True)
class LpResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass
class _Tableau:
    T: np.ndarray  # m x (N + 1), last column is the rhs
    basis: list[int]
    iterations: int = 0
    stall: int = 0
    bland: bool = False
    max_iter: int = field(default=0)

    def pivot(self, r: int, j: int):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j
        self.iterations += 1
        if not np.all(np.isfinite(T)) or np.max(np.abs(T)) > 1e14:
            raise NumericalBreakdown("tableau entries blew up")

    def run(self, cost: np.ndarray, allowed: np.ndarray) -> str:
        """Minimize ``cost`` over the columns in ``allowed``; returns a status."""
        T = self.T
        n_cols = T.shape[1] - 1
        stall_limit = max(n_cols, 1)
        last = np.inf
        while True:
            cb = cost[self.basis]
            red = cost[:n_cols] - cb @ T[:, :n_cols]
            red[~allowed] = 0.0
            obj = float(cb @ T[:, -1])
            if obj < last - PIVOT_TOL * (1.0 + abs(last) if np.isfinite(last) else 1.0):
                self.stall = 0
            else:
                self.stall += 1
                if self.stall >= stall_limit:
                    self.bland = True
            last = min(last, obj)
            candidates = np.nonzero(red < -PIVOT_TOL)[0]
            if candidates.size == 0:
                return OPTIMAL
            j = int(candidates[0]) if self.bland else int(candidates[np.argmin(red[candidates])])
            col = T[:, j]
            rows = np.nonzero(col > PIVOT_TOL)[0]
            if rows.size == 0:
                return UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = np.min(ratios)
            ties = rows[ratios <= best + PIVOT_TOL * (1.0 + abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            if self.iterations > self.max_iter:
                raise NumericalBreakdown("iteration limit reached")


def _standard_form(lp: LinearProgram):
    """Return ``(A_ge, b_ge, A_le, b_le, c, recover)`` over nonnegative variables."""
    n = lp.n
    cols = []  # per original variable: list of (new_index, sign), offset
    offsets = np.zeros(n)
    extra_le = []
    k = 0
    for i, (lo, hi) in enumerate(lp.bounds):
        if np.isfinite(lo):
            cols.append([(k, 1.0)])
            offsets[i] = lo
            if np.isfinite(hi):
                extra_le.append((k, hi - lo))
            k += 1
        elif np.isfinite(hi):
            cols.append([(k, -1.0)])
            offsets[i] = hi
            k += 1
        else:
            cols.append([(k, 1.0), (k + 1, -1.0)])
            k += 2
    M = np.zeros((n, k))
    for i, parts in enumerate(cols):
        for idx, s in parts:
            M[i, idx] = s
    c = lp.objective @ M
    ge, le = [], []
    for a, sense, rhs in lp.constraints:
        row = a @ M
        r = rhs - float(a @ offsets)
        if sense in ("<=", "="):
            le.append((row, r))
        if sense in (">=", "="):
            ge.append((row, r))
    for idx, ub in extra_le:
        row = np.zeros(k)
        row[idx] = 1.0
        le.append((row, ub))

    def recover(y):
        return offsets + M @ y

    return ge, le, c, k, recover, float(lp.objective @ offsets)


def solve(lp: LinearProgram) -> LpResult:
    ge, le, c, k, recover, c0 = _standard_form(lp)
    # normalize every row to rhs >= 0; a negated <= row becomes a >= row
    rows = []
    for row, r in le:
        rows.append((row, r, "<=") if r >= 0 else (-row, -r, ">="))
    for row, r in ge:
        rows.append((row, r, ">=") if r >= 0 else (-row, -r, "<="))
    m = len(rows)
    n_slack = m
    n_art = sum(1 for _, _, s in rows if s == ">=")
    N = k + n_slack + n_art
    T = np.zeros((m, N + 1))
    basis = []
    art_cols = []
    a_idx = k + n_slack
    for i, (row, r, s) in enumerate(rows):
        T[i, :k] = row
        T[i, -1] = r
        if s == "<=":
            T[i, k + i] = 1.0
            basis.append(k + i)
        else:
            T[i, k + i] = -1.0
            T[i, a_idx] = 1.0
            basis.append(a_idx)
            art_cols.append(a_idx)
            a_idx += 1
    tab = _Tableau(T, basis, max_iter=200 * (m + N + 10))

    if art_cols:
        cost1 = np.zeros(N)
        cost1[art_cols] = 1.0
        status = tab.run(cost1, np.ones(N, dtype=bool))
        if status != OPTIMAL:
            raise NumericalBreakdown("phase one did not terminate at an optimum")
        infeas = float(cost1[tab.basis] @ tab.T[:, -1])
        bscale = max(1.0, float(np.max(np.abs([r for _, r, _ in rows]), initial=0.0)))
        if infeas > PIVOT_TOL * bscale:
            return LpResult(INFEASIBLE, iterations=tab.iterations)
        # drive remaining artificials out of the basis, dropping redundant rows
        is_art = np.zeros(N, dtype=bool)
        is_art[art_cols] = True
        keep = []
        for i in range(len(tab.basis)):
            if not is_art[tab.basis[i]]:
                keep.append(i)
                continue
            cand = np.nonzero((np.abs(tab.T[i, :N]) > PIVOT_TOL) & ~is_art)[0]
            if cand.size:
                tab.pivot(i, int(cand[0]))
                keep.append(i)
        tab.T = tab.T[keep]
        tab.basis = [tab.basis[i] for i in keep]
        allowed = ~is_art
        tab.T[:, np.nonzero(is_art)[0]] = 0.0
    else:
        allowed = np.ones(N, dtype=bool)

    cost2 = np.zeros(N)
    cost2[:k] = c
    tab.stall = 0
    tab.bland = False
    status = tab.run(cost2, allowed)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, iterations=tab.iterations)
    y = np.zeros(N)
    y[tab.basis] = tab.T[:, -1]
    x = recover(y[:k])
    viol = lp.max_violation(x)
    if viol > FEAS_TOL:
        raise NumericalBreakdown(f"solution violates constraints by {viol:.3g}")
    return LpResult(OPTIMAL, x, float(lp.objective @ x), tab.iterations)


def feasible_point(lp_constraints, n: int, bounds=None) -> LpResult:
    """Phase-one only: any point satisfying the constraints."""
    return solve(LinearProgram(np.zeros(n), lp_constraints, bounds))
