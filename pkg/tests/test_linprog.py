import numpy as np
import pytest

from visicut.linprog import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    feasible_point,
    solve,
)

scipy_optimize = pytest.importorskip("scipy.optimize")

FREE = (-np.inf, np.inf)


def test_examples():
    r = solve(LinearProgram([1, 1], [([1, 0], ">=", 1), ([0, 1], ">=", 1)]))
    assert r.status == OPTIMAL and r.objective == pytest.approx(2.0, abs=1e-12)
    r = solve(LinearProgram([0, 0], [([1, 0], ">=", 1), ([-1, 0], ">=", 1)], [FREE, FREE]))
    assert r.status == INFEASIBLE
    # smallest mu with mu (2, 2) in conv{(2, 0), (0, 2)}; variables (mu, w1, w2)
    r = solve(LinearProgram([1, 0, 0], [([2, -2, 0], "=", 0), ([2, 0, -2], "=", 0), ([0, 1, 1], "=", 1)]))
    assert r.status == OPTIMAL and r.x[0] == pytest.approx(0.5, abs=1e-12)


def test_unbounded():
    r = solve(LinearProgram([-1, 0], [([1, -1], "<=", 1)]))
    assert r.status == UNBOUNDED


def test_free_and_boxed_variables():
    r = solve(LinearProgram([1, -1], [([1, 1], "=", 0)], [(-3, 2), FREE]))
    assert r.status == OPTIMAL and r.objective == pytest.approx(-6.0)
    assert np.allclose(r.x, [-3, 3])


def test_feasible_point():
    r = feasible_point([([1, 1], ">=", 1), ([1, -1], "=", 0)], 2, [FREE, FREE])
    assert r.status == OPTIMAL and r.x[0] == pytest.approx(r.x[1])


def test_rejects_malformed():
    with pytest.raises(ValueError):
        LinearProgram([1, 1], [([1], ">=", 1)])
    with pytest.raises(ValueError):
        LinearProgram([1], [([1], "~", 1)])
    with pytest.raises(ValueError):
        LinearProgram([np.nan], [([1], ">=", 1)])


def _split(A, senses, b):
    aub, bub, aeq, beq = [], [], [], []
    for a, s, r in zip(A, senses, b):
        if s == "<=":
            aub.append(a)
            bub.append(r)
        elif s == ">=":
            aub.append(-a)
            bub.append(-r)
        else:
            aeq.append(a)
            beq.append(r)
    return aub or None, bub or None, aeq or None, beq or None


def test_agrees_with_highs(rng):
    for _ in range(600):
        n, m = int(rng.integers(1, 7)), int(rng.integers(1, 13))
        A = rng.integers(-3, 4, (m, n)).astype(float)
        b = rng.integers(-3, 5, m).astype(float)
        c = rng.integers(-3, 4, n).astype(float)
        senses = rng.choice(["<=", ">=", "="], m, p=[0.45, 0.45, 0.1])
        bnds = [[(0, None), (None, None), (-1, 2), (None, 3)][rng.integers(4)] for _ in range(n)]
        aub, bub, aeq, beq = _split(A, senses, b)
        ref = scipy_optimize.linprog(c, A_ub=aub, b_ub=bub, A_eq=aeq, b_eq=beq, bounds=bnds, method="highs")
        mine = solve(LinearProgram(c, list(zip(A, senses, b)),
                                   [(-np.inf if lo is None else lo, np.inf if hi is None else hi)
                                    for lo, hi in bnds]))
        expected = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}[ref.status]
        assert mine.status == expected
        if expected == OPTIMAL:
            assert mine.objective == pytest.approx(ref.fun, abs=1e-7)


def test_optimal_points_are_feasible(rng):
    for _ in range(300):
        n, m = int(rng.integers(1, 7)), int(rng.integers(1, 13))
        A = rng.normal(size=(m, n))
        b = rng.normal(size=m)
        lp = LinearProgram(rng.normal(size=n), [(a, ">=", r) for a, r in zip(A, b)], [(-5, 5)] * n)
        r = solve(lp)
        if r.status == OPTIMAL:
            assert lp.max_violation(r.x) <= 1e-8


def test_duality_spot_check(rng):
    checked = 0
    while checked < 200:
        n, m = int(rng.integers(1, 7)), int(rng.integers(1, 13))
        A = rng.normal(size=(m, n))
        x0 = rng.uniform(0, 2, n)
        b = A @ x0 - rng.uniform(0, 1, m)  # x0 is primal feasible
        y0 = rng.uniform(0, 2, m)
        c = A.T @ y0 + rng.uniform(0, 1, n)  # y0 is dual feasible
        primal = solve(LinearProgram(c, [(a, ">=", r) for a, r in zip(A, b)]))
        # min c x, A x >= b, x >= 0  <->  max b y, A^T y <= c, y >= 0
        dual = solve(LinearProgram(-b, [(col, "<=", ci) for col, ci in zip(A.T, c)]))
        assert primal.status == OPTIMAL and dual.status == OPTIMAL
        assert primal.objective == pytest.approx(-dual.objective, abs=1e-6)
        checked += 1


def test_degenerate_cycling_example():
    # Beale's classic cycling instance; Bland's rule must terminate
    c = [-0.75, 150, -0.02, 6]
    cons = [
        ([0.25, -60, -0.04, 9], "<=", 0),
        ([0.5, -90, -0.02, 3], "<=", 0),
        ([0, 0, 1, 0], "<=", 1),
    ]
    r = solve(LinearProgram(c, cons))
    assert r.status == OPTIMAL and r.objective == pytest.approx(-0.05, abs=1e-9)
