import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from visicut.polycore import DimensionError, IntervalVector, MultiPoly
from visicut.unipoly import UniPoly

from conftest import closure_poly, quad_poly


def random_poly(rng, n, max_deg, n_terms=6, coef=10.0):
    terms = []
    for _ in range(n_terms):
        e = np.zeros(n, dtype=int)
        for _ in range(int(rng.integers(0, max_deg + 1))):
            e[rng.integers(n)] += 1
        terms.append((float(rng.uniform(-coef, coef)), e))
    return MultiPoly(n, terms)


def test_terms_merge_and_drop_zeros():
    p = MultiPoly(2, [(1.0, (1, 0)), (2.0, (1, 0)), (0.0, (0, 1)), (1.0, (0, 2)), (-1.0, (0, 2))])
    assert p.terms == ((3.0, (1, 0)),)
    assert p.degree == 1


def test_rejects_bad_exponents():
    with pytest.raises(ValueError):
        MultiPoly(2, [(1.0, (1,))])
    with pytest.raises(ValueError):
        MultiPoly(2, [(1.0, (-1, 0))])
    with pytest.raises(ValueError):
        MultiPoly(0)


def test_eval_examples():
    # hand expansion: 1 - 3 - 1 + 1 + 1
    assert quad_poly()([1, 1, 1]) == pytest.approx(-1.0, abs=1e-15)
    assert MultiPoly(3)([4.0, 5.0, 6.0]) == 0.0
    assert closure_poly()([-1.0, 0.0]) == 0.0


def test_eval_dimension_mismatch():
    with pytest.raises(DimensionError):
        quad_poly()([1.0, 2.0])


def test_eval_many_matches_eval(rng):
    p = random_poly(rng, 3, 4)
    X = rng.uniform(-2, 2, size=(50, 3))
    assert np.allclose(p.eval_many(X), [p(x) for x in X], rtol=1e-13, atol=1e-12)


def test_gradient_examples():
    g = MultiPoly(2, [(1.0, (2, 1))])
    d1, d2 = g.gradient()
    assert d1 == MultiPoly(2, [(2.0, (1, 1))])
    assert d2 == MultiPoly(2, [(1.0, (2, 0))])
    assert all(d.is_zero for d in MultiPoly.constant(3, 7.0).gradient())
    grad0 = [d([0, 0, 0]) for d in quad_poly().gradient()]
    assert grad0 == [-1.0, -1.0, -1.0]


def test_gradient_quad_matches_central_differences():
    g, x, h = quad_poly(), np.zeros(3), 1e-6
    fd = [(g(x + h * e) - g(x - h * e)) / (2 * h) for e in np.eye(3)]
    assert np.allclose(fd, [-1, -1, -1], atol=1e-6)


def test_gradient_vs_finite_differences_random(rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        p = random_poly(rng, n, 4)
        x = rng.uniform(-1.5, 1.5, n)
        h = 1e-5
        fd = np.array([(p(x + h * e) - p(x - h * e)) / (2 * h) for e in np.eye(n)])
        exact = np.array([d(x) for d in p.gradient()])
        worst = max(worst, float(np.max(np.abs(fd - exact))))
    assert worst <= 1e-5


def test_restrict_to_segment_examples():
    p = closure_poly().restrict_to_segment([-1, 0], [1, -2])
    assert p.allclose(UniPoly([0, 4, -16, 16]), tol=1e-12)
    x = np.array([0.3, -0.7])
    assert closure_poly().restrict_to_segment(x, x).allclose(UniPoly([closure_poly()(x)]))
    q = quad_poly().restrict_to_segment([1, 1, 1], [0, 0, 0])
    assert q.allclose(UniPoly([-1, 1, 1]), tol=1e-12)
    lam = np.linspace(0, 1, 20)
    assert np.allclose(q(lam), lam**2 + lam - 1, atol=1e-9)


def test_restrict_to_segment_random(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        p = random_poly(rng, n, 6)
        x, xb = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
        u = p.restrict_to_segment(x, xb)
        assert u.degree <= p.degree
        for lam in np.linspace(0, 1, 11):
            direct = p(x + lam * (xb - x))
            assert abs(u(lam) - direct) <= 1e-8 * max(1.0, abs(direct))


def test_interval_eval_examples():
    lo, hi = MultiPoly(2, [(1.0, (1, 1))]).interval_eval(IntervalVector([0, 0], [1, 1]))
    assert lo <= 0 and hi >= 1
    lo, hi = MultiPoly(1, [(1.0, (2,))]).interval_eval(IntervalVector([-1], [2]))
    assert lo <= 0 and hi >= 4
    B = IntervalVector([-0.1, 0, 0], [2, 2, 2])
    axes = [np.linspace(l, h, 20) for l, h in zip(B.lo, B.hi)]
    vals = quad_poly().eval_many(np.array(list(itertools.product(*axes))))
    lo, hi = quad_poly().interval_eval(B)
    assert lo <= vals.min() and hi >= vals.max()


def test_interval_eval_sound_random(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        p = random_poly(rng, n, 4, n_terms=4)
        lo = rng.uniform(-2, 1, n)
        box = IntervalVector(lo, lo + rng.uniform(0, 2, n))
        x = box.sample(rng, 1)[0]
        a, b = p.interval_eval(box)
        assert a <= p(x) <= b


def test_interval_eval_boxes_matches_single(rng):
    p = random_poly(rng, 3, 3)
    lo = rng.uniform(-1, 0, size=(20, 3))
    hi = lo + rng.uniform(0, 1, size=(20, 3))
    L, H = p.interval_eval_boxes(lo, hi)
    for k in range(20):
        a, b = p.interval_eval(IntervalVector(lo[k], hi[k]))
        assert L[k] == pytest.approx(a) and H[k] == pytest.approx(b)


def test_quadratic_form_round_trip(rng):
    A = rng.normal(size=(3, 3))
    Q = 0.5 * (A + A.T)
    b = rng.normal(size=3)
    g = MultiPoly.from_quadratic(Q, b, 0.25)
    Q2, b2, c2 = g.quadratic_form()
    assert np.allclose(Q, Q2) and np.allclose(b, b2) and c2 == pytest.approx(0.25)
    with pytest.raises(ValueError):
        closure_poly().quadratic_form()


def test_json_round_trip():
    g = quad_poly()
    assert MultiPoly.from_json(g.to_json(), 3) == g


def test_interval_vector_validation():
    with pytest.raises(ValueError):
        IntervalVector([1.0], [0.0])
    with pytest.raises(ValueError):
        IntervalVector([0.0], [np.inf])
    a = IntervalVector([0, 0], [2, 2])
    b = IntervalVector([1, -1], [3, 1])
    assert a.intersect(b) == IntervalVector([1, 0], [2, 1])
    assert a.hull(b) == IntervalVector([0, -1], [3, 2])
    assert a.intersect(IntervalVector([5, 5], [6, 6])) is None


@settings(max_examples=60, deadline=None)
@given(
    c=st.lists(st.floats(-5, 5), min_size=1, max_size=5),
    x=st.lists(st.floats(-2, 2), min_size=2, max_size=2),
)
def test_arithmetic_is_pointwise(c, x):
    exps = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)]
    p = MultiPoly(2, list(zip(c, exps)))
    q = MultiPoly(2, [(1.5, (0, 1)), (-2.0, (0, 0))])
    for combo, ref in ((p + q, p(x) + q(x)), (p - q, p(x) - q(x)), (p * q, p(x) * q(x))):
        assert combo(x) == pytest.approx(ref, rel=1e-12, abs=1e-12)
