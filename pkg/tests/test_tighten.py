import numpy as np
import pytest

from visicut.generators import first_hits, random_quadratic_instance
from visicut.polycore import IntervalVector, MultiPoly
from visicut.tighten import (
    NONEMPTY,
    PROVED_EMPTY,
    _quadratic_roots,
    exact_quadratic_box,
    fbbt_halfspace,
    prune_enclosure,
    tightest_box,
)
from visicut.visibility import make_instance, region_description

from conftest import QUAD_R

SQRT3_2 = np.sqrt(3) / 2


def box_err(box, ref):
    ref = np.asarray(ref, dtype=float)
    return float(np.max(np.abs(np.stack([box.lo, box.hi], axis=1) - ref)))


def test_fbbt_examples():
    # results carry the documented outward pad, hence the 1e-9 comparisons
    B = IntervalVector([0, 0], [2, 2])
    assert box_err(fbbt_halfspace(B, [1, 1], -1), [[0, 2], [0, 2]]) <= 1e-9
    assert box_err(fbbt_halfspace(B, [-1, -1], 1), [[0, 1], [0, 1]]) <= 1e-9
    assert box_err(fbbt_halfspace(IntervalVector([-2], [2]), [1], -0.5), [[0.5, 2]]) <= 1e-9
    assert fbbt_halfspace(B, [1, 1], -5) is None


def test_fbbt_contains_feasible_part(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        lo = rng.uniform(-2, 0, n)
        B = IntervalVector(lo, lo + rng.uniform(0.5, 3, n))
        a, b = rng.normal(size=n), float(rng.normal())
        T = fbbt_halfspace(B, a, b)
        X = B.sample(rng, 500)
        keep = X[X @ a + b >= 0]
        if T is None:
            assert len(keep) == 0
            continue
        assert all(T.contains(x, 1e-12) for x in keep)
        # a second pass changes nothing beyond the pad
        assert box_err(fbbt_halfspace(T, a, b), np.stack([T.lo, T.hi], 1)) <= 1e-9


def test_circle_enclosure(circle_inst):
    enc = prune_enclosure(region_description(circle_inst), 16)
    assert enc.status == NONEMPTY
    assert box_err(enc.box, np.array([[0.5, 1], [-SQRT3_2, SQRT3_2]])) <= 0.02


def test_quad_enclosure_near_reference(quad_inst):
    enc = prune_enclosure(region_description(quad_inst), 16)
    assert box_err(enc.box, QUAD_R) <= 1e-2
    assert enc.box.contains_box(IntervalVector(QUAD_R[:, 0], QUAD_R[:, 1]), 1e-9)


def test_exact_quadratic_box(quad_inst, circle_inst):
    assert box_err(exact_quadratic_box(region_description(quad_inst)), QUAD_R) <= 1e-9
    circ = exact_quadratic_box(region_description(circle_inst))
    assert box_err(circ, np.array([[0.5, 1], [-SQRT3_2, SQRT3_2]])) <= 1e-9


def test_example1_enclosure_inside_v(example1_inst):
    enc = prune_enclosure(region_description(example1_inst), 18)
    V = IntervalVector([-0.5 - 0.05, -0.24 - 0.05], [1.7 + 0.05, 1.5 + 0.05])
    assert V.contains_box(enc.box)


def test_proved_empty():
    g = MultiPoly(2, [(5.0, (0, 0)), (1.0, (2, 0)), (1.0, (0, 2))])
    inst = make_instance(g, [-1, -1], [1, 1], [0, 0])
    enc = prune_enclosure(region_description(inst), 10)
    assert enc.status == PROVED_EMPTY and enc.empty and enc.box is None
    assert tightest_box(region_description(inst)).empty


def test_monotone_refinement(rng):
    for _ in range(15):
        reg = region_description(random_quadratic_instance(rng))
        prev = None
        for d in (6, 8, 10, 12):
            enc = prune_enclosure(reg, d)
            if prev is not None and not prev.empty:
                assert enc.empty or prev.box.contains_box(enc.box, 1e-12)
            prev = enc


def test_enclosure_sound_and_within_fbbt(rng):
    escapes = 0
    for _ in range(40):
        inst = random_quadratic_instance(rng)
        reg = region_description(inst)
        enc = prune_enclosure(reg, 12)
        pts = first_hits(inst, rng, 20)
        if enc.empty:
            assert len(pts) == 0
            continue
        escapes += sum(not enc.box.contains(x, 1e-12) for x in pts)
        ref = fbbt_halfspace(inst.C.box, reg.alpha, reg.beta)
        assert ref.contains_box(enc.box, 1e-9)
        exact = exact_quadratic_box(reg)
        if exact is not None:
            assert enc.box.contains_box(exact, 1e-9)
    assert escapes == 0


def test_quadratic_roots_band():
    # an exact double root may be listed twice; only the values matter
    assert sorted(set(_quadratic_roots(1.0, -2.0, 1.0))) == pytest.approx([1.0])
    assert sorted(_quadratic_roots(1.0, 0.0, -4.0)) == pytest.approx([-2.0, 2.0])
    assert _quadratic_roots(1.0, 0.0, 4.0) == []
    assert _quadratic_roots(0.0, 2.0, -1.0) == pytest.approx([0.5])
