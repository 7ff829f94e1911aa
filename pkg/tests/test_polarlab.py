import numpy as np
import pytest

from visicut.polarlab import (
    FinitePointSet,
    HypothesisError,
    PointSetError,
    compare_generators,
    generator_candidate,
    generator_equal,
    hull_vertices,
    hull_visible_subset,
    min_scale_in_hull,
    mutate_candidate,
    origin_in_hull,
    polar_contained,
    polar_empty,
    radial_visible_subset,
    random_point_set,
    reverse_polar,
    separate,
    shadow_sample,
)

O = FinitePointSet.at_origin
CROSS = O([[1, 0], [0, 1], [-1, 0], [0, -1]])


def rows(ps):
    return sorted(map(tuple, ps.points.tolist()))


def test_point_set_validation():
    with pytest.raises(PointSetError):
        O([[1, 0], [1, 0]])
    with pytest.raises(PointSetError):
        O([[1, np.nan]])
    with pytest.raises(PointSetError):
        radial_visible_subset(O([[0, 0], [1, 0]]))


def test_reverse_polar_examples():
    poly = reverse_polar(O([[1, 0], [0, 1]]))
    assert poly.contains([1, 1]) and not poly.contains([0.5, 1])
    assert len(reverse_polar(O(np.zeros((0, 2)), n=2)).rows) == 0
    assert polar_empty(O([[1, 0], [-1, 0]]))


def test_polar_empty_examples():
    assert polar_empty(CROSS)
    assert not polar_empty(O([[1, 0], [0, 1]]))
    assert not polar_empty(O([[2, 2]]))


def test_separate_examples():
    ps = O([[1, 0], [0, 1]])
    a = separate(ps)
    assert a is not None and np.all(ps.centered @ a >= 1 - 1e-9)
    assert separate(O([[1, 0], [-1, 0]])) is None
    a = separate(O([[2, 0]]))
    assert 2 * a[0] >= 1 - 1e-9


def test_min_scale_examples():
    assert min_scale_in_hull(O([[2, 0], [0, 2]]), [2, 2]) == pytest.approx(0.5)
    assert min_scale_in_hull(O([[1, 0], [0, 1]]), [1, 0]) == pytest.approx(1.0)
    assert min_scale_in_hull(O([[1, 0]]), [0, 1]) is None


def test_radial_visible_examples():
    assert rows(radial_visible_subset(O([[1, 0], [2, 0], [0, 1]]))) == [(0.0, 1.0), (1.0, 0.0)]
    assert len(radial_visible_subset(O([[1, 0], [0, 1]]))) == 2
    assert rows(radial_visible_subset(O([[1, 1], [2, 2], [3, 3]]))) == [(1.0, 1.0)]


def test_hull_visible_examples():
    assert rows(hull_visible_subset(O([[1, 0], [0, 1], [1, 1]]))) == [(0.0, 1.0), (1.0, 0.0)]
    assert len(hull_visible_subset(O([[1, 0], [0, 1]]))) == 2
    assert rows(hull_visible_subset(O([[2, 0], [3, 0]]))) == [(2.0, 0.0)]
    with pytest.raises(HypothesisError):
        hull_visible_subset(CROSS)


def test_hull_vertices_examples():
    assert rows(hull_vertices(O([[0, 0], [1, 0], [0, 1], [0.25, 0.25]]))) == [(0, 0), (0, 1), (1, 0)]
    assert len(hull_vertices(O([[1, 0], [0, 1]]))) == 2
    assert rows(hull_vertices(O([[0, 0], [1, 0], [2, 0]]))) == [(0, 0), (2, 0)]


def test_generator_equal_examples():
    assert generator_equal(O([[1, 0], [0, 1]]), O([[1, 0], [0, 1], [2, 0]]))
    assert not generator_equal(O([[1, 0]]), O([[0, 1]]))


def test_shadow_sample_examples():
    assert rows(shadow_sample(O([[1, 0]]), [1, 2])) == [(1.0, 0.0), (2.0, 0.0)]
    ps = O([[1, 0], [0, 1]])
    assert rows(shadow_sample(ps, [1])) == rows(ps)
    assert (0.0, 3.0) in rows(shadow_sample(O([[0, 1]]), [3]))
    with pytest.raises(ValueError):
        shadow_sample(ps, [0.5])


def test_nonzero_viewpoint():
    xb = np.array([1.0, 1.0])
    ps = FinitePointSet(np.array([[2, 1], [3, 1], [1, 2]]), xb)
    assert rows(radial_visible_subset(ps)) == [(1.0, 2.0), (2.0, 1.0)]
    assert generator_equal(ps, radial_visible_subset(ps))


@pytest.mark.parametrize("check", ["visible", "shadow", "smallest-inter", "smallest-closed"])
def test_generator_statements_random(check, rng):
    done = 0
    while done < 25:
        ps = random_point_set(rng, int(rng.integers(2, 5)), int(rng.integers(5, 31)))
        if check.startswith("smallest") and polar_empty(ps):
            continue
        assert generator_equal(ps, generator_candidate(check, ps, rng))
        done += 1


def test_monotonicity_random(rng):
    for _ in range(30):
        ps = random_point_set(rng, int(rng.integers(2, 5)), int(rng.integers(5, 20)))
        mask = rng.random(len(ps)) < 0.5
        if not mask.any():
            continue
        # the polar of the bigger set sits inside the polar of the subset
        assert polar_contained(ps, ps.subset(mask))


def test_emptiness_duality_random(rng):
    for _ in range(60):
        ps = random_point_set(rng, int(rng.integers(2, 5)), int(rng.integers(3, 15)), hidden=0.6)
        assert polar_empty(ps) == origin_in_hull(ps)
        assert (separate(ps) is None) == polar_empty(ps)


def test_lab_cross_passes_with_empty_polars():
    out = compare_generators(CROSS, generator_candidate("visible", CROSS))
    assert out.passed and out.polar_empty_set and out.polar_empty_candidate


def test_mutated_candidate_fails_with_row(rng):
    for _ in range(20):
        ps = random_point_set(rng, int(rng.integers(2, 5)), int(rng.integers(5, 20)))
        bad = mutate_candidate(ps, generator_candidate("visible", ps))
        out = compare_generators(ps, bad)
        assert not out.passed
        if not out.polar_empty_set:
            assert out.counterexample_row is not None
