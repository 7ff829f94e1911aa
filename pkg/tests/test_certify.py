import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from visicut.certify import (
    NotNonnegativeError,
    OffSurfaceError,
    SosCertificate,
    build_gram_system,
    gram_system,
    gram_witness,
    sos_decompose,
    verify_certificate,
)
from visicut.generators import random_quadratic_instance, random_surface_points
from visicut.polycore import MultiPoly
from visicut.unipoly import UniPoly, is_nonnegative_on_unit
from visicut.visibility import polar_halfspace

from conftest import closure_poly, quad_poly


def constructed(rng, parity, d):
    """A polynomial built as a certificate, so it is nonnegative by design."""
    if parity == "odd":
        s1 = UniPoly(rng.uniform(-3, 3, d + 1))
        s2 = UniPoly(rng.uniform(-3, 3, d + 1))
        return UniPoly([0, 1]) * s1 * s1 + UniPoly([1, -1]) * s2 * s2
    s1 = UniPoly(rng.uniform(-3, 3, d + 1))
    s2 = UniPoly(rng.uniform(-3, 3, d))
    return s1 * s1 + UniPoly([0, 1, -1]) * s2 * s2


def test_sos_examples():
    c = sos_decompose(UniPoly([0, 1, -1]))
    assert (c.parity, c.d) == ("even", 1)
    assert c.s1.is_zero and c.s2.allclose(UniPoly([1.0]))
    c = sos_decompose(UniPoly([0, 1]))
    assert (c.parity, c.d) == ("odd", 0)
    assert c.s1.allclose(UniPoly([1.0])) and c.s2.is_zero
    p = UniPoly([0, 4, -16, 16])
    c = sos_decompose(p)
    assert (c.parity, c.d) == ("odd", 1)
    # sign of s1 is not fixed by the certificate; (4 lam - 2)^2 either way
    assert c.s1.allclose(UniPoly([-2, 4]), 1e-12) or c.s1.allclose(UniPoly([2, -4]), 1e-12)
    assert verify_certificate(p, c) <= 1e-12


def test_verify_examples():
    assert verify_certificate(UniPoly([0, 1]), SosCertificate("odd", 0, UniPoly([1]), UniPoly([]))) == 0
    cert = SosCertificate("odd", 1, UniPoly([-2, 4]), UniPoly([]))
    assert verify_certificate(UniPoly([0, 4, -16, 16]), cert) <= 1e-12
    wrong = SosCertificate("even", 1, UniPoly([0, 1]), UniPoly([]))
    assert verify_certificate(UniPoly([1, 0, 1]), wrong) == 1.0


def test_not_nonnegative():
    with pytest.raises(NotNonnegativeError):
        sos_decompose(UniPoly([0, -3, 4]))
    with pytest.raises(NotNonnegativeError):
        sos_decompose(UniPoly([-1.0]))


def test_formal_degree_sets_parity():
    c = sos_decompose(UniPoly([1.0]), degree=1)
    assert c.parity == "odd" and verify_certificate(UniPoly([1.0]), c) <= 1e-12
    c = sos_decompose(UniPoly([0, 1]), degree=2)
    assert c.parity == "even" and verify_certificate(UniPoly([0, 1]), c) <= 1e-12


def test_certificate_json_round_trip():
    c = sos_decompose(UniPoly([0, 4, -16, 16]))
    back = SosCertificate.from_json(c.to_json())
    assert back.parity == c.parity and back.d == c.d
    assert back.s1 == c.s1 and back.s2 == c.s2


def test_constructed_round_trip(rng):
    for _ in range(300):
        parity = "odd" if rng.random() < 0.5 else "even"
        d = int(rng.integers(0 if parity == "odd" else 1, 5))
        p = constructed(rng, parity, d)
        c = sos_decompose(p)
        assert verify_certificate(p, c) <= 1e-8 * max(1.0, p.scale)


def test_sos_with_outside_and_complex_roots(rng):
    for _ in range(200):
        roots = list(rng.uniform(-3, -0.01, rng.integers(0, 3))) + list(rng.uniform(1.01, 4, rng.integers(0, 3)))
        p = UniPoly.from_roots(roots, lead=1.0)
        p = p * UniPoly([1, 0, 1]) * UniPoly.from_roots([0.3, 0.3])
        if not is_nonnegative_on_unit(p):
            p = -p
        c = sos_decompose(p)
        assert verify_certificate(p, c) <= 1e-8 * max(1.0, p.scale)


def expand_even(A, B, d):
    # lam^2 L^T A L + lam (1 - lam) L^T B L with L = (1, lam, ..., lam^(d-1))
    a = np.zeros(2 * d + 1)
    b = np.zeros(2 * d + 1)
    for i in range(d):
        for j in range(d):
            a[i + j + 2] += A[i, j]
            b[i + j + 1] += B[i, j]
    return a + b - np.concatenate([[0.0], b[:-1]])


def expand_odd(A, B, d):
    # lam L_{d+1}^T A L_{d+1} + (1 - lam) lam^2 L_d^T B L_d
    out = np.zeros(2 * d + 2)
    for i in range(d + 1):
        for j in range(d + 1):
            out[i + j + 1] += A[i, j]
    for i in range(d):
        for j in range(d):
            out[i + j + 2] += B[i, j]
            out[i + j + 3] -= B[i, j]
    return out


@pytest.mark.parametrize("D", range(1, 9))
def test_gram_system_matches_direct_expansion(D, rng):
    S = build_gram_system(D)
    d = D // 2
    for _ in range(5):
        A = rng.normal(size=(S.size_a, S.size_a))
        A = A + A.T
        B = rng.normal(size=(S.size_b, S.size_b))
        B = B + B.T
        direct = expand_even(A, B, d) if D % 2 == 0 else expand_odd(A, B, d)
        assert np.allclose(S.apply(A, B), direct[1: D + 1], atol=1e-12)
        # nothing beyond the degree leaks in
        assert np.allclose(direct[D + 1:], 0.0)


def test_gram_quadratic_reduction():
    S = build_gram_system(2)
    A, B = np.array([[3.0]]), np.array([[2.0]])
    assert np.allclose(S.apply(A, B), [2.0, 3.0 - 2.0])


def test_gram_closure_example():
    g = closure_poly()
    S, taylor = gram_system(g, [1, -2], [-1, 0])
    assert (S.parity, S.d) == ("odd", 1)
    assert np.allclose(taylor, [0, 4, -16, 16])
    w = gram_witness(g, [1, -2], [-1, 0])
    assert np.allclose(w.A, [[4, -8], [-8, 16]]) and np.allclose(w.B, [[0]])
    assert S.residual(w.A, w.B, taylor) <= 1e-12


def test_gram_witness_none_and_circle():
    assert gram_witness(quad_poly(), [0, 0, 0], [1, 2, 2]) is None
    circle = MultiPoly(2, [(1.0, (2, 0)), (1.0, (0, 2)), (-1.0, (0, 0))])
    w = gram_witness(circle, [2, 0], [1, 0])
    S, taylor = gram_system(circle, [2, 0], [1, 0])
    assert np.allclose(taylor, [0, 2, 1])
    assert w.B[0, 0] == pytest.approx(2.0)
    assert S.residual(w.A, w.B, taylor) <= 1e-8 and w.is_psd()


def test_gram_witness_off_surface():
    with pytest.raises(OffSurfaceError):
        gram_witness(closure_poly(), [1, -2], [0.5, 0.5])


def test_witness_iff_nonnegative_and_quadratic_reduction(rng):
    for _ in range(60):
        inst = random_quadratic_instance(rng)
        alpha, beta = polar_halfspace(inst.g, inst.xbar)
        for x in random_surface_points(inst, rng, 5):
            S, taylor = gram_system(inst.g, inst.xbar, x)
            w = gram_witness(inst.g, inst.xbar, x, tol=inst.surface_tol)
            p = UniPoly(np.concatenate([[0.0], taylor[1:]]))
            assert (w is not None) == is_nonnegative_on_unit(p)
            assert (w is not None) == (taylor[1] >= -1e-8)
            assert (w is not None) == (alpha @ x + beta >= -1e-8)
            if w is not None:
                assert S.residual(w.A, w.B, taylor) <= 1e-8
                assert w.min_eigenvalue() >= -1e-9


def test_expand_against_numpy(rng):
    c = SosCertificate("even", 2, UniPoly(rng.normal(size=3)), UniPoly(rng.normal(size=2)))
    ref = P.polyadd(P.polymul(c.s1.coeffs, c.s1.coeffs),
                    P.polymul([0, 1, -1], P.polymul(c.s2.coeffs, c.s2.coeffs)))
    assert np.allclose(c.expand().coeffs, ref)
