"""Weighted sum-of-squares certificates for nonnegativity on [0, 1].

Every polynomial nonnegative on ``[0, 1]`` can be written as

* ``s1^2 + lam (1 - lam) s2^2`` when its (formal) degree is even, or
* ``lam s1^2 + (1 - lam) s2^2`` when it is odd.

The decomposition is built from the real factorization: linear factors with a
root outside ``(0, 1)`` are of the form ``a lam + b (1 - lam)`` with
``a, b >= 0``, quadratics without interior roots are ``A^2 + lam (1 - lam) B^2``,
and products of such forms are merged with the two-square identity. Rank-one
Gram matrices then follow from the coefficient vectors of the squared factors.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .polycore import MultiPoly, as_point
from .unipoly import UniPoly, deflate_at_zero, is_nonnegative_on_unit

RESIDUAL_TOL = 1e-8
IMAG_TOL = 1e-7
SNAP_TOL = 1e-9
PSD_TOL = 1e-9

_W = UniPoly([0.0, 1.0, -1.0])  # lam (1 - lam)
_LAM = UniPoly([0.0, 1.0])
_ONE_MINUS = UniPoly([1.0, -1.0])


class NotNonnegativeError(ValueError):
    pass


class CertificateError(ArithmeticError):
    """Construction finished but the expansion misses ``p`` beyond tolerance."""


class OffSurfaceError(ValueError):
    pass


@dataclass(frozen=True)
class SosCertificate:
    parity: str  # "even" or "odd"
    d: int
    s1: UniPoly
    s2: UniPoly

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")

    @property
    def degree(self) -> int:
        return 2 * self.d + (self.parity == "odd")

    def expand(self) -> UniPoly:
        if self.parity == "even":
            return self.s1 * self.s1 + _W * self.s2 * self.s2
        return _LAM * self.s1 * self.s1 + _ONE_MINUS * self.s2 * self.s2

    def to_json(self) -> dict:
        return {
            "parity": self.parity,
            "d": self.d,
            "s1": self.s1.coeffs.tolist(),
            "s2": self.s2.coeffs.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SosCertificate":
        return cls(data["parity"], int(data["d"]), UniPoly(data["s1"]), UniPoly(data["s2"]))


def verify_certificate(p: UniPoly, cert: SosCertificate) -> float:
    """Max-norm coefficient difference between ``p`` and the expansion."""
    q = cert.expand()
    n = max(p.coeffs.size, q.coeffs.size)
    a = np.zeros(n)
    b = np.zeros(n)
    a[: p.coeffs.size] = p.coeffs
    b[: q.coeffs.size] = q.coeffs
    return float(np.max(np.abs(a - b)))


# forms used during construction: "even" is (A, B) for A^2 + w B^2,
# a linear factor is (a, b) for a lam + b (1 - lam)


def _mul_even(e1, e2):
    A1, B1 = e1
    A2, B2 = e2
    return (A1 * A2 + _W * B1 * B2, A1 * B2 - A2 * B1)


def _pair_linear(l1, l2):
    (a1, b1), (a2, b2) = l1, l2
    A = UniPoly([sqrt(b1 * b2), sqrt(a1 * a2) - sqrt(b1 * b2)])
    B = UniPoly([sqrt(a1 * b2) - sqrt(a2 * b1)])
    return (A, B)


def _positive_quadratic(q2: float, q1: float, q0: float):
    """``q2 lam^2 + q1 lam + q0`` without roots in (0, 1) as an even form."""
    v0 = max(q0, 0.0)
    v1 = max(q2 + q1 + q0, 0.0)
    b = sqrt(v0)
    a = -(sqrt(v1) + b)
    c = sqrt(max(a * a - q2, 0.0))
    return (UniPoly([b, a]), UniPoly([c]))


def _classify_roots(q: UniPoly):
    """Split the roots of ``q`` into linear factors, interior pairs and quadratics."""
    roots = np.roots(q.coeffs[::-1]) if q.degree > 0 else np.array([])
    linear = []
    interior = []
    quads = []
    flips = 0
    for z in roots:
        if abs(z.imag) > IMAG_TOL * max(1.0, abs(z)):
            if z.imag > 0:
                quads.append((1.0, -2.0 * z.real, abs(z) ** 2))
            continue
        r = float(z.real)
        if abs(r) <= SNAP_TOL:
            r = 0.0
        elif abs(r - 1.0) <= SNAP_TOL:
            r = 1.0
        if r <= 0.0:
            linear.append((1.0 - r, -r))
        elif r >= 1.0:
            linear.append((r - 1.0, r))
            flips += 1
        else:
            interior.append(r)
    interior.sort()
    if len(interior) % 2:
        # an odd leftover can only be a boundary root pushed inside by rounding
        k = min(range(len(interior)), key=lambda i: min(interior[i], 1.0 - interior[i]))
        r = interior.pop(k)
        if r < 0.5:
            linear.append((1.0, 0.0))
        else:
            linear.append((0.0, 1.0))
            flips += 1
    pairs = [(interior[i], interior[i + 1]) for i in range(0, len(interior), 2)]
    return linear, pairs, quads, flips


def sos_decompose(p: UniPoly, degree: int | None = None) -> SosCertificate:
    """Certificate of nonnegativity of ``p`` on ``[0, 1]``.

    ``degree`` is the formal degree deciding the parity (defaults to the
    actual degree); it may exceed the actual degree.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has no certificate of this form")
    D = p.degree if degree is None else int(degree)
    if D < p.degree:
        raise ValueError(f"formal degree {D} is below the actual degree {p.degree}")
    if not is_nonnegative_on_unit(p):
        raise NotNonnegativeError("not nonnegative on [0, 1]")

    q, k = deflate_at_zero(p)
    linear, pairs, quads, flips = _classify_roots(q)
    linear = [(1.0, 0.0)] * k + linear
    const = q.lead * (-1.0) ** flips
    if const <= 0.0:
        raise NotNonnegativeError("not nonnegative on [0, 1] (negative leading factor)")
    if (len(linear) % 2) != (D % 2):
        linear.append((1.0, 1.0))  # 1 = lam + (1 - lam) lifts the formal degree

    even = (UniPoly([1.0]), UniPoly([0.0]))
    for m1, m2 in pairs:
        even = _mul_even(even, (UniPoly([-0.5 * (m1 + m2), 1.0]), UniPoly([0.0])))
    for qq in quads:
        even = _mul_even(even, _positive_quadratic(*qq))
    odd_left = linear.pop() if len(linear) % 2 else None
    for i in range(0, len(linear), 2):
        even = _mul_even(even, _pair_linear(linear[i], linear[i + 1]))

    scale = sqrt(const)
    A, B = even
    d = D // 2
    if odd_left is None:
        cert = SosCertificate("even", d, A * scale, B * scale)
    else:
        C, Dd = sqrt(odd_left[0]), sqrt(odd_left[1])
        P = A * C + _ONE_MINUS * B * Dd
        R = _LAM * B * C - A * Dd
        cert = SosCertificate("odd", d, P * scale, R * scale)

    res = verify_certificate(p, cert)
    if res > RESIDUAL_TOL * p.scale:
        raise CertificateError(f"certificate residual {res:.3g} exceeds tolerance")
    return cert


@dataclass(frozen=True)
class GramSystem:
    """Linear equations linking Gram matrices ``A``, ``B`` to Taylor coefficients.

    Row ``r`` reads ``<MA[r], A> + <MB[r], B> = taylor[r + 1]``.
    """

    parity: str
    d: int
    MA: np.ndarray
    MB: np.ndarray

    @property
    def size_a(self) -> int:
        return self.MA.shape[1]

    @property
    def size_b(self) -> int:
        return self.MB.shape[1]

    def apply(self, A, B) -> np.ndarray:
        A = np.asarray(A, dtype=float).reshape(self.size_a, self.size_a)
        B = np.asarray(B, dtype=float).reshape(self.size_b, self.size_b)
        return np.einsum("rij,ij->r", self.MA, A) + np.einsum("rij,ij->r", self.MB, B)

    def residual(self, A, B, taylor) -> float:
        rhs = np.asarray(taylor, dtype=float)[1:]
        return float(np.max(np.abs(self.apply(A, B) - rhs), initial=0.0))


def _antidiag(size: int, s: int) -> np.ndarray:
    """Indicator of the entries with ``i + j == s``."""
    i, j = np.indices((size, size))
    return (i + j == s).astype(float)


def build_gram_system(D: int) -> GramSystem:
    if D < 1:
        raise ValueError("the system needs degree >= 1")
    d = D // 2
    if D % 2 == 0:
        na = nb = d
        MA = np.zeros((D, na, na))
        MB = np.zeros((D, nb, nb))
        MB[0, 0, 0] = 1.0  # m = 1: B00
        for k in range(0, 2 * d - 1):  # m = k + 2
            MA[k + 1] += _antidiag(na, k)
            MB[k + 1] += _antidiag(nb, k + 1) - _antidiag(nb, k)
        return GramSystem("even", d, MA, MB)
    na, nb = d + 1, d
    MA = np.zeros((D, na, na))
    MB = np.zeros((D, nb, nb))
    MA[0, 0, 0] = 1.0  # m = 1: A00
    if D >= 2:
        MA[1] += _antidiag(na, 1)  # m = 2: 2 A01 + B00
        MB[1, 0, 0] = 1.0
    for k in range(0, 2 * d - 1):  # m = k + 3
        MA[k + 2] += _antidiag(na, k + 2)
        MB[k + 2] += _antidiag(nb, k + 1) - _antidiag(nb, k)
    return GramSystem("odd", d, MA, MB)


def gram_system(g: MultiPoly, xbar, x) -> tuple[GramSystem, np.ndarray]:
    """The system for ``deg g`` and the Taylor coefficients of the segment at 0."""
    D = g.degree
    if D < 1:
        raise ValueError("g must have degree >= 1")
    p = g.restrict_to_segment(as_point(x, g.n), as_point(xbar, g.n))
    taylor = np.zeros(D + 1)
    taylor[: p.coeffs.size] = p.coeffs
    return build_gram_system(D), taylor


@dataclass(frozen=True)
class GramWitness:
    A: np.ndarray
    B: np.ndarray

    def min_eigenvalue(self) -> float:
        vals = [np.min(np.linalg.eigvalsh(M)) for M in (self.A, self.B) if M.size]
        return float(min(vals, default=0.0))

    def is_psd(self) -> bool:
        scale = max(1.0, float(np.trace(self.A)) + float(np.trace(self.B)))
        return self.min_eigenvalue() >= -PSD_TOL * scale


def _padded(c: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size)
    m = min(size, c.size)
    out[:m] = c[:m]
    return out


def gram_witness(g: MultiPoly, xbar, x, tol: float = 1e-9) -> GramWitness | None:
    """Rank-one Gram matrices for the segment at ``x``, or None outside the relaxation."""
    x = as_point(x, g.n)
    gx = g(x)
    if abs(gx) > tol:
        raise OffSurfaceError(f"g(x) = {gx:.3g} is not on the surface")
    system, taylor = gram_system(g, xbar, x)
    c = taylor.copy()
    c[0] = 0.0
    p = UniPoly(c)
    na, nb = system.size_a, system.size_b
    if p.is_zero:
        return GramWitness(np.zeros((na, na)), np.zeros((nb, nb)))
    if not is_nonnegative_on_unit(p):
        return None
    cert = sos_decompose(p, degree=g.degree)
    if cert.parity == "even":
        c1 = _padded(cert.s1.coeffs[1:], na)  # s1 = lam r1
        c2 = _padded(cert.s2.coeffs, nb)
    else:
        c1 = _padded(cert.s1.coeffs, na)
        c2 = _padded(cert.s2.coeffs[1:], nb)  # s2 = lam r2
    return GramWitness(np.outer(c1, c1), np.outer(c2, c2))
