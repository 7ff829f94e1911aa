"""Dense univariate polynomials and Sturm-sequence root decisions.

Coefficients are stored in ascending order: ``coeffs[i]`` multiplies
``lam**i``. All decisions are made in floating point with relative
tolerances; the chains are built on the square-free part so that repeated
roots never change a count.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

#: relative threshold for treating a value or low-order coefficient as zero
ROOT_TOL = 1e-12
#: relative size below which a Euclidean remainder is taken to vanish
GCD_TOL = 1e-10
#: relative tolerance of the nonnegativity test
NONNEG_TOL = 1e-10


class ZeroPolynomialError(ValueError):
    pass


class UniPoly:
    """Univariate polynomial with real coefficients (ascending order)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[float]):
        c = np.array(coeffs, dtype=float).reshape(-1)
        if c.size == 0:
            c = np.zeros(1)
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c.flags.writeable = False
        self.coeffs = c

    @classmethod
    def from_roots(cls, roots, lead: float = 1.0) -> "UniPoly":
        c = np.array([lead])
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    @property
    def lead(self) -> float:
        return float(self.coeffs[-1])

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        for c in self.coeffs[::-1]:
            out = out * lam + c
        return out if out.ndim else float(out)

    def abs_eval(self, lam: float) -> float:
        """``sum |c_k| |lam|^k``, the scale of rounding error at ``lam``."""
        out = 0.0
        a = abs(lam)
        for c in self.coeffs[::-1]:
            out = out * a + abs(c)
        return out

    def derivative(self) -> "UniPoly":
        if self.coeffs.size == 1:
            return UniPoly([0.0])
        return UniPoly(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def trim(self, rel_tol: float) -> "UniPoly":
        """Drop leading coefficients below ``rel_tol * max|coeff|``."""
        if self.is_zero:
            return self
        c = self.coeffs
        keep = np.nonzero(np.abs(c) > rel_tol * np.max(np.abs(c)))[0]
        return UniPoly(c[: keep[-1] + 1])

    def normalized(self) -> "UniPoly":
        """Positive multiple with unit max-abs coefficient (signs preserved)."""
        if self.is_zero:
            return self
        return UniPoly(self.coeffs / self.scale)

    def __add__(self, other):
        other = _as_uni(other)
        n = max(self.coeffs.size, other.coeffs.size)
        out = np.zeros(n)
        out[: self.coeffs.size] += self.coeffs
        out[: other.coeffs.size] += other.coeffs
        return UniPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-self.coeffs)

    def __sub__(self, other):
        return self + (-_as_uni(other))

    def __rsub__(self, other):
        return _as_uni(other) - self

    def __mul__(self, other):
        other = _as_uni(other)
        return UniPoly(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def allclose(self, other: "UniPoly", tol: float = 1e-12) -> bool:
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n)
        b = np.zeros(n)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        return bool(np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(a))))

    def __repr__(self):
        return f"UniPoly({self.coeffs.tolist()})"


def _as_uni(p) -> UniPoly:
    if isinstance(p, UniPoly):
        return p
    return UniPoly([float(p)])


def derivative(p: UniPoly) -> UniPoly:
    return p.derivative()


def polydivmod(a: UniPoly, b: UniPoly) -> tuple[UniPoly, UniPoly]:
    """Long division ``a = q * b + r`` with ``deg r < deg b``."""
    if b.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    num = a.coeffs.copy()
    den = b.coeffs
    db = den.size - 1
    if num.size - 1 < db:
        return UniPoly([0.0]), a
    q = np.zeros(num.size - db)
    for k in range(num.size - 1, db - 1, -1):
        coef = num[k] / den[-1]
        q[k - db] = coef
        num[k - db : k + 1] -= coef * den
    r = num[:db] if db > 0 else np.zeros(1)
    return UniPoly(q), UniPoly(r)


def _clean(r: UniPoly, ref: float, tol: float) -> UniPoly:
    if r.is_zero:
        return r
    c = r.coeffs.copy()
    c[np.abs(c) <= tol * ref] = 0.0
    return UniPoly(c)


def poly_gcd(a: UniPoly, b: UniPoly, tol: float = GCD_TOL) -> UniPoly:
    """Approximate gcd by the Euclidean algorithm on normalized remainders."""
    if a.is_zero:
        return b.normalized()
    if b.is_zero:
        return a.normalized()
    a = a.normalized()
    b = b.normalized()
    if a.degree < b.degree:
        a, b = b, a
    while b.degree > 0:
        _, r = polydivmod(a, b)
        r = _clean(r, 1.0, 1e-13)
        if r.is_zero or r.scale <= tol:
            return b
        a, b = b, r.normalized()
    return UniPoly([1.0])


def squarefree_part(p: UniPoly) -> UniPoly:
    if p.is_zero:
        raise ZeroPolynomialError("square-free part of the zero polynomial")
    if p.degree <= 1:
        return p.normalized()
    g = poly_gcd(p, p.derivative())
    if g.degree <= 0:
        return p.normalized()
    q, _ = polydivmod(p.normalized(), g)
    return q.normalized()


def sturm_chain(q: UniPoly) -> list[UniPoly]:
    """Sturm sequence of ``q`` with each member rescaled by a positive factor."""
    chain = [q.normalized()]
    if q.degree <= 0:
        return chain
    chain.append(q.derivative().normalized())
    while chain[-1].degree > 0:
        _, r = polydivmod(chain[-2], chain[-1])
        r = _clean(r, 1.0, 1e-13)
        if r.is_zero or r.scale <= GCD_TOL:
            break
        chain.append((-r).normalized())
    return chain


def sign_variations(chain: Sequence[UniPoly], x: float) -> int:
    signs = []
    for f in chain:
        v = f(x)
        if abs(v) <= ROOT_TOL * max(f.abs_eval(x), 1e-300):
            continue
        signs.append(v > 0)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _chain_count(chain, a: float, b: float) -> int:
    return max(0, sign_variations(chain, a) - sign_variations(chain, b))


def sturm_count(p: UniPoly, a: float, b: float) -> int:
    """Number of distinct real roots of ``p`` in ``(a, b]``."""
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if p.is_zero:
        raise ZeroPolynomialError("root count of the zero polynomial")
    if p.degree == 0:
        return 0
    return _chain_count(sturm_chain(squarefree_part(p)), a, b)


def _isolate(chain, a: float, b: float, width: float) -> list[tuple[float, float]]:
    """Disjoint half-open intervals ``(lo, hi]`` each holding exactly one root."""
    out = []
    stack = [(a, b, _chain_count(chain, a, b))]
    while stack:
        lo, hi, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            while hi - lo > width:
                mid = 0.5 * (lo + hi)
                if _chain_count(chain, lo, mid) >= 1:
                    hi = mid
                else:
                    lo = mid
            out.append((lo, hi))
            continue
        if hi - lo <= width:
            # unresolved cluster: report once
            out.append((lo, hi))
            continue
        mid = 0.5 * (lo + hi)
        stack.append((mid, hi, _chain_count(chain, mid, hi)))
        stack.append((lo, mid, _chain_count(chain, lo, mid)))
    out.sort()
    return out


def deflate_at_zero(p: UniPoly) -> tuple[UniPoly, int]:
    """Split ``p = lam**k * q`` with ``q(0)`` clearly nonzero."""
    if p.is_zero:
        raise ZeroPolynomialError("cannot deflate the zero polynomial")
    c = p.coeffs
    thresh = ROOT_TOL * np.max(np.abs(c))
    k = 0
    while k < c.size - 1 and abs(c[k]) <= thresh:
        k += 1
    return UniPoly(c[k:]), k


def is_positive_on_unit_halfopen(p: UniPoly) -> bool:
    """True iff ``p(lam) > 0`` for every ``lam`` in ``(0, 1]``.

    The zero polynomial is not positive anywhere and yields ``False``.
    """
    if p.is_zero:
        return False
    q, _ = deflate_at_zero(p)
    if q(0.0) <= 0.0:
        return False
    if q(1.0) <= ROOT_TOL * q.abs_eval(1.0):
        return False
    if q.degree == 0:
        return True
    return sturm_count(q, 0.0, 1.0) == 0


def is_nonnegative_on_unit(p: UniPoly) -> bool:
    """True iff ``p >= 0`` on ``[0, 1]`` (up to ``1e-10 * max|coeff|``).

    Roots of the square-free part split ``[0, 1]`` into pieces on which ``p``
    has constant sign; one sample per piece decides.
    """
    if p.is_zero:
        return True
    tol = NONNEG_TOL * p.scale
    if p(0.0) < -tol or p(1.0) < -tol:
        return False
    if p.degree <= 0:
        return True
    chain = sturm_chain(squarefree_part(p))
    cuts = [0.0] + [0.5 * (lo + hi) for lo, hi in _isolate(chain, 0.0, 1.0, 1e-12)] + [1.0]
    for a, b in zip(cuts, cuts[1:]):
        if b - a <= 0.0:
            continue
        if p(0.5 * (a + b)) < -tol:
            return False
    return True


def real_roots(p: UniPoly, a: float = 0.0, b: float = 1.0) -> list[tuple[float, int]]:
    """Real roots in ``[a, b]`` with multiplicities, refined to width 1e-12.

    Multiplicity of a root is the number of members of the chain
    ``p, gcd(p, p'), gcd(gcd, gcd'), ...`` that vanish near it.
    """
    if p.is_zero:
        raise ZeroPolynomialError("roots of the zero polynomial")
    if p.degree <= 0:
        return []
    q = squarefree_part(p)
    chain = sturm_chain(q)
    roots = []
    if abs(q(a)) <= ROOT_TOL * q.abs_eval(a):
        roots.append(a)
    if a < b:
        roots += [0.5 * (lo + hi) for lo, hi in _isolate(chain, a, b, 1e-12)]

    gcd_chain = [p]
    while gcd_chain[-1].degree > 0:
        nxt = poly_gcd(gcd_chain[-1], gcd_chain[-1].derivative())
        if nxt.degree <= 0:
            break
        gcd_chain.append(nxt)

    delta = 1e-6
    out = []
    for r in roots:
        mult = 0
        for f in gcd_chain:
            fq = squarefree_part(f)
            if abs(fq(r)) <= 1e-9 * fq.abs_eval(r) or sturm_count(fq, r - delta, r + delta) >= 1:
                mult += 1
            else:
                break
        mult = max(mult, 1)
        out.append((float(min(max(_polish(p, r, mult), a), b)), mult))
    return out


def _polish(p: UniPoly, r: float, mult: int, steps: int = 4) -> float:
    """Newton steps on the derivative of order ``mult - 1``, where ``r`` is simple.

    The square-free part comes from a floating gcd, so its roots can sit a
    few ulps-times-condition away from the true multiple root of ``p``.
    """
    f = p
    for _ in range(mult - 1):
        f = f.derivative()
    df = f.derivative()
    x = r
    for _ in range(steps):
        d = df(x)
        if d == 0.0:
            break
        step = f(x) / d
        if not np.isfinite(step) or abs(step) > 1e-8:
            break
        x -= step
    # keep the polished value only if it is at least as good
    return x if abs(f(x)) <= abs(f(r)) else r
