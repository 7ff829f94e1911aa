"""Visibility predicates and implicit descriptions of the visible region.

A surface point ``x`` (``g(x) = 0``) is visible from ``xbar`` when
``g`` stays strictly positive on the half-open segment ``(x, xbar]``; it is
in the relaxation when ``g`` stays nonnegative on the closed segment. Both
are decided on the univariate restriction ``p(lam) = g(x + lam (xbar - x))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .polycore import IntervalVector, MultiPoly, as_point, dot_gradient
from .unipoly import (
    UniPoly,
    is_nonnegative_on_unit,
    is_positive_on_unit_halfopen,
)

#: absolute tolerance for membership in the convex domain
DOMAIN_TOL = 1e-9
#: relative surface band, scaled by 1 + the range of |g| over the box
SURFACE_REL_TOL = 1e-9

SENSES = ("<=", ">=")


class InstanceError(ValueError):
    """An instance violates its invariants (xbar outside C, g(xbar) <= 0, ...)."""


class OutsideDomainError(ValueError):
    pass


@dataclass(frozen=True)
class LinearConstraint:
    a: np.ndarray
    sense: str
    rhs: float

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(-1)
        if self.sense not in SENSES:
            raise ValueError(f"sense must be one of {SENSES}, got {self.sense!r}")
        if not (np.all(np.isfinite(a)) and np.isfinite(self.rhs)):
            raise ValueError("linear constraint must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "rhs", float(self.rhs))

    def as_geq(self) -> tuple[np.ndarray, float]:
        """Return ``(a', r')`` with the constraint rewritten as ``a'x >= r'``."""
        if self.sense == ">=":
            return self.a, self.rhs
        return -self.a, -self.rhs

    def slack(self, x) -> float:
        """Signed slack; negative means violated."""
        a, r = self.as_geq()
        return float(a @ np.asarray(x, dtype=float) - r)

    def __eq__(self, other):
        if not isinstance(other, LinearConstraint):
            return NotImplemented
        return (
            self.sense == other.sense
            and self.rhs == other.rhs
            and np.array_equal(self.a, other.a)
        )

    def __hash__(self):
        return hash((self.a.tobytes(), self.sense, self.rhs))


@dataclass(frozen=True)
class ConvexDomain:
    """Box intersected with finitely many linear inequalities."""

    box: IntervalVector
    linear: tuple[LinearConstraint, ...] = ()

    def __post_init__(self):
        lin = tuple(self.linear)
        for c in lin:
            if c.a.size != self.box.n:
                raise ValueError(
                    f"linear constraint has {c.a.size} coefficients, domain has n={self.box.n}"
                )
        object.__setattr__(self, "linear", lin)

    @property
    def n(self) -> int:
        return self.box.n

    def violation(self, x) -> float:
        """Largest constraint violation at ``x`` (0 when feasible)."""
        x = as_point(x, self.n)
        v = max(
            float(np.max(self.box.lo - x, initial=0.0)),
            float(np.max(x - self.box.hi, initial=0.0)),
        )
        for c in self.linear:
            v = max(v, -c.slack(x))
        return max(v, 0.0)

    def contains(self, x, tol: float = DOMAIN_TOL) -> bool:
        return self.violation(x) <= tol

    def feasible_mask(self, X: np.ndarray, tol: float = 0.0) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        ok = np.all((X >= self.box.lo - tol) & (X <= self.box.hi + tol), axis=1)
        for c in self.linear:
            a, r = c.as_geq()
            ok &= X @ a - r >= -tol
        return ok


@dataclass(frozen=True)
class ProblemInstance:
    """Separation instance: ``S = {x in C : g(x) <= 0}`` and a point ``xbar``."""

    g: MultiPoly
    C: ConvexDomain
    xbar: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.g.n != self.C.n:
            raise InstanceError(f"g has n={self.g.n} but the domain has n={self.C.n}")
        xbar = as_point(self.xbar, self.C.n)
        xbar.flags.writeable = False
        object.__setattr__(self, "xbar", xbar)
        viol = self.C.violation(xbar)
        if viol > DOMAIN_TOL:
            raise InstanceError(f"xbar lies outside the domain (violation {viol:.3g})")
        gx = self.g(xbar)
        if not gx > 0.0:
            raise InstanceError(f"g(xbar) = {gx:.6g} must be positive")

    @property
    def n(self) -> int:
        return self.C.n

    @cached_property
    def surface_tol(self) -> float:
        lo, hi = self.g.interval_eval(self.C.box)
        return SURFACE_REL_TOL * (1.0 + max(abs(lo), abs(hi)))

    def segment(self, x) -> UniPoly:
        return self.g.restrict_to_segment(x, self.xbar)


def _checked_point(inst: ProblemInstance, x) -> np.ndarray:
    x = as_point(x, inst.n)
    viol = inst.C.violation(x)
    if viol > DOMAIN_TOL:
        raise OutsideDomainError(f"outside domain: point violates C by {viol:.3g}")
    return x


def _surface_segment(inst: ProblemInstance, x) -> UniPoly | None:
    """Segment polynomial with the constant term zeroed, or None if off-surface."""
    x = _checked_point(inst, x)
    gx = inst.g(x)
    if abs(gx) > inst.surface_tol:
        return None
    p = inst.segment(x)
    c = p.coeffs.copy()
    c[0] = 0.0
    return UniPoly(c)


def is_visible(inst: ProblemInstance, x) -> bool:
    """True iff ``x`` is on the surface and ``g > 0`` on ``(x, xbar]``."""
    p = _surface_segment(inst, x)
    if p is None:
        return False
    return is_positive_on_unit_halfopen(p)


def in_relaxation(inst: ProblemInstance, x) -> bool:
    """True iff ``x`` is on the surface and ``g >= 0`` on ``[x, xbar]``."""
    p = _surface_segment(inst, x)
    if p is None:
        return False
    return is_nonnegative_on_unit(p)


def polar_halfspace(g: MultiPoly, xbar) -> tuple[np.ndarray, float]:
    """Halfspace ``alpha @ x + beta >= 0`` cutting the visible cap of a quadric.

    With ``g = x'Qx + b'x + c`` (Q symmetric): ``alpha = 2 Q xbar + b`` and
    ``beta = b'xbar + 2c``. On the surface ``alpha @ x + beta`` equals the
    derivative at 0 of the segment restriction, which is what decides
    visibility for a quadratic.
    """
    if g.degree > 2:
        raise ValueError(f"polar halfspace needs deg(g) <= 2, got {g.degree}")
    xbar = as_point(xbar, g.n)
    Q, b, c = g.quadratic_form()
    alpha = 2.0 * Q @ xbar + b
    beta = float(b @ xbar + 2.0 * c)
    return alpha, beta


EXACT_QUADRATIC = "exact_quadratic"
GRADIENT_RELAXATION = "gradient_relaxation"


@dataclass(frozen=True)
class RegionDescription:
    """``{x in C : g(x) = 0, guard(x) >= 0}``.

    The guard is the affine ``alpha @ x + beta`` for quadratics and the
    polynomial ``h(x) = <grad g(x), xbar - x>`` otherwise.
    """

    kind: str
    surface: MultiPoly
    domain: ConvexDomain
    alpha: np.ndarray | None = None
    beta: float | None = None
    h: MultiPoly | None = None

    def __post_init__(self):
        if self.kind == EXACT_QUADRATIC:
            if self.alpha is None or self.beta is None:
                raise ValueError("exact_quadratic region needs alpha and beta")
            if self.surface.degree > 2:
                raise ValueError("exact_quadratic region needs deg(g) <= 2")
            alpha = np.array(self.alpha, dtype=float)
            alpha.flags.writeable = False
            object.__setattr__(self, "alpha", alpha)
            object.__setattr__(self, "beta", float(self.beta))
        elif self.kind == GRADIENT_RELAXATION:
            if self.h is None:
                raise ValueError("gradient_relaxation region needs h")
        else:
            raise ValueError(f"unknown region kind {self.kind!r}")

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def guard(self) -> MultiPoly:
        """The guard as a polynomial (affine for the quadratic case)."""
        if self.h is not None:
            return self.h
        n = self.n
        terms = [(float(a), tuple(int(i == j) for j in range(n))) for i, a in enumerate(self.alpha)]
        return MultiPoly(n, terms + [(self.beta, (0,) * n)])

    def guard_value(self, x) -> float:
        return float(self.guard(x))

    def contains(self, x, surface_tol: float, guard_tol: float = 1e-8) -> bool:
        return (
            self.domain.contains(x)
            and abs(self.surface(x)) <= surface_tol
            and self.guard_value(x) >= -guard_tol
        )


def gradient_guard(g: MultiPoly, xbar) -> MultiPoly:
    """``h(x) = <grad g(x), xbar - x>`` expanded as a polynomial."""
    n = g.n
    xbar = as_point(xbar, n)
    direction = [MultiPoly.constant(n, xbar[i]) - MultiPoly.variable(n, i) for i in range(n)]
    return dot_gradient(g, direction)


def region_description(inst: ProblemInstance) -> RegionDescription:
    if inst.g.degree <= 2:
        alpha, beta = polar_halfspace(inst.g, inst.xbar)
        return RegionDescription(EXACT_QUADRATIC, inst.g, inst.C, alpha=alpha, beta=beta)
    return RegionDescription(
        GRADIENT_RELAXATION, inst.g, inst.C, h=gradient_guard(inst.g, inst.xbar)
    )


def make_instance(
    g: MultiPoly,
    lo: Sequence[float],
    hi: Sequence[float],
    xbar: Sequence[float],
    linear: Sequence[LinearConstraint] = (),
) -> ProblemInstance:
    """Convenience constructor from raw box bounds."""
    box = IntervalVector(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    return ProblemInstance(g, ConvexDomain(box, tuple(linear)), np.asarray(xbar, dtype=float))
