"""Cutting planes tightened by the visible part of a polynomial constraint."""

__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402
from .polycore import IntervalVector, MultiPoly  # noqa: E402
from .unipoly import UniPoly  # noqa: E402
from .visibility import (  # noqa: E402
    ConvexDomain,
    LinearConstraint,
    ProblemInstance,
    RegionDescription,
    in_relaxation,
    is_visible,
    polar_halfspace,
    region_description,
)

__all__ = [
    "BACKEND",
    "ConvexDomain",
    "IntervalVector",
    "LinearConstraint",
    "MultiPoly",
    "ProblemInstance",
    "RegionDescription",
    "UniPoly",
    "in_relaxation",
    "is_visible",
    "polar_halfspace",
    "region_description",
]
