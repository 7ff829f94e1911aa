import math

import numpy as np
import pytest

from visicut.polycore import MultiPoly
from visicut.visibility import make_instance

SQRT5 = math.sqrt(5.0)
# tightest box around the visible cap of the quad example (frozen from the KKT oracle)
QUAD_R = np.array([[-0.1, 1.0], [0.0, (23 + 3 * SQRT5) / 20], [0.0, (19 + 3 * SQRT5) / 20]])


def quad_poly():
    # 1 - x1 - x2 - x3 - x1 x2 + x1 x3 + x2 x3
    return MultiPoly(3, [
        (1.0, (0, 0, 0)), (-1.0, (1, 0, 0)), (-1.0, (0, 1, 0)), (-1.0, (0, 0, 1)),
        (-1.0, (1, 1, 0)), (1.0, (1, 0, 1)), (1.0, (0, 1, 1)),
    ])


def closure_poly():
    # (x1^2 + x2^2 - 1) x1
    return MultiPoly(2, [(1.0, (3, 0)), (1.0, (1, 2)), (-1.0, (1, 0))])


def example1_poly():
    return MultiPoly(2, [
        (-1.0, (2, 1)), (5.0, (1, 2)), (-1.0, (0, 2)), (-1.0, (0, 1)), (-2.0, (1, 0)), (2.0, (0, 0)),
    ])


def circle_poly():
    return MultiPoly(2, [(1.0, (2, 0)), (1.0, (0, 2)), (-1.0, (0, 0))])


@pytest.fixture
def quad_inst():
    return make_instance(quad_poly(), [-0.1, 0, 0], [2, 2, 2], [0, 0, 0])


@pytest.fixture
def closure_inst():
    return make_instance(closure_poly(), [-2, -3], [2, 3], [1, -2])


@pytest.fixture
def example1_inst():
    return make_instance(example1_poly(), [-0.5, -0.5], [3, 3], [0, 0])


@pytest.fixture
def circle_inst():
    return make_instance(circle_poly(), [-2, -2], [2, 2], [2, 0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
