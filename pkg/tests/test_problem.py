from fractions import Fraction as F

import numpy as np
import pytest

from l1path import FLOAT, RATIONAL, Problem
from l1path.problem import DimensionError


def test_backend_inference():
    assert Problem([[1, 2]], [3]).field is RATIONAL
    assert Problem(np.array([[1.0, 2.0]]), [3]).field is FLOAT
    assert Problem([["1/2", "3"]], ["1"]).backend == "rational"
    assert Problem([[1, 2]], [3], backend="float").field is FLOAT


def test_defaults_and_caches():
    p = Problem([[1, 2], [0, 1]], [1, 1], [1, 0])
    assert p.shape == (2, 2) and p.m == 2 and p.n == 2
    assert list(p.gram.reshape(-1)) == [1, 2, 2, 5]
    assert list(p.Kty) == [1, 3]
    assert list(p.penalized) == [0] and list(p.unpenalized) == [1]
    assert list(Problem([[1, 2]], [3]).w) == [1, 1]


@pytest.mark.parametrize("K, y, w", [
    ([[1, 2]], [1, 2], None),
    ([1, 2], [1], None),
    ([[1, 2]], [1], [1]),
    (np.zeros((0, 2), dtype=int), [], None),
])
def test_dimension_errors(K, y, w):
    with pytest.raises(DimensionError):
        Problem(K, y, w)


def test_value_errors():
    with pytest.raises(ValueError):
        Problem([[1]], [1], [-1])
    with pytest.raises(ValueError):
        Problem([[np.inf]], [1.0])
    with pytest.raises(TypeError):
        Problem([[0.5]], [1], backend="rational")
    with pytest.raises(ValueError):
        Problem([[1]], [1], backend="complex")


def test_conversions():
    p = Problem([[1, 2]], [3])
    assert p.with_weights([0, 1]).w[0] == 0
    fp = p.as_float()
    assert fp.field is FLOAT and fp.K.dtype == np.float64
    assert list(p.vector(["1/2", 1])) == [F(1, 2), 1]
    with pytest.raises(DimensionError):
        p.vector([1])
