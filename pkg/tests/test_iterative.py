import random
import warnings
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cases import IDENTITY_K, IDENTITY_Y, TIE_K, TIE_Y, random_integer_problem
from l1path import (
    DivergenceError, NonUniquePathError, Penalty, Problem, adaptive_landweber, adaptive_steepest_descent,
    find_minimizer, projected_landweber, projected_steepest_descent, solve_path, thresholded_landweber,
    verify_kkt,
)
from l1path.pathtools import interpolate


def _ident():
    return Problem(IDENTITY_K, IDENTITY_Y)


def test_landweber_identity_examples():
    assert list(thresholded_landweber(_ident(), 1).x) == [11, -7, 4, 0, 1]
    assert list(projected_landweber(_ident(), 10).x) == [7, -3, 0, 0, 0]
    assert list(adaptive_landweber(_ident(), 28, 4).x) == [12, -8, 5, 1, 2]


def test_adaptive_radius_schedule():
    res = adaptive_landweber(_ident(), 28, 4, collect=lambda s: (s.radius, s.l1norm),
                             stop=lambda s: s.counter >= 6)
    assert res.collected == [(0, 0), (7, 7), (14, 14), (21, 21), (28, 28), (28, 28), (28, 28)]
    assert res.stopped_by == "condition"


def test_steepest_descent_step():
    p = Problem([[2, 0], [0, 2]], [2, 4])
    res = projected_steepest_descent(p, 100, collect=lambda s: s.beta)
    assert res.collected[1] == F(1, 4)
    assert list(res.x) == [1, 2]
    # r = 0 at the optimum halts the iteration
    res = projected_steepest_descent(p, 100, stop=lambda s: s.counter >= 10)
    assert res.final.counter == 1


def test_adaptive_steepest_descent_reaches_least_squares():
    assert list(adaptive_steepest_descent(_ident(), 28, 4).x) == [12, -8, 5, 1, 2]


def test_default_stop_counts():
    assert thresholded_landweber(_ident(), 1).final.counter == 1
    assert adaptive_landweber(_ident(), 28, 3).final.counter == 3


def test_collect_sees_every_iterate():
    seen = []
    thresholded_landweber(_ident(), 1, collect=lambda s: seen.append(s.counter), stop=lambda s: s.counter >= 3)
    assert seen == [0, 1, 2, 3]


def test_state_quantities():
    s = projected_landweber(_ident(), 10).final
    assert s.support == (0, 1) and s.support_size == 2
    assert s.l1norm == 10
    assert s.discrepancy == 25 + 25 + 25 + 1 + 4
    assert s.penalty == 5


def test_argument_checks():
    with pytest.raises(ValueError):
        thresholded_landweber(_ident(), -1)
    for fn in (projected_landweber, projected_steepest_descent):
        with pytest.raises(ValueError):
            fn(_ident(), -1)
    with pytest.raises(ValueError):
        adaptive_landweber(_ident(), 1, 0)


def test_divergence_detected():
    p = Problem(3 * np.eye(2), [1.0, 1.0])
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        with pytest.raises(DivergenceError):
            thresholded_landweber(p, 0.0, stop=lambda s: s.counter >= 10_000)


def test_start_vector():
    res = thresholded_landweber(_ident(), 1, start=[11, -7, 4, 0, 1])
    assert list(res.x) == [11, -7, 4, 0, 1]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.fractions(0, 1, max_denominator=50))
def test_path_points_are_fixed_points(seed, t):
    # a minimizer is fixed by thresholded Landweber for any K, and by the projected
    # schemes with R equal to its l1 norm
    problem = random_integer_problem(random.Random(seed), weights=(1,))
    try:
        path = solve_path(problem)
    except NonUniquePathError:
        return
    lam = path[0].lam * t
    x = interpolate(path, lam)
    assert list(thresholded_landweber(problem, lam, start=x).x) == list(x)
    if lam > 0:
        R = sum(abs(v) for v in x)
        assert list(projected_landweber(problem, R, start=x).x) == list(x)
        psd = projected_steepest_descent(problem, R, start=x).x
        assert list(psd) == list(x)


def test_float_schemes_converge():
    rng = np.random.Generator(np.random.PCG64(3))
    K = rng.standard_normal((8, 12))
    K /= 1.01 * np.linalg.norm(K, 2)
    p = Problem(K, rng.standard_normal(8))
    lam = float(np.max(np.abs(p.Kty))) / 5
    xbar = find_minimizer(p, Penalty(lam)).x
    R = float(np.sum(np.abs(xbar)))
    runs = {
        "tlw": thresholded_landweber(p, lam, stop=lambda s: s.counter >= 20000),
        "plw": projected_landweber(p, R, stop=lambda s: s.counter >= 20000),
        "alw": adaptive_landweber(p, R, 10, stop=lambda s: s.counter >= 20000),
    }
    for name, res in runs.items():
        assert np.linalg.norm(res.x - xbar) <= 1e-6 * np.linalg.norm(xbar), name


def test_tie_example_exact_landweber_step():
    p = Problem(TIE_K, TIE_Y)
    x = thresholded_landweber(p, 100).x
    assert all(isinstance(v, F) for v in x)


def test_steepest_descent_scaled_identity():
    p = Problem([[2, 0], [0, 2]], [4, 0])
    res = projected_steepest_descent(p, 1, collect=lambda s: (s.beta, list(s.remainder)))
    assert res.collected[0][1] == [8, 0]
    assert res.collected[1][0] == F(1, 4)
    # pre-projection point (2, 0), projected onto the unit ball
    assert list(res.x) == [1, 0]


def test_single_adaptive_step_is_projected_landweber():
    a = adaptive_landweber(_ident(), 9, 1).x
    b = projected_landweber(_ident(), 9).x
    assert list(a) == list(b)
    assert list(adaptive_steepest_descent(_ident(), 9, 1).x) == list(b)


def test_adaptive_steepest_descent_matches_landweber_for_identity():
    a = adaptive_landweber(_ident(), 20, 5, collect=lambda s: list(s.x)).collected
    b = adaptive_steepest_descent(_ident(), 20, 5, collect=lambda s: list(s.x)).collected
    assert a == b


def _small_float_problem(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    K = rng.standard_normal((6, 10))
    K /= 1.01 * np.linalg.norm(K, 2)
    return Problem(K, rng.standard_normal(6))


@pytest.mark.parametrize("seed", range(5))
def test_steepest_descent_not_worse_than_landweber(seed):
    p = _small_float_problem(seed)
    stop = lambda s: s.counter >= 500  # noqa: E731
    sd = projected_steepest_descent(p, 1, stop=stop).final
    lw = projected_landweber(p, 1, stop=stop).final
    assert sd.discrepancy <= lw.discrepancy + 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_projected_iterates_stay_feasible(seed):
    p = _small_float_problem(seed)
    res = adaptive_steepest_descent(p, 1, 10, collect=lambda s: (s.l1norm, s.radius),
                                    stop=lambda s: s.counter >= 50)
    assert all(norm <= rad * (1 + 1e-12) for norm, rad in res.collected[1:])


def test_weighted_landweber_fixed_point():
    p = Problem(TIE_K, TIE_Y, [2, 1, 0])
    x = find_minimizer(p, Penalty(F(1, 2))).x
    assert list(thresholded_landweber(p, F(1, 2), start=x).x) == list(x)
    assert verify_kkt(p, x, F(1, 2))
