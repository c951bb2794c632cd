from fractions import Fraction as F

import numpy as np
import pytest

from cases import IDENTITY_K, IDENTITY_TABLE, IDENTITY_Y, MISSED_TIE_NODES, TIE_K, TIE_TABLE, TIE_Y
from l1path import Path, Problem, check_minimizer_list, interpolate, lambda_of, solve_path, trade_off_curve
from l1path.problem import DimensionError


def _ident():
    return Problem(IDENTITY_K, IDENTITY_Y)


def test_interpolation():
    path = solve_path(_ident())
    assert list(path(F(13, 2))) == [F(11, 2), F(-3, 2), 0, 0, 0]
    assert list(interpolate(path, 8)) == [4, 0, 0, 0, 0]
    assert list(interpolate(path, 0)) == [12, -8, 5, 1, 2]
    assert list(interpolate(path, 12)) == [0, 0, 0, 0, 0]
    for lam in (-1, 13):
        with pytest.raises(ValueError):
            interpolate(path, lam)


def test_path_validation():
    p = _ident()
    with pytest.raises(ValueError):
        Path([])
    with pytest.raises(ValueError):
        Path.from_points(p, [1, 2], [[0] * 5, [0] * 5])
    with pytest.raises(DimensionError):
        Path.from_points(p, [2, 1], [[0] * 5, [0] * 4])
    path = Path.from_points(p, [5, 1], [[7, -3, 0, 0, 0], [11, -7, 4, 0, 1]])
    assert len(path) == 2 and path.lambdas == [5, 1]
    assert list(path[0].remainder) == [5, -5, 5, 1, 2]


def test_check_worked_tables():
    xs = [x for x, _ in IDENTITY_TABLE]
    lams = [lam for _, lam in IDENTITY_TABLE]
    assert check_minimizer_list(_ident(), xs, lams).verdict is True
    tie = Problem(TIE_K, TIE_Y)
    assert check_minimizer_list(tie, [r[0] for r in TIE_TABLE], [r[1] for r in TIE_TABLE]).verdict is True
    # a sub-list of consecutive nodes is fine
    assert check_minimizer_list(tie, [r[0] for r in TIE_TABLE[2:]], [r[1] for r in TIE_TABLE[2:]]).verdict


def test_check_rejects_skipped_node():
    xs = [x for x, _ in IDENTITY_TABLE]
    lams = [lam for _, lam in IDENTITY_TABLE]
    report = check_minimizer_list(_ident(), xs[:2] + xs[3:], lams[:2] + lams[3:])
    assert report.verdict is False and report.segment == (1, 2)


def test_check_rejects_wrong_node():
    xs = [list(x) for x, _ in IDENTITY_TABLE]
    xs[3][0] = F(19, 2)
    report = check_minimizer_list(_ident(), xs, [lam for _, lam in IDENTITY_TABLE])
    assert report.verdict is False and report.node == 3


def test_check_missed_tie_nodes():
    tie = Problem(TIE_K, TIE_Y)
    xs = [[F(v) for v in row] for row in MISSED_TIE_NODES]
    report = check_minimizer_list(tie, xs, [lambda_of(tie, x) for x in xs])
    assert report.verdict is False and report.node == 1 and "node 1" in report.reason


def test_check_indeterminate():
    p = _ident()
    xs = [x for x, _ in IDENTITY_TABLE]
    lams = [lam for _, lam in IDENTITY_TABLE]
    assert check_minimizer_list(p.as_float(), xs, lams).indeterminate
    assert check_minimizer_list(p, xs, lams[:-1]).indeterminate
    assert check_minimizer_list(p, [[0.0] * 5], [12]).indeterminate
    assert check_minimizer_list(p, xs[::-1], lams[::-1]).indeterminate
    with pytest.raises(DimensionError):
        check_minimizer_list(p, [[0] * 4], [12])


def test_check_accepts_nodes():
    path = solve_path(_ident())
    assert check_minimizer_list(_ident(), list(path)).verdict is True


def test_trade_off_curve():
    curve = trade_off_curve(solve_path(_ident()))
    assert curve[0] == (0, 144 + 64 + 25 + 1 + 4)
    assert curve[-1] == (28, 0)
    assert [a for a, _ in curve] == [0, 4, 10, 19, 23, 28]
    assert all(b[1] < a[1] for a, b in zip(curve, curve[1:]))


def test_lambda_of():
    assert lambda_of(_ident(), [7, -3, 0, 0, 0]) == 5
    assert lambda_of(_ident().as_float(), np.array([7.0, -3, 0, 0, 0])) == 5.0
