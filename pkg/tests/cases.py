"""Worked examples and oracles shared by the test modules."""

import itertools
import random
from fractions import Fraction as F

import numpy as np

from l1path import RATIONAL, Problem, SingularSystemError

IDENTITY_K = np.eye(5, dtype=int)
IDENTITY_Y = np.array([12, -8, 5, 1, 2])
IDENTITY_TABLE = [
    ((0, 0, 0, 0, 0), 12),
    ((4, 0, 0, 0, 0), 8),
    ((7, -3, 0, 0, 0), 5),
    ((10, -6, 3, 0, 0), 2),
    ((11, -7, 4, 0, 1), 1),
    ((12, -8, 5, 1, 2), 0),
]

TIE_K = np.array([[-3, 4, 4], [-5, 1, 4], [5, 1, -4]])
TIE_Y = np.array([24, 17, -7])
TIE_TABLE = [
    ((0, 0, 0), 192, (-192, 106, 192)),
    ((0, 0, F(43, 16)), 63, (F(-209, 4), 63, 63)),
    ((0, F(43, 15), F(43, 15)), F(128, 15), (F(-128, 15), F(128, 15), F(128, 15))),
    ((F(-172, 73), F(301, 73), 0), F(256, 73), (F(-256, 73), F(256, 73), F(256, 73))),
    ((F(-2356, 991), F(4251, 991), 0), F(256, 991), (F(-256, 991), F(256, 991), F(-256, 991))),
    ((-4, 5, -2), 0, (0, 0, 0)),
]

# four-decimal nodes from a LARS implementation that ignores the initial tie
MISSED_TIE_NODES = [
    ("0", "0", "0"),
    ("-1.8298", "0", "0"),
    ("-1.0293", "0", "1.4009"),
    ("-2.1807", "0.6141", "0"),
    ("-2.5971", "3.8760", "0"),
    ("-10.3550", "7.6758", "-9.7765"),
]
# a breakpoint whose first component disagrees in sign with its remainder
SIGN_VIOLATING_POINT = ("5.3750", "0", "9.4062")

REMOVAL_K = np.array([[-4, 3, -1], [-4, 4, 3], [-1, 1, -1]])
REMOVAL_Y = np.array([7, 21, 0])
REMOVAL_TABLE = [
    ((0, 0, 0), 112, (-112, 105, 56)),
    ((F(-7, 4), 0, 0), F(217, 4), (F(-217, 4), F(217, 4), F(175, 4))),
    ((0, F(7, 3), 0), F(133, 3), (F(-133, 3), F(133, 3), F(112, 3))),
    ((0, F(49, 18), 0), F(308, 9), (F(-595, 18), F(308, 9), F(308, 9))),
    ((0, F(28, 9), F(7, 3)), F(49, 9), (F(-49, 9), F(49, 9), F(49, 9))),
    ((-1, 2, 3), 0, (0, 0, 0)),
]
REMOVAL_SUPPORTS = [(), (0,), (1,), (1,), (1, 2), (0, 1, 2)]

# the weighted table cannot come from TIE_K / TIE_Y (see test_homotopy);
# this smallest integer problem reproduces it exactly
WEIGHTED_K = np.array([[-2, 1, -1], [-1, 1, 3], [0, -2, -4]])
WEIGHTED_Y = np.array([-11, -4, 4])
WEIGHTS = np.array([2, 1, 0])
WEIGHTED_TABLE = [
    ((0, 0, F(-17, 26)), F(214, 13), (F(659, 26), F(-214, 13), 0)),
    ((0, F(-197, 44), F(47, 44)), F(75, 11), (F(150, 11), F(-75, 11), 0)),
    ((3, -4, 1), 0, (0, 0, 0)),
]


def random_integer_problem(rng: random.Random, size=(1, 6), entries=5, weights=(0, 1, 2)):
    m = rng.randint(*size)
    n = rng.randint(*size)
    K = np.array([[rng.randint(-entries, entries) for _ in range(n)] for _ in range(m)], dtype=int)
    y = np.array([rng.randint(-entries, entries) for _ in range(m)], dtype=int)
    w = np.array([rng.choice(weights) for _ in range(n)], dtype=int)
    return Problem(K, y, w)


def brute_force_minimizers(problem, lams):
    """All KKT points for each ``lam``, by enumerating supports and sign patterns.

    For every support ``S`` with invertible ``G_SS`` and every sign vector on
    ``S`` the candidate is ``G_SS^{-1}((K^T y)_S - lam (w s)_S)``; it is kept
    if its signs match and the remainder satisfies the optimality conditions.
    Returns one list of distinct solutions per ``lam``.
    """
    n = problem.n
    G, b, w = problem.gram, problem.Kty, problem.w
    found = [[] for _ in lams]
    for size in range(n + 1):
        for S in itertools.combinations(range(n), size):
            S = list(S)
            if S:
                GS = G[np.ix_(S, S)]
                try:
                    cols = [RATIONAL.solve(GS, [int(i == j) for i in range(len(S))]) for j in range(len(S))]
                except SingularSystemError:
                    continue
                inv = np.array(cols, dtype=object).T
                base = inv @ b[S]
            free = [i for i in S if w[i] == 0]
            pen = [i for i in S if w[i] != 0]
            for signs in itertools.product((-1, 1), repeat=len(pen)):
                s = {i: 0 for i in S}
                s.update(zip(pen, signs))
                ws = np.array([w[i] * s[i] for i in S], dtype=object)
                shift = inv @ ws if S else None
                for k, lam in enumerate(lams):
                    x = np.array([F(0)] * n, dtype=object)
                    if S:
                        x[S] = base - lam * shift
                    if any(x[i] == 0 or (x[i] > 0) != (s[i] > 0) for i in pen):
                        continue
                    if any(x[i] == 0 for i in free):
                        continue
                    r = b - G @ x
                    ok = True
                    for i in range(n):
                        if w[i] == 0:
                            ok = r[i] == 0
                        elif i in s:
                            ok = r[i] == lam * w[i] * s[i]
                        else:
                            ok = abs(r[i]) <= lam * w[i]
                        if not ok:
                            break
                    if ok and not any(all(x == z) for z in found[k]):
                        found[k].append(x)
    return found
