"""Working with computed paths: interpolation, certification, trade-off curves."""

from __future__ import annotations

import bisect
import time
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .homotopy import PathNode
from .ops import penalty_of
from .problem import DimensionError, Problem

__all__ = [
    "Path", "CheckReport", "interpolate", "check_minimizer_list", "trade_off_curve", "lambda_of",
]


class Path:
    """Nodes of a piecewise-linear path ordered by strictly decreasing ``lam``."""

    def __init__(self, nodes: Sequence[PathNode]):
        nodes = list(nodes)
        if not nodes:
            raise ValueError("a path needs at least one node")
        n = len(nodes[0].x)
        for a, b in zip(nodes, nodes[1:]):
            if not b.lam < a.lam:
                raise ValueError("lambda must be strictly decreasing along a path")
        if any(len(nd.x) != n for nd in nodes):
            raise DimensionError("nodes have different lengths")
        self.nodes = nodes

    @classmethod
    def from_points(cls, problem: Problem, lambdas, xs) -> Path:
        """Build a path from bare ``(lam, x)`` pairs, computing remainders."""
        nodes = []
        t0 = time.perf_counter()
        for k, (lam, x) in enumerate(zip(lambdas, xs)):
            x = problem.vector(x)
            e = problem.y - problem.K @ x
            nodes.append(PathNode(k, x, problem.field.scalar(lam), problem.K.T @ e, e,
                                  time.perf_counter() - t0))
        return cls(nodes)

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __getitem__(self, k):
        return self.nodes[k]

    @property
    def lambdas(self) -> list:
        return [nd.lam for nd in self.nodes]

    def __call__(self, lam):
        return interpolate(self, lam)


def interpolate(path: Path, lam) -> np.ndarray:
    """``xbar(lam)`` by linear interpolation between the bracketing nodes."""
    lams = path.lambdas
    lo, hi = lams[-1], lams[0]
    if lam < lo or lam > hi:
        raise ValueError(f"lambda={lam} outside the path range [{lo}, {hi}]")
    # lams is decreasing; search the negated list
    neg = [-v for v in lams]
    k = bisect.bisect_left(neg, -lam)
    if lams[k] == lam:
        return path.nodes[k].x.copy()
    a, b = path.nodes[k - 1], path.nodes[k]
    theta = (a.lam - lam) / (a.lam - b.lam)
    return a.x + theta * (b.x - a.x)


@dataclass
class CheckReport:
    """Outcome of :func:`check_minimizer_list`.

    ``verdict`` is ``True``, ``False`` or ``None`` (indeterminate); ``node``
    names the first node found to violate the optimality conditions.
    """

    verdict: bool | None
    reason: str = ""
    node: int | None = None
    segment: tuple[int, int] | None = None

    @property
    def indeterminate(self) -> bool:
        return self.verdict is None


def _all_exact(values) -> bool:
    return all(isinstance(v, Rational) and not isinstance(v, bool) for v in values)


def _kkt_at(problem, x, r, lam, sign_of):
    """Exact check at one point; ``sign_of(i)`` gives the required sign or 0."""
    w = problem.w
    for i in range(problem.n):
        if w[i] == 0:
            if r[i] != 0:
                return False
            continue
        s = sign_of(i)
        if s:
            if r[i] != w[i] * lam * s:
                return False
        elif abs(r[i]) > w[i] * lam:
            return False
    return True


def check_minimizer_list(problem: Problem, minimizers, lambdas=None) -> CheckReport:
    """Certify that ``minimizers`` are consecutive nodes of the exact path.

    Everything checked is affine in the segment parameter, so the
    optimality conditions are verified at both ends of every segment with
    the segment's sign pattern, plus once at the midpoint, and every
    component must keep one sign across the open segment. Inexact input,
    unequal lengths or a non-decreasing ``lambdas`` give an indeterminate
    report.
    """
    if lambdas is None:
        lambdas = [nd.lam for nd in minimizers]
        minimizers = [nd.x for nd in minimizers]
    minimizers = [list(x) for x in minimizers]
    lambdas = list(lambdas)
    if not problem.field.exact:
        return CheckReport(None, "inexact input")
    if len(minimizers) != len(lambdas) or not minimizers:
        return CheckReport(None, "node and lambda lists differ in length")
    if any(len(x) != problem.n for x in minimizers):
        raise DimensionError(f"minimizers must have length {problem.n}")
    if not _all_exact(lambdas) or not all(_all_exact(x) for x in minimizers):
        return CheckReport(None, "inexact input")
    if any(not b < a for a, b in zip(lambdas, lambdas[1:])):
        return CheckReport(None, "lambdas are not strictly decreasing")

    fld = problem.field
    xs = [fld.array(x) for x in minimizers]
    lams = [Fraction(v) for v in lambdas]
    rs = [problem.K.T @ (problem.y - problem.K @ x) for x in xs]

    for k, (x, r, lam) in enumerate(zip(xs, rs, lams)):
        if lam < 0 or not _kkt_at(problem, x, r, lam, lambda i: fld.sign(x[i])):
            return CheckReport(False, f"node {k} violates the optimality conditions", node=k)

    half = Fraction(1, 2)
    for k in range(len(xs) - 1):
        xa, xb, ra, rb = xs[k], xs[k + 1], rs[k], rs[k + 1]
        signs = []
        for i in range(problem.n):
            sa, sb = fld.sign(xa[i]), fld.sign(xb[i])
            if sa * sb < 0 and problem.w[i] != 0:
                return CheckReport(False, f"component {i + 1} changes sign between nodes {k} and {k + 1}",
                                   node=k + 1, segment=(k, k + 1))
            signs.append(sa or sb)
        seg_sign = lambda i: signs[i]  # noqa: E731
        xm = xa + half * (xb - xa)
        rm = problem.K.T @ (problem.y - problem.K @ xm)
        lm = lams[k] + half * (lams[k + 1] - lams[k])
        ok = (
            _kkt_at(problem, xa, ra, lams[k], seg_sign)
            and _kkt_at(problem, xb, rb, lams[k + 1], seg_sign)
            and _kkt_at(problem, xm, rm, lm, seg_sign)
        )
        if not ok:
            return CheckReport(False, f"segment between nodes {k} and {k + 1} is not on the path",
                               node=k + 1, segment=(k, k + 1))
    return CheckReport(True, "all segments certified")


def trade_off_curve(path) -> list[tuple]:
    """``(||x||_1, ||Kx - y||^2)`` for every node, in path order."""
    return [(nd.l1norm, nd.discrepancy) for nd in path]


def lambda_of(problem: Problem, x):
    """Penalty implied by ``x`` through its remainder."""
    x = problem.vector(x)
    return penalty_of(problem, problem.K.T @ (problem.y - problem.K @ x))

