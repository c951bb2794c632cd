"""Exact regularization path of the weighted lasso by the homotopy (LARS) method.

The path ``lam -> xbar(lam)`` of minimizers of

    ||Kx - y||^2 + 2 lam sum_i w_i |x_i|

is piecewise linear. Starting at ``lam_max`` it is walked downwards node by
node: at every node the active set is chosen (resolving ties among
candidates that reach the maximal remainder ratio simultaneously), a
direction is obtained from a small linear system, and the walk continues
until a remainder ratio catches up with the active ones or an active
coefficient returns to zero. With rational input every node is exact.
"""

from __future__ import annotations

import itertools
import sys
import time
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .field import FieldError, SingularSystemError, Tolerance
from .ops import l1_norm, penalty_of, soft_threshold, sq_norm
from .problem import DimensionError, Problem

__all__ = [
    "ActiveSet",
    "HomotopyStep",
    "InitialPointError",
    "MaxL1Norm",
    "MaxNonZero",
    "MinDiscrepancy",
    "NonUniquePathError",
    "PathNode",
    "Penalty",
    "Predicate",
    "SolveResult",
    "StoppingRule",
    "TieResolutionError",
    "compute_direction",
    "compute_step",
    "find_minimizer",
    "initial_node",
    "resolve_tie_entry",
    "verify_kkt",
]


class NonUniquePathError(SingularSystemError):
    """The restricted Gram system is singular; the minimizer is not unique."""

    def __init__(self, indices, lam=None):
        self.indices = tuple(int(i) for i in indices)
        msg = f"singular Gram matrix on index set {{{', '.join(str(i + 1) for i in self.indices)}}}"
        if lam is not None:
            msg += f" at lambda={lam}"
        super().__init__(msg + "; the minimizer is not unique")


class InitialPointError(NonUniquePathError):
    """Least-squares fit on the unpenalized components is not unique."""


class TieResolutionError(FieldError):
    """No candidate subset satisfies the sign and rate conditions."""


@dataclass(frozen=True, eq=False)
class PathNode:
    """One breakpoint of the path (or an interpolated stopping point).

    ``lam`` is the penalty, ``remainder`` is ``K^T(y - Kx)`` and ``misfit``
    is ``y - Kx``; both are carried so that callbacks never multiply by K.
    """

    counter: int
    x: np.ndarray
    lam: object
    remainder: np.ndarray
    misfit: np.ndarray
    elapsed: float = 0.0
    interpolated: bool = False

    @property
    def penalty(self):
        return self.lam

    @cached_property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.x) if v != 0)

    @property
    def support_size(self) -> int:
        return len(self.support)

    @cached_property
    def l1norm(self):
        return l1_norm(self.x)

    @cached_property
    def discrepancy(self):
        return sq_norm(self.misfit)

    def fixed_point_residual(self, w=None) -> float:
        """``||x - S_{w lam}(x + r)|| / ||x||`` in floating point (0 for x = 0)."""
        thr = self.lam if w is None else np.asarray(w) * self.lam
        diff = np.asarray(self.x - soft_threshold(self.x + self.remainder, thr), dtype=float)
        nx = float(np.linalg.norm(np.asarray(self.x, dtype=float)))
        return float(np.linalg.norm(diff)) / nx if nx else 0.0


@dataclass
class ActiveSet:
    """Working set for one segment of the path.

    ``indices`` holds every component allowed to move (penalized actives
    plus all unpenalized ones), ``signs`` the prescribed sign of each
    penalized active, ``entered`` the candidates admitted at this node and
    ``excluded`` the boundary candidates left out together with their sign.
    """

    indices: tuple[int, ...]
    signs: dict[int, int]
    entered: tuple[int, ...] = ()
    excluded: dict[int, int] = field(default_factory=dict)
    direction: np.ndarray | None = None


@dataclass
class HomotopyStep:
    direction: np.ndarray
    mu: object
    entered: tuple[int, ...] = ()
    removed: tuple[int, ...] = ()
    terminal: bool = False

    @property
    def event(self) -> str:
        if self.terminal:
            return "terminal"
        return "removal" if self.removed and not self.entered else "entry"


@dataclass
class SolveResult:
    final: object
    collected: list | None = None
    stopped_by: str = "terminal"

    @property
    def x(self):
        return self.final.x


# -- stopping rules ---------------------------------------------------------


class StoppingRule:
    """A rule checked at every node.

    ``crossing`` returns the fraction ``theta`` in (0, 1] of the segment
    ``prev -> new`` at which the rule is met, or ``None``.
    """

    name = "rule"

    def at_start(self, node: PathNode, problem: Problem) -> bool:
        raise NotImplementedError

    def crossing(self, prev: PathNode, new: PathNode, problem: Problem):
        raise NotImplementedError


@dataclass
class Penalty(StoppingRule):
    """Stop at ``lam == value`` exactly."""

    value: object
    name = "penalty"

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("stopping penalty must be nonnegative")

    def at_start(self, node, problem):
        return node.lam <= self.value

    def crossing(self, prev, new, problem):
        if new.lam > self.value:
            return None
        return (prev.lam - self.value) / (prev.lam - new.lam)


@dataclass
class MaxL1Norm(StoppingRule):
    """Stop where ``||x||_1`` first reaches ``value``."""

    value: object
    name = "l1norm"

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("l1-norm bound must be nonnegative")

    def at_start(self, node, problem):
        return node.l1norm >= self.value

    def crossing(self, prev, new, problem):
        if new.l1norm < self.value:
            return None
        d = new.x - prev.x
        # unpenalized components may change sign inside a segment, so the
        # norm is piecewise linear in theta with kinks at their zeros
        kinks = sorted({-xi / di for xi, di in zip(prev.x, d) if di != 0 and 0 < -xi / di < 1})
        pts = [0, *kinks, 1]
        vals = [l1_norm(prev.x + t * d) for t in pts]
        for (a, fa), (b, fb) in zip(zip(pts, vals), zip(pts[1:], vals[1:])):
            if fb >= self.value:
                return a + (self.value - fa) * (b - a) / (fb - fa)
        return 1


@dataclass
class MinDiscrepancy(StoppingRule):
    """Stop where ``||Kx - y||^2`` first drops to ``value``.

    The discrepancy is quadratic along a segment; with rational data an
    irrational crossing is approximated to ``RATIONAL.sqrt_bits`` bits and a
    warning is issued.
    """

    value: object
    name = "discrepancy"

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("discrepancy target must be nonnegative")

    def at_start(self, node, problem):
        return node.discrepancy <= self.value

    def crossing(self, prev, new, problem):
        if new.discrepancy > self.value:
            return None
        fld = problem.field
        de = new.misfit - prev.misfit
        a = sq_norm(de)
        b = 2 * sum((u * v for u, v in zip(prev.misfit, de)), fld.zero)
        c = prev.discrepancy - self.value
        if a == 0:
            return -c / b if b != 0 else 1
        disc = b * b - 4 * a * c
        if disc < 0:
            disc = fld.zero
        root = fld.sqrt(disc)
        if root is None:
            warnings.warn(
                "discrepancy crossing is irrational; returning a rational "
                f"approximation accurate to {fld.sqrt_bits} bits",
                RuntimeWarning,
                stacklevel=4,
            )
            root = fld.sqrt_approx(disc)
        roots = [(-b - root) / (2 * a), (-b + root) / (2 * a)]
        inside = [t for t in roots if 0 <= t <= 1]
        if not inside:
            # float rounding at an endpoint
            return min(max(roots[0], 0), 1)
        return min(inside)


@dataclass
class MaxNonZero(StoppingRule):
    """Stop at the first node with ``value`` nonzeros; unpenalized components always count."""

    value: int
    name = "nonzeros"

    def __post_init__(self):
        if self.value < 1:
            raise ValueError("nonzero count must be at least 1")

    def _count(self, node, problem):
        unpen = set(problem.unpenalized.tolist())
        return len(unpen | set(node.support))

    def at_start(self, node, problem):
        return self._count(node, problem) >= self.value

    def crossing(self, prev, new, problem):
        return 1 if self._count(new, problem) >= self.value else None


@dataclass
class Predicate(StoppingRule):
    """Stop at the first node for which ``fn(node)`` is true; no interpolation."""

    fn: Callable[[PathNode], bool]
    name = "predicate"

    def at_start(self, node, problem):
        return bool(self.fn(node))

    def crossing(self, prev, new, problem):
        return 1 if self.fn(new) else None


# -- path construction ------------------------------------------------------


def _make_node(problem, x, counter, t0, lam=None, interpolated=False) -> PathNode:
    e = problem.y - problem.K @ x
    r = problem.K.T @ e
    if lam is None:
        lam = penalty_of(problem, r)
    return PathNode(counter, x, lam, r, e, time.perf_counter() - t0, interpolated)


def initial_node(problem: Problem, t0: float | None = None) -> PathNode:
    """Node 0: the top of the path.

    Penalized components are zero; unpenalized ones hold the least-squares
    fit so that their remainder vanishes.
    """
    fld = problem.field
    t0 = time.perf_counter() if t0 is None else t0
    x = fld.zeros(problem.n)
    z = problem.unpenalized
    if len(z):
        G = problem.gram[np.ix_(z, z)]
        try:
            xz = fld.solve(G, problem.Kty[z])
        except SingularSystemError:
            raise InitialPointError(z) from None
        x[z] = xz
    return _make_node(problem, x, 0, t0)


def compute_direction(problem: Problem, node: PathNode, indices, signs) -> np.ndarray:
    """Direction ``v`` with ``(K^T K v)_i = w_i s_i`` on penalized actives and 0 on unpenalized.

    Moving along ``v`` lowers every active ratio ``|r_i| / w_i`` at unit
    rate while keeping unpenalized remainders at zero.
    """
    fld = problem.field
    idx = np.asarray(sorted(indices), dtype=int)
    rhs = fld.array([problem.w[i] * signs.get(int(i), 0) for i in idx]) if len(idx) else fld.zeros(0)
    v = fld.zeros(problem.n)
    if not len(idx):
        return v
    try:
        v[idx] = fld.solve(problem.gram[np.ix_(idx, idx)], rhs)
    except SingularSystemError:
        raise NonUniquePathError(idx, node.lam) from None
    return v


def _candidates(problem: Problem, node: PathNode):
    """Split the maximal-ratio set into current support and new candidates."""
    fld = problem.field
    support, candidates = [], []
    if node.lam == 0:
        return support, candidates
    for i in problem.penalized:
        if node.x[i] != 0:
            support.append(int(i))
        elif fld.equal(abs(node.remainder[i]) / problem.w[i], node.lam):
            candidates.append(int(i))
    return support, candidates


def _subsets(candidates, allow_empty):
    for k in range(len(candidates), -1 if allow_empty else 0, -1):
        yield from itertools.combinations(candidates, k)


def resolve_tie_entry(problem: Problem, node: PathNode, candidates=None) -> ActiveSet:
    """Choose which candidates enter the active set.

    Subsets ``T`` of the candidates are tried by decreasing size, then
    lexicographically. ``T`` is admissible when the resulting direction
    (1) moves every new entry in the sign of its remainder and (2) makes no
    excluded candidate's ratio decrease slower than the active ones. The
    empty subset is allowed when the support is nonempty, which covers the
    node right after a removal.
    """
    fld = problem.field
    support, found = _candidates(problem, node)
    if candidates is None:
        candidates = found
    candidates = sorted(int(c) for c in candidates)
    unpen = [int(i) for i in problem.unpenalized]
    base_signs = {i: fld.sign(node.x[i]) for i in support}
    cand_sign = {j: fld.sign(node.remainder[j]) for j in candidates}
    w = problem.w
    slack = 1 - fld.tol.tie_rel

    singular = None
    for subset in _subsets(candidates, allow_empty=bool(support)):
        signs = dict(base_signs)
        signs.update((j, cand_sign[j]) for j in subset)
        indices = tuple(sorted(set(support) | set(subset) | set(unpen)))
        try:
            v = compute_direction(problem, node, indices, signs)
        except NonUniquePathError as exc:
            singular = exc
            continue
        if any(cand_sign[j] * v[j] <= 0 for j in subset):
            continue
        rest = [j for j in candidates if j not in subset]
        if rest:
            g = problem.gram[np.ix_(rest, indices)] @ v[list(indices)]
            if any(cand_sign[j] * gj < w[j] * slack for j, gj in zip(rest, g)):
                continue
        return ActiveSet(
            indices=indices,
            signs=signs,
            entered=tuple(subset),
            excluded={j: cand_sign[j] for j in rest},
            direction=v,
        )
    if singular is not None:
        raise singular
    raise TieResolutionError(
        f"no admissible subset of candidates {[c + 1 for c in candidates]} at lambda={node.lam}"
    )


def compute_step(problem: Problem, node: PathNode, v, active: ActiveSet) -> HomotopyStep:
    """Longest step ``mu`` along ``v`` before the active set must change.

    Events are entries (an outside ratio ``|r_j(mu)| / w_j`` catches up
    with ``lam - mu``) and removals (an active coefficient hits zero). If
    neither happens before ``mu = lam`` the step is terminal.
    """
    fld = problem.field
    lam = node.lam
    w, r, x = problem.w, node.remainder, node.x
    idx = list(active.indices)
    g = problem.gram[:, idx] @ v[idx] if idx else fld.zeros(problem.n)
    inside = set(idx)

    events = []  # (mu, kind, index)
    for j in problem.penalized:
        j = int(j)
        if j in inside:
            continue
        for sigma in (1, -1):
            if active.excluded.get(j) == sigma:
                continue
            den = sigma * w[j] - g[j]
            if den == 0:
                continue
            mu = (sigma * w[j] * lam - r[j]) / den
            if 0 < mu < lam:
                events.append((mu, "entry", j))
    for i in idx:
        if w[i] == 0 or x[i] == 0 or v[i] == 0:
            continue
        mu = -x[i] / v[i]
        if 0 < mu < lam:
            events.append((mu, "removal", i))

    if not events:
        return HomotopyStep(v, lam, terminal=True)
    mu = min(e[0] for e in events)
    if fld.equal(mu, lam):
        return HomotopyStep(v, lam, terminal=True)
    hit = [e for e in events if fld.equal(e[0], mu)]
    return HomotopyStep(
        v,
        mu,
        entered=tuple(sorted({e[2] for e in hit if e[1] == "entry"})),
        removed=tuple(sorted({e[2] for e in hit if e[1] == "removal"})),
    )


def _advance(problem, node, step, t0) -> PathNode:
    fld = problem.field
    x = node.x + step.mu * step.direction
    for i in step.removed:
        x[i] = fld.zero
    if step.terminal:
        if fld.exact:
            return _make_node(problem, x, node.counter + 1, t0)
        return _make_node(problem, x, node.counter + 1, t0, lam=0.0)
    new = _make_node(problem, x, node.counter + 1, t0)
    if fld.exact and new.lam != node.lam - step.mu:
        raise FieldError(
            f"internal inconsistency: lambda {new.lam} != {node.lam - step.mu}"
        )
    if not new.lam < node.lam:
        raise FieldError(f"path stalled at lambda={node.lam}")
    return new


def _interpolate(problem, prev: PathNode, new: PathNode, theta, t0) -> PathNode:
    if theta == 1:
        return new
    if theta == 0:
        return prev

    def mix(a, b):
        return a + theta * (b - a)

    return PathNode(
        counter=new.counter,
        x=mix(prev.x, new.x),
        lam=mix(prev.lam, new.lam),
        remainder=mix(prev.remainder, new.remainder),
        misfit=mix(prev.misfit, new.misfit),
        elapsed=time.perf_counter() - t0,
        interpolated=True,
    )


def _rules(stop) -> list[StoppingRule]:
    if stop is None:
        return [Penalty(0)]
    if isinstance(stop, StoppingRule):
        return [stop]
    if callable(stop):
        return [Predicate(stop)]
    return [Predicate(s) if not isinstance(s, StoppingRule) and callable(s) else s for s in stop]


def _fmt_set(idx):
    return "{" + ",".join(str(i + 1) for i in idx) + "}"


def _report(node: PathNode, step: HomotopyStep | None, verbose: int, out):
    if verbose <= 0:
        return
    line = f"node {node.counter}: lambda={node.lam} support={_fmt_set(node.support)}"
    if step is not None:
        if step.entered:
            line += f" entering={_fmt_set(step.entered)}"
        if step.removed:
            line += f" removed={_fmt_set(step.removed)}"
    print(line, file=out)
    if verbose >= 2:
        print(f"  x = {list(node.x)}", file=out)
        print(f"  remainder = {list(node.remainder)}", file=out)


def find_minimizer(
    problem: Problem,
    stop: StoppingRule | Sequence[StoppingRule] | Callable | None = None,
    collect: Callable[[PathNode], object] | None = None,
    *,
    verbose: int = 0,
    max_nodes: int | None = None,
    log=None,
) -> SolveResult:
    """Walk the path from ``lam_max`` until a stopping rule fires.

    ``stop`` is one rule, several (the earliest along the path wins) or a
    predicate over :class:`PathNode`. The default ``Penalty(0)`` runs to
    the end of the path. Penalty, l1-norm and discrepancy rules land
    exactly on their target by interpolating the overshooting node with
    the previous one.

    ``collect`` is called on every node, with the interpolated stopping
    point replacing the overshooting node; its return values are gathered
    in ``SolveResult.collected``.
    """
    t0 = time.perf_counter()
    rules = _rules(stop)
    fld = problem.field
    out = sys.stderr if log is None else log
    if not fld.exact and any(isinstance(r, Penalty) and r.value == 0 for r in rules):
        warnings.warn(
            "stopping at lambda=0 with floating point data; give an explicit "
            "positive penalty or another stopping rule",
            RuntimeWarning,
            stacklevel=2,
        )
    collected = [] if collect is not None else None

    def emit(node):
        if collected is not None:
            collected.append(collect(node))

    node = initial_node(problem, t0)
    _report(node, None, verbose, out)
    for rule in rules:
        if rule.at_start(node, problem):
            emit(node)
            return SolveResult(node, collected, rule.name)
    emit(node)

    while node.lam != 0:
        if max_nodes is not None and node.counter >= max_nodes:
            return SolveResult(node, collected, "max_nodes")
        active = resolve_tie_entry(problem, node)
        step = compute_step(problem, node, active.direction, active)
        new = _advance(problem, node, step, t0)
        _report(new, step, verbose, out)

        best = None
        for rule in rules:
            theta = rule.crossing(node, new, problem)
            if theta is not None and (best is None or theta < best[0]):
                best = (theta, rule)
        if best is not None:
            final = _interpolate(problem, node, new, best[0], t0)
            emit(final)
            return SolveResult(final, collected, best[1].name)
        emit(new)
        node = new
    return SolveResult(node, collected, "terminal")


def solve_path(problem: Problem, stop=None, **kwargs):
    """Run :func:`find_minimizer` and return every node as a :class:`~l1path.pathtools.Path`."""
    from .pathtools import Path

    res = find_minimizer(problem, stop, collect=lambda nd: nd, **kwargs)
    return Path(res.collected)


def verify_kkt(problem: Problem, x, lam, tol: Tolerance | None = None) -> bool:
    """Check the weighted optimality conditions at ``(x, lam)``.

    Exact data are compared exactly. Otherwise equalities use
    ``tol.tie_rel`` relative to ``max(1, |a|, |b|)`` and the inequality
    ``|r_i| <= w_i lam`` is given the same slack.
    """
    from .field import DEFAULT_TOLERANCE, approx_equal, field_of

    x = np.asarray(x)
    if x.shape != (problem.n,):
        raise DimensionError(f"x has shape {x.shape}, expected ({problem.n},)")
    exact = problem.field.exact and field_of(x).exact and not isinstance(lam, float)
    tol = DEFAULT_TOLERANCE if tol is None else tol
    if exact:
        r = problem.K.T @ (problem.y - problem.K @ x)
    else:
        K, y = problem.K.astype(float), problem.y.astype(float)
        x = x.astype(float)
        lam = float(lam)
        r = K.T @ (y - K @ x)
    w = problem.w if exact else problem.w.astype(float)

    def eq(a, b):
        return a == b if exact else approx_equal(a, b, tol)

    if lam < 0:
        return False
    for i in range(problem.n):
        bound = w[i] * lam
        if w[i] == 0:
            if not eq(r[i], 0):
                return False
        elif x[i] != 0:
            if not eq(r[i], bound * (1 if x[i] > 0 else -1)):
                return False
        elif abs(r[i]) > bound and not eq(abs(r[i]), bound):
            return False
    return True
