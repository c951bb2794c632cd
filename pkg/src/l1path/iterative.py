"""Iterative approximations of the lasso minimizer.

Five fixed-point schemes:

* thresholded Landweber, ``x <- S_{w lam}(x + K^T(y - Kx))``
* projected Landweber, ``x <- P_R(x + K^T(y - Kx))``
* projected steepest descent, ``x <- P_R(x + beta r)`` with
  ``beta = ||r||^2 / ||K r||^2``
* adaptive Landweber / adaptive steepest descent, the two projected
  schemes with the radius grown as ``R_n = (n + 1) R / numsteps`` from a
  zero start.

No step-size rescaling is done; the Landweber schemes assume ``||K|| < sqrt(2)``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .field import FieldError
from .homotopy import SolveResult
from .ops import penalty_of, project_l1_ball, soft_threshold, sq_norm
from .problem import Problem

__all__ = [
    "DivergenceError",
    "IterationState",
    "thresholded_landweber",
    "projected_landweber",
    "projected_steepest_descent",
    "adaptive_landweber",
    "adaptive_steepest_descent",
]


class DivergenceError(FieldError):
    """An iterate became NaN or infinite."""


@dataclass(frozen=True, eq=False)
class IterationState:
    """Iterate ``x^(n)`` together with the quantities computed alongside it."""

    counter: int
    x: np.ndarray
    remainder: np.ndarray
    misfit: np.ndarray
    beta: object
    elapsed: float
    radius: object = None
    problem: Problem | None = None

    @cached_property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.x) if v != 0)

    @property
    def support_size(self) -> int:
        return len(self.support)

    @cached_property
    def penalty(self):
        """``max |r_i / w_i|`` over penalized components."""
        return penalty_of(self.problem, self.remainder)

    @cached_property
    def l1norm(self):
        return sum(abs(v) for v in self.x)

    @cached_property
    def discrepancy(self):
        return sq_norm(self.misfit)


def _state(problem, x, counter, beta, t0, radius=None) -> IterationState:
    e = problem.y - problem.K @ x
    r = problem.K.T @ e
    if not problem.field.exact and not (np.all(np.isfinite(x)) and np.all(np.isfinite(r))):
        raise DivergenceError(f"non-finite iterate at step {counter}")
    return IterationState(counter, x, r, e, beta, time.perf_counter() - t0, radius, problem)


def _run(problem, step, x0, stop, collect, t0, radius_of=None):
    collected = [] if collect is not None else None
    one = problem.field.one
    rad = radius_of(0) if radius_of else None
    state = _state(problem, x0, 0, one, t0, rad)
    while True:
        if collected is not None:
            collected.append(collect(state))
        if stop(state):
            return SolveResult(state, collected, "condition")
        x, beta = step(state)
        rad = radius_of(state.counter + 1) if radius_of else None
        state = _state(problem, x, state.counter + 1, beta, t0, rad)


def _start(problem, start):
    if start is None:
        return problem.field.zeros(problem.n)
    return problem.vector(start)


def _default_stop(n):
    return lambda s: s.counter >= n


def _sd_beta(problem, r):
    rr = sq_norm(r)
    if rr == 0:
        return None
    Kr = problem.K @ r
    den = sq_norm(Kr)
    if den == 0:
        raise FieldError("K r = 0 with r != 0; steepest-descent step undefined")
    return rr / den


def thresholded_landweber(
    problem: Problem,
    lam,
    *,
    start=None,
    collect: Callable | None = None,
    stop: Callable[[IterationState], bool] | None = None,
) -> SolveResult:
    """Iterate ``x <- S_{w lam}[x + K^T(y - Kx)]``.

    The default ``stop`` halts after one iteration.
    """
    if lam < 0:
        raise ValueError("negative penalty")
    t0 = time.perf_counter()
    thr = problem.w * problem.field.scalar(lam)

    def step(s):
        return soft_threshold(s.x + s.remainder, thr), problem.field.one

    return _run(problem, step, _start(problem, start), stop or _default_stop(1), collect, t0)


def projected_landweber(problem, radius, *, start=None, collect=None, stop=None) -> SolveResult:
    """Iterate ``x <- P_R[x + K^T(y - Kx)]`` (unweighted ball)."""
    if radius < 0:
        raise ValueError("negative radius")
    t0 = time.perf_counter()

    def step(s):
        return project_l1_ball(s.x + s.remainder, radius), problem.field.one

    return _run(problem, step, _start(problem, start), stop or _default_stop(1), collect, t0,
                radius_of=lambda n: radius)


def projected_steepest_descent(problem, radius, *, start=None, collect=None, stop=None) -> SolveResult:
    """Iterate ``x <- P_R[x + beta r]`` with ``beta = ||r||^2 / ||K r||^2``.

    A zero remainder means the iterate is already optimal; iteration stops there.
    """
    if radius < 0:
        raise ValueError("negative radius")
    t0 = time.perf_counter()
    user_stop = stop or _default_stop(1)

    def step(s):
        beta = _sd_beta(problem, s.remainder)
        return project_l1_ball(s.x + beta * s.remainder, radius), beta

    def halt(s):
        return user_stop(s) or sq_norm(s.remainder) == 0

    return _run(problem, step, _start(problem, start), halt, collect, t0,
                radius_of=lambda n: radius)


def _adaptive(problem, radius, numsteps, collect, stop, steepest):
    if radius < 0:
        raise ValueError("negative radius")
    if numsteps < 1:
        raise ValueError("numsteps must be at least 1")
    t0 = time.perf_counter()
    fld = problem.field
    R = fld.scalar(radius)

    def radius_of(n):
        # radius used to produce iterate n; held at R past numsteps
        return R * min(n, numsteps) / numsteps

    user_stop = stop or _default_stop(numsteps)

    def step(s):
        target = radius_of(s.counter + 1)
        if steepest:
            beta = _sd_beta(problem, s.remainder)
            if beta is None:
                beta = fld.one
        else:
            beta = fld.one
        return project_l1_ball(s.x + beta * s.remainder, target), beta

    return _run(problem, step, fld.zeros(problem.n), user_stop, collect, t0, radius_of=radius_of)


def adaptive_landweber(problem, radius, numsteps, *, collect=None, stop=None) -> SolveResult:
    """Projected Landweber from zero with radius ``(n + 1) R / numsteps`` at step n.

    Runs ``numsteps`` iterations unless ``stop`` says otherwise; further
    iterations keep radius ``R``.
    """
    return _adaptive(problem, radius, numsteps, collect, stop, steepest=False)


def adaptive_steepest_descent(problem, radius, numsteps, *, collect=None, stop=None) -> SolveResult:
    """Adaptive scheme with the steepest-descent step size."""
    return _adaptive(problem, radius, numsteps, collect, stop, steepest=True)
