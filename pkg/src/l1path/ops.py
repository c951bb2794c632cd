"""Elementwise and vector operators: soft thresholding, l1-ball projection,
weighted norms and remainders.

All functions work on either backend; object arrays of Fractions stay exact.
"""

from __future__ import annotations

import numpy as np

from .field import FLOAT, RATIONAL, field_of
from .problem import DimensionError, Problem

__all__ = [
    "soft_threshold",
    "l1_ball_threshold",
    "project_l1_ball",
    "weighted_l1_norm",
    "l1_norm",
    "remainder",
    "misfit",
    "sq_norm",
    "penalty_of",
]


def _zero_like(x):
    return RATIONAL.zero if np.asarray(x).dtype == object else 0.0


def _as_array(v) -> np.ndarray:
    """Integers and Fractions become exact object arrays, anything else float64."""
    a = np.asarray(v)
    if a.dtype == object or a.dtype.kind in "iu":
        return RATIONAL.array(a) if field_of(a) is RATIONAL else FLOAT.array(a)
    return a.astype(np.float64)


def soft_threshold(x, lam):
    """Soft thresholding ``S_lam(x)``, componentwise.

    ``x - lam`` where ``x > lam``, ``x + lam`` where ``x < -lam``, zero
    otherwise. ``lam`` may be a scalar or a vector of per-component
    thresholds; every threshold must be nonnegative.
    """
    scalar_input = np.ndim(x) == 0
    xa = np.atleast_1d(_as_array(x))
    la = _as_array(lam)
    if la.ndim > 0 and la.shape != xa.shape:
        raise DimensionError(f"threshold shape {la.shape} does not match {xa.shape}")
    if np.any(la < 0):
        raise ValueError("negative threshold")
    la = np.broadcast_to(la, xa.shape)

    exact = xa.dtype == object and la.dtype == object
    if not exact:
        xf, lf = xa.astype(np.float64), la.astype(np.float64)
        out = np.sign(xf) * np.maximum(np.abs(xf) - lf, 0.0)
        return float(out[0]) if scalar_input else out
    zero = RATIONAL.zero
    out = np.empty(xa.shape, dtype=object)
    for i, (xi, ti) in enumerate(zip(xa, la)):
        if xi > ti:
            out[i] = xi - ti
        elif xi < -ti:
            out[i] = xi + ti
        else:
            out[i] = zero
    return out[0] if scalar_input else out


def l1_ball_threshold(x, radius):
    """Threshold ``tau >= 0`` with ``||S_tau(x)||_1 == radius``, or 0 inside the ball.

    ``tau -> ||S_tau(x)||_1`` is piecewise linear with breakpoints at the
    sorted magnitudes; the segment holding ``radius`` is found by a scan and
    solved in closed form, so the result is exact for rational input.
    """
    if radius < 0:
        raise ValueError("negative radius")
    mags = sorted((abs(v) for v in x), reverse=True)
    zero = _zero_like(x)
    total = sum(mags, zero)
    if total <= radius:
        return zero
    # with tau in [mags[k], mags[k-1]] the norm is partial_k - k * tau
    partial = zero
    for k, a in enumerate(mags, start=1):
        partial += a
        nxt = mags[k] if k < len(mags) else zero
        tau = (partial - radius) / k
        if nxt <= tau <= a:
            return tau
    return mags[0]  # unreachable for radius >= 0


def project_l1_ball(x, radius):
    """Euclidean projection of ``x`` onto ``{u : ||u||_1 <= radius}``."""
    xa = _as_array(x)
    tau = l1_ball_threshold(xa, radius)
    if tau == 0:
        return xa.copy()
    return soft_threshold(xa, tau)


def weighted_l1_norm(x, w):
    """``sum_i w_i |x_i|``."""
    if len(x) != len(w):
        raise DimensionError("x and w lengths differ")
    if any(wi < 0 for wi in w):
        raise ValueError("negative weight")
    return sum((wi * abs(xi) for xi, wi in zip(x, w)), _zero_like(x))


def l1_norm(x):
    return sum((abs(v) for v in x), _zero_like(x))


def sq_norm(v):
    return sum((vi * vi for vi in v), _zero_like(v))


def misfit(problem: Problem, x) -> np.ndarray:
    """``y - Kx``."""
    x = np.asarray(x)
    if x.shape != (problem.n,):
        raise DimensionError(f"x has shape {x.shape}, expected ({problem.n},)")
    return problem.y - problem.K @ x


def remainder(problem: Problem, x) -> np.ndarray:
    """``K^T (y - Kx)``."""
    return problem.K.T @ misfit(problem, x)


def penalty_of(problem: Problem, r):
    """``max |r_i / w_i|`` over penalized components; zero if there are none."""
    fld = problem.field
    best = fld.zero
    for i in problem.penalized:
        q = abs(r[i]) / problem.w[i]
        if q > best:
            best = q
    return best
