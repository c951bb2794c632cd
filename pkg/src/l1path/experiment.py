"""Random experiments: sparse recovery against Tikhonov, and path growth.

Random numbers come from numpy's PCG64 bit generator (seeded with the
given integer). Uniforms are ``Generator.random``; normals use the polar
method on pairs of uniforms from ``(-1, 1)``, so the distribution is easy
to reproduce in another language.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np
from scipy.optimize import bisect

from .homotopy import MaxNonZero, MinDiscrepancy, find_minimizer
from .io import node_record
from .iterative import adaptive_landweber, thresholded_landweber
from .problem import Problem

__all__ = [
    "make_rng",
    "polar_normals",
    "make_regression",
    "tikhonov",
    "tikhonov_discrepancy",
    "run_regression",
    "run_scaling",
    "InfeasibleTargetError",
]


class InfeasibleTargetError(ValueError):
    """The requested discrepancy is below what any x can reach."""


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def polar_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normals by the polar (Marsaglia) method."""
    out = np.empty(size)
    k = 0
    while k < size:
        u, v = 2.0 * rng.random(2) - 1.0
        s = u * u + v * v
        if s == 0.0 or s >= 1.0:
            continue
        f = np.sqrt(-2.0 * np.log(s) / s)
        out[k] = u * f
        if k + 1 < size:
            out[k + 1] = v * f
        k += 2
    return out


def make_regression(seed, m, n, sparsity, noise, identity=False):
    """Normal ``K`` (or the identity), a ``sparsity``-sparse ``x_in`` and
    ``y = K x_in + e`` with ``||e|| = noise * ||K x_in||``.

    Returns ``(K, x_in, y, e)``.
    """
    if min(m, n, sparsity) < 1 or noise < 0:
        raise ValueError("m, n and sparsity must be positive and noise nonnegative")
    if sparsity > n:
        raise ValueError("sparsity exceeds n")
    if identity and m != n:
        raise ValueError("identity matrix needs m == n")
    rng = make_rng(seed)
    K = np.eye(n) if identity else polar_normals(rng, m * n).reshape(m, n)
    x_in = np.zeros(n)
    idx = rng.permutation(n)[:sparsity]
    x_in[idx] = polar_normals(rng, sparsity)
    clean = K @ x_in
    e = polar_normals(rng, m)
    ne = np.linalg.norm(e)
    e = e * (noise * np.linalg.norm(clean) / ne) if ne > 0 else e * 0.0
    return K, x_in, clean + e, e


def tikhonov(K, y, lam):
    """Solve ``(K^T K + lam I) x = K^T y`` through the SVD of ``K``."""
    U, s, Vt = np.linalg.svd(K, full_matrices=False)
    return Vt.T @ ((s / (s * s + lam)) * (U.T @ y))


def tikhonov_discrepancy(K, y, target, rtol=1e-10):
    """Tikhonov solution whose discrepancy ``||Kx - y||^2`` equals ``target``.

    ``lam`` is found by bisection on ``log lam``. Returns ``(x, lam)``.
    """
    U, s, Vt = np.linalg.svd(K, full_matrices=False)
    b = U.T @ y
    outside = max(float(y @ y - b @ b), 0.0)

    def disc(t):
        lam = np.exp(t)
        return float(np.sum((lam / (s * s + lam) * b) ** 2)) + outside

    if target < outside * (1 + rtol) or target == 0:
        raise InfeasibleTargetError(f"discrepancy {target} below the least-squares floor {outside}")
    if target >= float(y @ y):
        raise InfeasibleTargetError(f"discrepancy {target} not below ||y||^2; x = 0 already qualifies")
    lo, hi = -1.0, 1.0
    while disc(lo) > target:
        lo -= 10.0
    while disc(hi) < target:
        hi += 10.0
    t = bisect(lambda t: disc(t) / target - 1.0, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps,
               maxiter=1000)
    lam = float(np.exp(t))
    x = Vt.T @ ((s / (s * s + lam)) * b)
    return x, lam


def _relerr(x, ref):
    return float(np.linalg.norm(x - ref) / np.linalg.norm(ref))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _support(x):
    return {i for i, v in enumerate(x) if v != 0}


def regression(seed, m=30, n=100, sparsity=10, noise=0.03, identity=False):
    """L1 and L2 reconstructions matched to the noise level; no files written."""
    K, x_in, y, e = make_regression(seed, m, n, sparsity, noise, identity)
    problem = Problem(K, y, backend="float")
    d = float(e @ e)
    nodes = []
    res = find_minimizer(problem, MinDiscrepancy(d), collect=nodes.append)
    if res.final.discrepancy > d * (1 + 1e-9) + 1e-12:
        raise InfeasibleTargetError(f"path ends at discrepancy {res.final.discrepancy} above {d}")
    x1 = np.asarray(res.x, dtype=float)
    if d == 0:
        x2, lam2 = np.linalg.lstsq(K, y, rcond=None)[0], 0.0
    else:
        x2, lam2 = tikhonov_discrepancy(K, y, d)
    return {
        "K": K, "x_in": x_in, "y": y, "e": e, "problem": problem, "nodes": nodes,
        "x_l1": x1, "lam_l1": float(res.final.lam), "x_l2": x2, "lam_l2": lam2, "target": d,
    }


def run_regression(seed, m, n, sparsity, noise, out, identity=False, iters=200) -> dict:
    """Write reconstructions, trade-off curve and iterative convergence curves to ``out``.

    Files: ``metrics.json``, ``reconstruction.csv``, ``tradeoff.csv``,
    ``convergence_tlw.csv`` and ``convergence_alw.csv``. The iterative
    schemes run on ``(K/c, y/c)`` with ``c = 1.01 ||K||_2`` (same minimizer,
    penalty ``lam/c^2``), because the unscaled normal matrix diverges.
    """
    os.makedirs(out, exist_ok=True)
    r = regression(seed, m, n, sparsity, noise, identity)
    x_in, x1, x2 = r["x_in"], r["x_l1"], r["x_l2"]
    true = _support(x_in)
    metrics = {
        "seed": seed, "m": m, "n": n, "sparsity": sparsity, "noise": noise,
        "target_discrepancy": r["target"],
        "l1_error": _relerr(x1, x_in), "l2_error": _relerr(x2, x_in),
        "l1_penalty": r["lam_l1"], "l2_penalty": r["lam_l2"],
        "l1_true_positives": len(_support(x1) & true), "l1_false_positives": len(_support(x1) - true),
        "l2_true_positives": len(_support(x2) & true), "l2_false_positives": len(_support(x2) - true),
        "nodes": len(r["nodes"]),
    }
    _write_csv(os.path.join(out, "reconstruction.csv"), ["index", "x_in", "x_l1", "x_l2"],
               [[i, repr(float(a)), repr(float(b)), repr(float(c))] for i, (a, b, c) in enumerate(zip(x_in, x1, x2))])
    _write_csv(os.path.join(out, "tradeoff.csv"), ["counter", "penalty", "l1norm", "discrepancy"],
               [[nd.counter, repr(float(nd.lam)), repr(float(nd.l1norm)), repr(float(nd.discrepancy))]
                for nd in r["nodes"]])

    xbar = x1
    ref = np.linalg.norm(xbar)
    if ref > 0 and iters > 0:
        c = 1.01 * np.linalg.norm(r["K"], 2)
        scaled = Problem(r["K"] / c, r["y"] / c, backend="float")

        def row(s):
            # discrepancy reported for the unscaled problem
            return [s.counter, repr(float(s.l1norm)), repr(float(s.discrepancy * c * c)),
                    repr(float(np.linalg.norm(s.x - xbar) / ref))]

        header = ["counter", "l1norm", "discrepancy", "error"]
        tlw = thresholded_landweber(scaled, r["lam_l1"] / (c * c), collect=row,
                                    stop=lambda s: s.counter >= iters)
        alw = adaptive_landweber(scaled, float(np.sum(np.abs(xbar))), 10, collect=row,
                                 stop=lambda s: s.counter >= iters)
        _write_csv(os.path.join(out, "convergence_tlw.csv"), header, tlw.collected)
        _write_csv(os.path.join(out, "convergence_alw.csv"), header, alw.collected)
        metrics["tlw_final_error"] = float(tlw.collected[-1][3])
        metrics["alw_final_error"] = float(alw.collected[-1][3])
    with open(os.path.join(out, "metrics.json"), "w") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return metrics


def scaling_problem(seed, m, n) -> Problem:
    rng = make_rng(seed)
    K = rng.uniform(-3.0, 3.0, size=(m, n))
    y = rng.uniform(-3.0, 3.0, size=m)
    return Problem(K, y, backend="float")


def run_scaling(seed, m, n, stop_nonzeros, out=None) -> dict:
    """Homotopy on a uniform ``[-3, 3]`` problem until ``stop_nonzeros`` nonzeros.

    Writes ``scaling.csv`` (counter, time, support size, fixed-point
    residual per node) when ``out`` is given.
    """
    problem = scaling_problem(seed, m, n)
    fields = ["counter", "time", "support_size", "fixed_point_residual"]
    res = find_minimizer(problem, MaxNonZero(stop_nonzeros), collect=lambda nd: node_record(nd, fields, problem))
    rows = res.collected
    if out is not None:
        os.makedirs(out, exist_ok=True)
        _write_csv(os.path.join(out, "scaling.csv"), fields, [[r[f] for f in fields] for r in rows])
    return {
        "seed": seed, "m": m, "n": n,
        "nodes": rows[-1]["counter"], "support_size": rows[-1]["support_size"],
        "seconds": rows[-1]["time"],
        "max_residual": max(r["fixed_point_residual"] for r in rows),
        "counter_ge_support": all(r["counter"] >= r["support_size"] for r in rows),
    }
