"""Command-line frontend: ``l1path solve | check | experiment``.

Exit status is 0 on success (or a certified path), 1 on failure (or a
rejected path) and 2 for usage errors or an indeterminate check.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import experiment, homotopy, iterative
from .field import FieldError, ParseError, format_scalar
from .io import RECORD_FIELDS, RecordWriter, node_record, read_path_file, read_problem, read_vector
from .pathtools import check_minimizer_list
from .problem import DimensionError, Problem

ALGORITHMS = ("homotopy", "tlw", "plw", "psd", "alw", "asd")


class UsageError(Exception):
    pass


def _problem_args(p: argparse.ArgumentParser):
    p.add_argument("--matrix", required=True, help="matrix K as CSV or JSON (JSON may also hold y and w)")
    p.add_argument("--data", help="data vector y")
    p.add_argument("--weights", help="nonnegative weight vector w (default all ones)")
    p.add_argument("--backend", choices=("rational", "float"), default="rational")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="l1path", description="Weighted lasso paths and iterative solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="minimize ||Kx - y||^2 + 2 lam sum w_i |x_i|")
    _problem_args(s)
    s.add_argument("--algorithm", choices=ALGORITHMS, default="homotopy")
    stops = s.add_mutually_exclusive_group()
    stops.add_argument("--stop-penalty", metavar="LAM", help="stop at this penalty (homotopy)")
    stops.add_argument("--stop-l1norm", metavar="R", help="stop when ||x||_1 reaches R (homotopy)")
    stops.add_argument("--stop-discrepancy", metavar="D", help="stop when ||Kx - y||^2 drops to D (homotopy)")
    stops.add_argument("--stop-nonzeros", metavar="N", type=int, help="stop at N nonzeros (homotopy)")
    s.add_argument("--max-iters", type=int, help="node limit (homotopy) or iteration count (iterative)")
    s.add_argument("--max-seconds", type=float, help="wall-clock limit")
    s.add_argument("--penalty", metavar="LAM", help="penalty for tlw")
    s.add_argument("--radius", metavar="R", help="l1-ball radius for plw, psd, alw, asd")
    s.add_argument("--numsteps", type=int, default=10, help="radius ramp length for alw, asd (default 10)")
    s.add_argument("--start", help="starting vector for tlw, plw, psd (default zero)")
    s.add_argument("--scale", metavar="C", help="iterate on (cK, cy); use to bring ||K|| below sqrt(2)")
    s.add_argument("--record", metavar="FIELDS", help=f"comma-separated subset of {','.join(RECORD_FIELDS)}")
    s.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    s.add_argument("--verbose", type=int, choices=(0, 1, 2), default=0)
    s.add_argument("--out", help="record file (default stdout)")

    c = sub.add_parser("check", help="certify a list of path nodes")
    _problem_args(c)
    c.add_argument("--path", required=True, help="CSV rows 'lam,x_1,...,x_n' in decreasing lam")

    e = sub.add_parser("experiment", help="random regression or scaling experiment")
    e.add_argument("--kind", choices=("regression", "scaling"), default="regression")
    e.add_argument("--seed", type=int, default=1)
    e.add_argument("--m", type=int, default=30)
    e.add_argument("--n", type=int, default=100)
    e.add_argument("--sparsity", type=int, default=10)
    e.add_argument("--noise", type=float, default=0.03, help="||e|| as a fraction of ||K x_in||")
    e.add_argument("--identity", action="store_true", help="use K = I (requires m = n)")
    e.add_argument("--iters", type=int, default=200, help="iterations for the tlw/alw convergence curves")
    e.add_argument("--stop-nonzeros", type=int, default=60, help="support size ending a scaling run")
    e.add_argument("--out", required=True, help="output directory")
    return parser


def _value(text, fld):
    try:
        return fld.parse(text)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc


def _fields(spec):
    if not spec:
        return None
    fields = [f.strip() for f in spec.split(",") if f.strip()]
    bad = [f for f in fields if f not in RECORD_FIELDS]
    if bad:
        raise UsageError(f"unknown record field(s) {', '.join(bad)}")
    return fields


def _homotopy_stop(args, fld):
    if args.stop_penalty is not None:
        rule = homotopy.Penalty(_value(args.stop_penalty, fld))
    elif args.stop_l1norm is not None:
        rule = homotopy.MaxL1Norm(_value(args.stop_l1norm, fld))
    elif args.stop_discrepancy is not None:
        rule = homotopy.MinDiscrepancy(_value(args.stop_discrepancy, fld))
    elif args.stop_nonzeros is not None:
        rule = homotopy.MaxNonZero(args.stop_nonzeros)
    else:
        rule = homotopy.Penalty(fld.zero)
    rules = [rule]
    if args.max_seconds is not None:
        limit = args.max_seconds
        rules.append(homotopy.Predicate(lambda nd: nd.elapsed >= limit))
    return rules


def _iter_stop(args, default):
    n = args.max_iters if args.max_iters is not None else default
    limit = args.max_seconds
    if limit is None:
        return lambda s: s.counter >= n
    return lambda s: s.counter >= n or s.elapsed >= limit


def _scaled(problem: Problem, text):
    if text is None:
        return problem
    c = _value(text, problem.field)
    return Problem(c * problem.K, c * problem.y, problem.w, backend=problem.field)


def _run_iterative(args, problem, collect):
    fld = problem.field
    alg = args.algorithm
    if any(v is not None for v in (args.stop_penalty, args.stop_l1norm, args.stop_discrepancy, args.stop_nonzeros)):
        raise UsageError("--stop-* flags apply to the homotopy algorithm only")
    start = None
    if args.start is not None:
        start = read_vector(args.start, fld)
    if alg == "tlw":
        if args.penalty is None:
            raise UsageError("tlw needs --penalty")
        return iterative.thresholded_landweber(problem, _value(args.penalty, fld), start=start,
                                               collect=collect, stop=_iter_stop(args, 1))
    if args.radius is None:
        raise UsageError(f"{alg} needs --radius")
    R = _value(args.radius, fld)
    if alg == "plw":
        return iterative.projected_landweber(problem, R, start=start, collect=collect, stop=_iter_stop(args, 1))
    if alg == "psd":
        return iterative.projected_steepest_descent(problem, R, start=start, collect=collect,
                                                    stop=_iter_stop(args, 1))
    if args.start is not None:
        raise UsageError(f"{alg} always starts from zero")
    fn = iterative.adaptive_landweber if alg == "alw" else iterative.adaptive_steepest_descent
    return fn(problem, R, args.numsteps, collect=collect, stop=_iter_stop(args, args.numsteps))


def _result_json(result, problem) -> str:
    final = result.final
    return json.dumps({
        "x": [format_scalar(v) if problem.field.exact else float(v) for v in final.x],
        "penalty": format_scalar(final.penalty) if problem.field.exact else float(final.penalty),
        "counter": int(final.counter),
        "stopped_by": result.stopped_by,
    })


def cmd_solve(args) -> int:
    problem = read_problem(args.matrix, args.data, args.weights, args.backend)
    fields = _fields(args.record)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = RecordWriter(out, fields, args.format) if fields else None
        if args.algorithm == "homotopy":
            if args.penalty is not None or args.radius is not None or args.scale is not None:
                raise UsageError("--penalty, --radius and --scale apply to iterative algorithms")
            collect = (lambda nd: writer.write(node_record(nd, fields, problem))) if writer else None
            result = homotopy.find_minimizer(problem, _homotopy_stop(args, problem.field), collect,
                                             verbose=args.verbose, max_nodes=args.max_iters)
        else:
            problem = _scaled(problem, args.scale)
            lam = _value(args.penalty, problem.field) if args.algorithm == "tlw" and args.penalty else None

            def collect(s):
                if args.verbose:
                    print(f"iterate {s.counter}: |x|_1={format_scalar(s.l1norm)} "
                          f"|Kx-y|^2={format_scalar(s.discrepancy)}", file=sys.stderr)
                if writer:
                    writer.write(node_record(s, fields, problem, lam))

            result = _run_iterative(args, problem, collect)
    finally:
        if args.out:
            out.close()
    if args.out or not fields:
        print(_result_json(result, problem))
    return 0


def cmd_check(args) -> int:
    problem = read_problem(args.matrix, args.data, args.weights, args.backend)
    lambdas, xs, exact = read_path_file(args.path)
    if not exact:
        print("Indeterminate: inexact input")
        return 2
    report = check_minimizer_list(problem, xs, lambdas)
    if report.verdict is None:
        print(f"Indeterminate: {report.reason}")
        return 2
    if report.verdict:
        print("True")
        return 0
    print(f"False: {report.reason}")
    return 1


def cmd_experiment(args) -> int:
    if args.kind == "scaling":
        summary = experiment.run_scaling(args.seed, args.m, args.n, args.stop_nonzeros, args.out)
    else:
        summary = experiment.run_regression(
            args.seed, args.m, args.n, args.sparsity, args.noise, args.out,
            identity=args.identity, iters=args.iters,
        )
    print(json.dumps(summary, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"solve": cmd_solve, "check": cmd_check, "experiment": cmd_experiment}[args.command]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return handler(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ParseError, DimensionError, FieldError, ValueError, OSError, KeyError) as exc:
        print(f"l1path: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
