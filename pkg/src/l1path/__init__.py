"""Weighted lasso: exact regularization paths and iterative solvers."""

from .field import (
    EXACT,
    FLOAT,
    RATIONAL,
    FieldError,
    ParseError,
    SingularSystemError,
    Tolerance,
    format_scalar,
    parse_rational,
)
from .homotopy import (
    InitialPointError,
    MaxL1Norm,
    MaxNonZero,
    MinDiscrepancy,
    NonUniquePathError,
    PathNode,
    Penalty,
    Predicate,
    SolveResult,
    find_minimizer,
    initial_node,
    solve_path,
    verify_kkt,
)
from .iterative import (
    DivergenceError,
    adaptive_landweber,
    adaptive_steepest_descent,
    projected_landweber,
    projected_steepest_descent,
    thresholded_landweber,
)
from .ops import project_l1_ball, soft_threshold
from .pathtools import CheckReport, Path, check_minimizer_list, interpolate, lambda_of, trade_off_curve
from .problem import DimensionError, Problem

__version__ = "0.1.0"

__all__ = [
    "EXACT", "FLOAT", "RATIONAL", "FieldError", "ParseError", "SingularSystemError", "Tolerance",
    "format_scalar", "parse_rational",
    "InitialPointError", "MaxL1Norm", "MaxNonZero", "MinDiscrepancy", "NonUniquePathError", "PathNode",
    "Penalty", "Predicate", "SolveResult", "find_minimizer", "initial_node", "solve_path", "verify_kkt",
    "DivergenceError", "adaptive_landweber", "adaptive_steepest_descent", "projected_landweber",
    "projected_steepest_descent", "thresholded_landweber",
    "project_l1_ball", "soft_threshold",
    "CheckReport", "Path", "check_minimizer_list", "interpolate", "lambda_of", "trade_off_curve",
    "DimensionError", "Problem",
]
