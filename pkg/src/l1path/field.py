"""Arithmetic backends shared by every solver.

Two backends exist: exact rationals (``fractions.Fraction`` held in numpy
object arrays) and IEEE doubles (``float64`` arrays). Solvers are written
once against :class:`Field` and never branch on the concrete type except
through it.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np

__all__ = [
    "DEFAULT_TOLERANCE",
    "EXACT",
    "FLOAT",
    "RATIONAL",
    "Field",
    "FieldError",
    "FloatField",
    "ParseError",
    "RationalField",
    "SingularSystemError",
    "Tolerance",
    "approx_equal",
    "field_of",
    "format_scalar",
    "parse_rational",
]


class FieldError(ArithmeticError):
    """Base class for arithmetic failures in either backend."""


class SingularSystemError(FieldError):
    """A linear system has no unique solution."""


class ParseError(ValueError):
    """A scalar could not be read in the requested backend."""


@dataclass(frozen=True)
class Tolerance:
    """Tie and zero thresholds for the float backend.

    ``tie_rel`` decides when two remainder ratios count as equal,
    ``zero_abs`` when a step length or coefficient counts as zero.
    """

    tie_rel: float = 1e-9
    zero_abs: float = 1e-12

    def __post_init__(self):
        if self.tie_rel < 0 or self.zero_abs < 0:
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOLERANCE = Tolerance()
EXACT = Tolerance(0.0, 0.0)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or ``p`` into a Fraction; decimals are rejected."""
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ParseError(f"not an exact rational: {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise ParseError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_scalar(value) -> str:
    """Text form used by the file formats: ``p/q``/``p`` or shortest float repr."""
    if isinstance(value, (Fraction, Integral)):
        value = Fraction(value)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def _is_exact(value) -> bool:
    return isinstance(value, Rational) and not isinstance(value, bool)


def approx_equal(a, b, tol: Tolerance | None = None) -> bool:
    """Equality as used for tie detection.

    Exact scalars compare mathematically. Anything else uses
    ``|a - b| <= tie_rel * max(1, |a|, |b|)``.
    """
    if _is_exact(a) and _is_exact(b):
        return a == b
    tol = DEFAULT_TOLERANCE if tol is None else tol
    a, b = float(a), float(b)
    return abs(a - b) <= tol.tie_rel * max(1.0, abs(a), abs(b))


class Field:
    """Arithmetic contract. Use the module singletons ``RATIONAL``/``FLOAT``."""

    name: str
    exact: bool
    dtype: object
    tol: Tolerance

    zero: object
    one: object

    def scalar(self, value):
        raise NotImplementedError

    def array(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=object)
        out = np.empty(arr.shape, dtype=self.dtype)
        flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
        for i, v in enumerate(flat_in):
            flat_out[i] = self.scalar(v)
        return out

    def zeros(self, shape) -> np.ndarray:
        return self.array(np.zeros(shape, dtype=int))

    def equal(self, a, b) -> bool:
        return approx_equal(a, b, self.tol) if not self.exact else a == b

    def is_zero(self, a) -> bool:
        return a == 0 if self.exact else abs(a) <= self.tol.zero_abs

    def sign(self, a) -> int:
        return int(a > 0) - int(a < 0)

    def divide(self, a, b):
        if b == 0:
            raise FieldError("division by zero")
        return a / b

    def solve(self, A: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sqrt(self, a):
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, value) -> str:
        return format_scalar(value)

    def __repr__(self):
        return f"<Field {self.name}>"


class RationalField(Field):
    name = "rational"
    exact = True
    dtype = object
    tol = EXACT
    zero = Fraction(0)
    one = Fraction(1)

    #: bits of precision for irrational square roots
    sqrt_bits = 256

    def scalar(self, value) -> Fraction:
        if isinstance(value, bool):
            raise TypeError("booleans are not scalars")
        if isinstance(value, (Fraction, Integral)):
            return Fraction(value)
        if isinstance(value, Rational):
            return Fraction(value.numerator, value.denominator)
        if isinstance(value, str):
            return parse_rational(value)
        raise TypeError(
            f"{type(value).__name__} {value!r} is not exact; "
            "use the float backend or give p/q values"
        )

    def solve(self, A, b):
        return _solve_exact(A, b)

    def sqrt(self, a):
        """Exact square root when ``a`` is a rational square, else ``None``."""
        a = Fraction(a)
        if a < 0:
            raise FieldError("square root of a negative number")
        p, q = a.numerator, a.denominator
        rp, rq = math.isqrt(p), math.isqrt(q)
        if rp * rp == p and rq * rq == q:
            return Fraction(rp, rq)
        return None

    def sqrt_approx(self, a) -> Fraction:
        """Rational lower bound for sqrt(a) with relative error below 2**-sqrt_bits."""
        a = Fraction(a)
        p, q = a.numerator, a.denominator
        scale = 1 << self.sqrt_bits
        return Fraction(math.isqrt(p * q * scale * scale), q * scale)

    def parse(self, text):
        return parse_rational(text)


class FloatField(Field):
    name = "float"
    exact = False
    dtype = np.float64
    zero = 0.0
    one = 1.0

    #: largest condition number accepted by :meth:`solve`
    max_condition = 1e12

    def __init__(self, tol: Tolerance = DEFAULT_TOLERANCE):
        self.tol = tol

    def scalar(self, value) -> float:
        if isinstance(value, bool):
            raise TypeError("booleans are not scalars")
        if isinstance(value, str):
            return self.parse(value)
        return float(value)

    def array(self, values):
        arr = np.asarray(values, dtype=object)
        if arr.size and any(isinstance(v, str) for v in arr.reshape(-1)):
            return super().array(values)
        return np.array(arr, dtype=np.float64)

    def solve(self, A, b):
        A = np.asarray(A, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if A.shape[0] == 0:
            return np.zeros(0)
        if np.linalg.cond(A) > self.max_condition:
            raise SingularSystemError("ill-conditioned system")
        try:
            return np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(str(exc)) from None

    def sqrt(self, a):
        if a < 0:
            raise FieldError("square root of a negative number")
        return math.sqrt(a)

    def parse(self, text):
        try:
            return float(text)
        except ValueError:
            pass
        try:
            return float(parse_rational(text))
        except ParseError:
            raise ParseError(f"not a number: {text!r}") from None


def _solve_exact(A, b):
    """Gauss-Jordan elimination over the rationals."""
    n = len(A)
    rows = [[Fraction(v) for v in A[i]] + [Fraction(b[i])] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise SingularSystemError("singular system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        prow = rows[col]
        inv = 1 / prow[col]
        for c in range(col, n + 1):
            prow[c] *= inv
        for r in range(n):
            if r == col:
                continue
            f = rows[r][col]
            if f:
                row = rows[r]
                for c in range(col, n + 1):
                    row[c] -= f * prow[c]
    out = np.empty(n, dtype=object)
    out[:] = [row[n] for row in rows]
    return out


RATIONAL = RationalField()
FLOAT = FloatField()


def field_of(*arrays) -> Field:
    """Backend implied by the arrays: float64 anywhere means FLOAT."""
    for a in arrays:
        a = np.asarray(a)
        if a.dtype.kind in "iu":
            continue
        if a.dtype != object:
            return FLOAT
        if any(isinstance(v, float) for v in a.reshape(-1)):
            return FLOAT
    return RATIONAL
