from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .field import FLOAT, RATIONAL, Field, field_of

__all__ = ["Problem", "DimensionError"]


class DimensionError(ValueError):
    """Inconsistent matrix or vector sizes."""


def _backend(name_or_field, *arrays) -> Field:
    if isinstance(name_or_field, Field):
        return name_or_field
    if name_or_field is None:
        return field_of(*arrays)
    if name_or_field == "rational":
        return RATIONAL
    if name_or_field == "float":
        return FLOAT
    raise ValueError(f"unknown backend {name_or_field!r}")


@dataclass(frozen=True, eq=False)
class Problem:
    """Weighted lasso data: minimize ``||Kx - y||^2 + 2 lam sum_i w_i |x_i|``.

    ``backend`` may be ``"rational"``, ``"float"``, a :class:`Field`, or
    ``None`` to infer it (any float entry selects the float backend).
    Rational input must consist of ints, Fractions or ``"p/q"`` strings.
    """

    K: np.ndarray
    y: np.ndarray
    w: np.ndarray | None = None
    backend: object = None
    field: Field = field(init=False, repr=False)

    def __post_init__(self):
        K = np.asarray(self.K, dtype=object) if not isinstance(self.K, np.ndarray) else self.K
        y = np.asarray(self.y, dtype=object) if not isinstance(self.y, np.ndarray) else self.y
        w = self.w
        if w is not None and not isinstance(w, np.ndarray):
            w = np.asarray(w, dtype=object)
        arrays = [K, y] + ([w] if w is not None else [])
        fld = _backend(self.backend, *arrays)

        K = fld.array(K)
        y = fld.array(y)
        if K.ndim != 2 or K.shape[0] < 1 or K.shape[1] < 1:
            raise DimensionError(f"K must be a nonempty matrix, got shape {K.shape}")
        if y.ndim != 1 or y.shape[0] != K.shape[0]:
            raise DimensionError(f"y has shape {y.shape}, expected ({K.shape[0]},)")
        n = K.shape[1]
        w = fld.array(np.ones(n, dtype=int)) if w is None else fld.array(w)
        if w.shape != (n,):
            raise DimensionError(f"w has shape {w.shape}, expected ({n},)")
        if any(wi < 0 for wi in w):
            raise ValueError("weights must be nonnegative")
        if not fld.exact:
            for arr in (K, y, w):
                if not np.all(np.isfinite(arr)):
                    raise ValueError("non-finite entries in problem data")

        for name, val in (("K", K), ("y", y), ("w", w), ("field", fld)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "backend", fld.name)

    @property
    def shape(self) -> tuple[int, int]:
        return self.K.shape

    @property
    def n(self) -> int:
        return self.K.shape[1]

    @property
    def m(self) -> int:
        return self.K.shape[0]

    @cached_property
    def gram(self) -> np.ndarray:
        return self.K.T @ self.K

    @cached_property
    def Kty(self) -> np.ndarray:
        return self.K.T @ self.y

    @cached_property
    def penalized(self) -> np.ndarray:
        """Indices with nonzero weight."""
        return np.array([i for i in range(self.n) if self.w[i] != 0], dtype=int)

    @cached_property
    def unpenalized(self) -> np.ndarray:
        """Indices with zero weight."""
        return np.array([i for i in range(self.n) if self.w[i] == 0], dtype=int)

    def vector(self, values) -> np.ndarray:
        """Coerce ``values`` into this problem's backend, checking length n."""
        v = self.field.array(values)
        if v.shape != (self.n,):
            raise DimensionError(f"vector has shape {v.shape}, expected ({self.n},)")
        return v

    def with_weights(self, w) -> Problem:
        return Problem(self.K, self.y, w, backend=self.field)

    def as_float(self) -> Problem:
        return Problem(
            self.K.astype(np.float64), self.y.astype(np.float64),
            self.w.astype(np.float64), backend=FLOAT,
        )
