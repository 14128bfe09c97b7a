"""Problem data and direct evaluation of the weighted L1 objective."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InputError

DEFAULT_TOLER = 1e-11


@dataclass(frozen=True)
class DataPoint:
    t: float
    d: float
    w: float = 1.0


@dataclass(frozen=True, eq=False)
class DataSet:
    """Ordered observations ``(t_i, d_i, w_i)``.

    Stored column-wise as read-only float arrays so that million-point sets
    stay cheap. Row ``i`` (0-based) is data label ``i + 3`` in a tableau.
    """

    t: np.ndarray
    d: np.ndarray
    w: np.ndarray = None  # type: ignore[assignment]
    name: str = ""

    def __post_init__(self):
        t = np.array(self.t, dtype=float, copy=True).ravel()
        d = np.array(self.d, dtype=float, copy=True).ravel()
        if self.w is None:
            w = np.ones_like(t)
        else:
            w = np.array(self.w, dtype=float, copy=True).ravel()
        if not (len(t) == len(d) == len(w)):
            raise InputError(f"t, d, w lengths differ: {len(t)}, {len(d)}, {len(w)}")
        if len(t) == 0:
            raise InputError("a data set needs at least one point")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(d)) and np.all(np.isfinite(w))):
            raise InputError("t, d and w must all be finite")
        if np.any(w <= 0):
            bad = int(np.argmax(w <= 0))
            raise InputError(f"weight of point {bad} is not positive: {w[bad]!r}")
        for a in (t, d, w):
            a.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_points(cls, points: Iterable, name: str = "") -> "DataSet":
        """Build from ``DataPoint`` objects or ``(t, d[, w])`` tuples."""
        ts, ds, ws = [], [], []
        for p in points:
            if isinstance(p, DataPoint):
                ts.append(p.t), ds.append(p.d), ws.append(p.w)
            else:
                ts.append(p[0]), ds.append(p[1]), ws.append(p[2] if len(p) > 2 else 1.0)
        return cls(np.array(ts, dtype=float), np.array(ds, dtype=float), np.array(ws, dtype=float), name=name)

    @property
    def m(self) -> int:
        return len(self.t)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def points(self) -> list[DataPoint]:
        return [DataPoint(float(a), float(b), float(c)) for a, b, c in zip(self.t, self.d, self.w)]

    def __iter__(self) -> Iterator[DataPoint]:
        return iter(self.points)

    @property
    def unweighted(self) -> bool:
        return bool(np.all(self.w == 1.0))

    def with_d(self, d: Sequence[float], name: str | None = None) -> "DataSet":
        """Same abscissas and weights, new ordinates."""
        return DataSet(self.t, d, self.w, name=self.name if name is None else name)

    def with_weights(self, w: Sequence[float] | None, name: str | None = None) -> "DataSet":
        return DataSet(self.t, self.d, w, name=self.name if name is None else name)

    def duplicated_by_weight(self) -> "DataSet":
        """Repeat row i ``w_i`` times with unit weight (integer weights only)."""
        reps = np.rint(self.w).astype(int)
        if not np.allclose(reps, self.w):
            raise InputError("row duplication needs integer weights")
        return DataSet(np.repeat(self.t, reps), np.repeat(self.d, reps), name=f"{self.name}-dup")


@dataclass(frozen=True)
class LineParams:
    """Intercept ``a1`` and slope ``a2`` of ``d = a1 + a2 t``."""

    a1: float
    a2: float

    def __post_init__(self):
        if not (np.isfinite(self.a1) and np.isfinite(self.a2)):
            raise InputError(f"line parameters must be finite, got ({self.a1}, {self.a2})")
        object.__setattr__(self, "a1", float(self.a1))
        object.__setattr__(self, "a2", float(self.a2))

    def __add__(self, other: "LineParams") -> "LineParams":
        return LineParams(self.a1 + other.a1, self.a2 + other.a2)

    def __call__(self, t):
        return self.a1 + self.a2 * t

    def key(self, digits: int = 9) -> tuple[float, float]:
        """Rounded pair used to tell distinct lines apart."""
        return (round(self.a1, digits) + 0.0, round(self.a2, digits) + 0.0)

    def close_to(self, other: "LineParams", atol: float = 1e-9) -> bool:
        return abs(self.a1 - other.a1) <= atol and abs(self.a2 - other.a2) <= atol


ZERO_LINE = LineParams(0.0, 0.0)


class SignCounts(NamedTuple):
    P: int
    N: int
    Z: int

    def balanced(self, m: int | None = None) -> bool:
        """Residual sign balance that every optimum satisfies."""
        m = self.P + self.N + self.Z if m is None else m
        bound = self.Z - 1 if m % 2 else self.Z
        return abs(self.P - self.N) <= bound


def compute_residuals(ds: DataSet, line: LineParams) -> np.ndarray:
    return ds.d - (line.a1 + line.a2 * ds.t)


def evaluate_sar(ds: DataSet, line: LineParams) -> float:
    """Weighted sum of absolute residuals of ``line`` on ``ds``."""
    return float(np.sum(ds.w * np.abs(compute_residuals(ds, line))))


def classify_signs(residuals, tol: float = DEFAULT_TOLER) -> SignCounts:
    r = np.asarray(residuals, dtype=float)
    pos = int(np.count_nonzero(r > tol))
    neg = int(np.count_nonzero(r < -tol))
    return SignCounts(pos, neg, len(r) - pos - neg)


def predict(line: LineParams, t: float) -> float:
    return line.a1 + line.a2 * t
