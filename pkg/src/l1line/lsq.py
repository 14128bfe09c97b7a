"""Closed-form weighted least-squares straight line."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DataSet, LineParams
from .errors import ShapeMismatch, SingularL2

# fsum below this size costs more than it protects
_COMPENSATE_FROM = 100_000


def _sum(x: np.ndarray) -> float:
    return math.fsum(x) if len(x) >= _COMPENSATE_FROM else float(np.sum(x))


@dataclass(frozen=True)
class L2Sums:
    C1: float  # sum w t
    C2: float  # sum w d
    C3: float  # sum w t^2
    C4: float  # sum w t d
    C5: float  # sum w

    @property
    def D(self) -> float:
        return self.C1 * self.C1 - self.C3 * self.C5

    def line(self, rel_tol: float = 1e-12) -> LineParams:
        D = self.D
        if abs(D) <= rel_tol * abs(self.C3 * self.C5):
            raise SingularL2("least-squares line is undefined: all t are equal")
        a2 = (self.C1 * self.C2 - self.C4 * self.C5) / D
        a1 = (self.C1 * self.C4 - self.C2 * self.C3) / D
        return LineParams(a1, a2)


def l2_sums(ds: DataSet) -> L2Sums:
    w, t, d = ds.w, ds.t, ds.d
    wt = w * t
    return L2Sums(_sum(wt), _sum(w * d), _sum(wt * t), _sum(wt * d), _sum(w))


def l2_fit(ds: DataSet) -> tuple[LineParams, L2Sums]:
    sums = l2_sums(ds)
    return sums.line(), sums


def l2_update_d(sums: L2Sums, ds_old: DataSet, ds_new: DataSet) -> L2Sums:
    """Refresh the two d-dependent sums after the ordinates change."""
    if ds_old.m != ds_new.m or not (np.array_equal(ds_old.t, ds_new.t) and np.array_equal(ds_old.w, ds_new.w)):
        raise ShapeMismatch("t and w must be unchanged to update only C2 and C4")
    w, t, d = ds_new.w, ds_new.t, ds_new.d
    return L2Sums(sums.C1, _sum(w * d), sums.C3, _sum(w * t * d), sums.C5)
