"""Brute-force references that share no code with the simplex path.

Some best L1 line always passes through two data points, so checking the
line through every pair of points with distinct t finds SAR* exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataSet, LineParams
from .errors import DegenerateAbscissas, EmptySample

SAR_RTOL = 1e-9


@dataclass(frozen=True)
class OracleResult:
    sar_star: float
    optimal_pairs: frozenset  # of (i, j) index pairs, i < j
    lines: tuple  # distinct optimal LineParams

    @property
    def n_lines(self) -> int:
        return len(self.lines)


def brute_force_best(ds: DataSet, rtol: float = SAR_RTOL) -> OracleResult:
    """Minimum SAR over all lines through two points; O(m^3) time.

    Ties are judged within ``rtol * max(1, SAR)``.
    """
    t, d, w = ds.t, ds.d, ds.w
    m = ds.m
    if m < 2 or np.all(t == t[0]):
        raise DegenerateAbscissas("need at least two distinct t values")
    best = np.inf
    hits: list[tuple[int, int, float, float, float]] = []
    for i in range(m - 1):
        j = np.arange(i + 1, m)
        dt = t[j] - t[i]
        ok = dt != 0
        j = j[ok]
        if len(j) == 0:
            continue
        slope = (d[j] - d[i]) / dt[ok]
        icpt = d[i] - slope * t[i]
        # rows: candidate lines, cols: data points
        sar = np.abs(d[None, :] - icpt[:, None] - slope[:, None] * t[None, :]) @ w
        lo = sar.min()
        atol = rtol * max(1.0, min(lo, best))
        if lo < best - atol:
            best = lo
            hits = [h for h in hits if h[2] <= best + atol]
        keep = np.flatnonzero(sar <= best + atol)
        hits.extend((i, int(j[k]), float(sar[k]), float(icpt[k]), float(slope[k])) for k in keep)
        best = min(best, lo)
    atol = rtol * max(1.0, best)
    hits = [h for h in hits if h[2] <= best + atol]
    lines: dict = {}
    for _, _, _, a1, a2 in hits:
        line = LineParams(a1, a2)
        if not any(line.close_to(other, 1e-9 * max(1.0, abs(a1), abs(a2))) for other in lines.values()):
            lines[line.key()] = line
    return OracleResult(float(best), frozenset((h[0], h[1]) for h in hits), tuple(lines.values()))


def _lower_weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    """Sort-based reference: smallest x whose cumulative weight reaches half."""
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    k = int(np.searchsorted(cum, 0.5 * cum[-1] * (1 - 1e-15)))
    return float(values[order][min(k, len(values) - 1)])


def median_oracle(ds: DataSet) -> float:
    """Best constant: a weighted median of d."""
    return _lower_weighted_median(ds.d, ds.w)


def slope_oracle(ds: DataSet) -> float:
    """Best line through the origin: weighted median of d/t with weights w|t|.

    Rows with t = 0 add a constant |d| and are left out.
    """
    nz = ds.t != 0
    if not np.any(nz):
        raise EmptySample("every t is zero; no finite ratios")
    t, d, w = ds.t[nz], ds.d[nz], ds.w[nz]
    return _lower_weighted_median(d / t, w * np.abs(t))
