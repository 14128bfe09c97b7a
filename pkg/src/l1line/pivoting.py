"""Entering-column policies and the two pivot-row rules.

BR walks the positive column entries in ratio order, bypassing each one
while the entering column's marginal cost stays positive; this is an exact
line search along the edge. WM takes the weighted median of all finite
signed ratios instead, which needs no sort but ignores the entering
vector's own cost and so can overshoot.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import Converged, EmptySample, NonPositivePivot
from .tableau import Candidate, CondensedTableau

_SMALL = 32


class ColumnPolicy(str, enum.Enum):
    MAX_MC = "max-mc"
    INTERCEPT_FIRST = "intercept-first"
    SLOPE_FIRST = "slope-first"


class PivotRule(str, enum.Enum):
    BR = "BR"
    WM = "WM"


@dataclass
class OpCounter:
    """Tally of elements examined by the selection routines."""

    scanned: int = 0
    calls: int = 0


@dataclass(frozen=True)
class MedianResult:
    value: float
    index: int


def weighted_median(values, weights, *, slack: float = 0.0, counter: OpCounter | None = None) -> MedianResult:
    """Lower weighted median by partition-based selection.

    Returns the first element, in (value, input position) order, at which
    the running weight reaches half the total (less ``slack``). Each round
    partitions around the exact median of the remaining values, so the total
    work is linear in the sample size; nothing is fully sorted except
    blocks of at most 32 elements.
    """
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    n = len(values)
    if n == 0:
        raise EmptySample("weighted median of an empty sample")
    if len(weights) != n:
        raise ValueError("values and weights differ in length")
    half = 0.5 * float(weights.sum()) - slack
    below = 0.0
    idx = np.arange(n)
    if counter is not None:
        counter.calls += 1
    while True:
        k = len(idx)
        v = values[idx]
        if counter is not None:
            counter.scanned += k
        if k <= _SMALL:
            order = np.lexsort((idx, v))
            cum = below + np.cumsum(weights[idx[order]])
            j = int(np.argmax(cum >= half)) if cum[-1] >= half else k - 1
            i = int(idx[order[j]])
            return MedianResult(float(values[i]), i)
        pivot = np.partition(v, k // 2)[k // 2]
        lt = v < pivot
        eq = v == pivot
        w_lt = float(weights[idx[lt]].sum())
        if below + w_lt >= half:
            idx = idx[lt]
            continue
        w_eq = float(weights[idx[eq]].sum())
        if below + w_lt + w_eq >= half:
            tie = idx[eq]  # already in input order
            cum = below + w_lt + np.cumsum(weights[tie])
            i = int(tie[int(np.argmax(cum >= half))])
            return MedianResult(float(values[i]), i)
        below += w_lt + w_eq
        idx = idx[~(lt | eq)]
        if len(idx) == 0:  # rounding left the target just out of reach
            i = int(np.flatnonzero(values == values.max())[-1])
            return MedianResult(float(values[i]), i)


def select_entering(tab: CondensedTableau, policy: ColumnPolicy = ColumnPolicy.MAX_MC) -> Candidate:
    """Choose the entering column.

    Parameter columns take precedence while either parameter is still
    nonbasic; among eligible columns the largest effective MC wins, the
    first column on ties (within TOLER). The intercept-first and slope-first policies
    only decide which parameter goes first.
    """
    cands = tab.entering_candidates()
    if not cands:
        raise Converged("no column has a positive marginal cost")
    params = [c for c in cands if c.is_param]
    if params:
        if policy is not ColumnPolicy.MAX_MC:
            want = 1 if policy is ColumnPolicy.INTERCEPT_FIRST else 2
            for c in params:
                if abs(int(tab.col_labels[c.col])) == want:
                    return c
        cands = params
    best = cands[0]
    for c in cands[1:]:
        if c.effective_mc > best.effective_mc + tab.tol:
            best = c
    return best


def _pivot_pool(tab: CondensedTableau) -> np.ndarray:
    """Rows allowed to leave: everything except the parameter rows."""
    return ~tab.param_rows()


def br_pivot_row(tab: CondensedTableau, col: int, stats: OpCounter | None = None) -> int:
    """BR bypass rule on column ``col`` (already flipped to its entering sign)."""
    e = tab.C[:, col]
    rows = np.flatnonzero(_pivot_pool(tab) & (e > tab.tol))
    if len(rows) == 0:
        raise NonPositivePivot(f"no positive pivot candidate in column {col}")
    ratios = tab.rhs[rows] / e[rows]
    order = np.lexsort((rows, ratios))
    rows = rows[order]
    drop = 2.0 * tab.row_costs()[rows] * e[rows]
    remaining = tab.mc[col] - np.cumsum(drop)
    hit = remaining < -tab.tol
    j = int(np.argmax(hit)) if hit.any() else len(rows) - 1
    if stats is not None:
        stats.calls += 1
        stats.scanned += j  # bypasses
    return int(rows[j])


def wm_pivot_row(tab: CondensedTableau, col: int, counter: OpCounter | None = None) -> int:
    """Weighted-median rule on column ``col``.

    Candidates are all non-parameter rows with a nonzero entry, valued by
    R/e and weighted by w|e|. If the median row cannot serve as a pivot
    (entry not positive), the nearest positive-entry row above it in ratio
    order is used, else the nearest below.
    """
    e = tab.C[:, col]
    rows = np.flatnonzero(_pivot_pool(tab) & (np.abs(e) > tab.tol))
    if not np.any(e[rows] > tab.tol):
        raise NonPositivePivot(f"no positive pivot candidate in column {col}")
    ratios = tab.rhs[rows] / e[rows]
    wts = tab.row_costs()[rows] * np.abs(e[rows])
    med = weighted_median(ratios, wts, slack=0.5 * tab.tol, counter=counter)
    j = med.index
    if e[rows[j]] > tab.tol:
        return int(rows[j])
    pos = e[rows] > tab.tol
    key_r, key_i = ratios[j], j
    above = pos & ((ratios > key_r) | ((ratios == key_r) & (np.arange(len(rows)) > key_i)))
    if above.any():
        cand = np.flatnonzero(above)
        best = cand[np.lexsort((cand, ratios[cand]))[0]]
    else:
        cand = np.flatnonzero(pos)
        best = cand[np.lexsort((-cand, -ratios[cand]))[0]]
    if counter is not None:
        counter.scanned += len(rows)
    return int(rows[best])
