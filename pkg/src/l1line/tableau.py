"""Condensed simplex tableau for the two-parameter L1 line problem.

The LP being solved is::

    minimize  sum w_i (u_i + v_i)
    s.t.      d_i = (b1 - c1) + (b2 - c2) t_i + u_i - v_i,   all variables >= 0

Only two nonbasic columns and the right-hand side are stored. Every vector
carries a signed integer label: +1/-1 for b1/c1, +2/-2 for b2/c2 and
+(i+3)/-(i+3) for u_i/v_i of 0-based data row ``i``. A hidden partner
(c1 for b1, v_i for u_i, ...) is the negated column, so it never needs
storage. Marginal costs are reduced costs ``z_j - c_j``; the two members
of a u/v pair sum to ``-2 w_i`` and of a parameter pair to 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOLER, DataSet, LineParams
from .errors import DegenerateScale, NonPositivePivot, NotConverged

DATA_OFFSET = 3  # label of data row 0


def is_param(label: int) -> bool:
    return abs(label) <= 2


def data_index(label: int) -> int:
    return abs(label) - DATA_OFFSET


@dataclass
class Candidate:
    col: int
    effective_mc: float
    flipped: bool
    is_param: bool


class CondensedTableau:
    """Mutable simplex state; pivots and flips update it in place.

    Attributes
    ----------
    C : (m, 2) array
        Entries of the two stored nonbasic columns.
    rhs : (m,) array
        The R column.
    labels : (m,) int array
        Label of the basic vector in each row.
    col_labels : (2,) int array
    mc : (3,) array
        Marginal costs of the two columns followed by the current SAR.
    weights : (m,) array
        ``w_i`` indexed by data row, not by tableau row.
    """

    def __init__(self, C, rhs, labels, col_labels, mc, weights, tol=DEFAULT_TOLER, t=None):
        self.C = np.asarray(C, dtype=float)
        self.rhs = np.asarray(rhs, dtype=float)
        self.labels = np.asarray(labels, dtype=np.int64)
        self.col_labels = np.asarray(col_labels, dtype=np.int64)
        self.mc = np.asarray(mc, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.tol = float(tol)
        self.t = None if t is None else np.asarray(t, dtype=float)
        self.n_params = int(np.count_nonzero(np.abs(self.labels) <= 2))

    # -- construction -------------------------------------------------

    @classmethod
    def initialize(cls, ds: DataSet, tol: float = DEFAULT_TOLER) -> "CondensedTableau":
        """Initial basis of all u_i, with rows sign-normalised so R >= 0."""
        m = ds.m
        C = np.column_stack([np.ones(m), ds.t.astype(float)])
        rhs = ds.d.astype(float).copy()
        labels = np.arange(DATA_OFFSET, m + DATA_OFFSET, dtype=np.int64)
        neg = rhs < -tol
        C[neg] *= -1.0
        rhs[neg] *= -1.0
        labels[neg] *= -1
        w = ds.w
        mc = np.empty(3)
        mc[:2] = w @ C
        mc[2] = float(w @ rhs)
        return cls(C, rhs, labels, np.array([1, 2]), mc, w, tol, t=ds.t)

    def copy(self) -> "CondensedTableau":
        return CondensedTableau(
            self.C.copy(), self.rhs.copy(), self.labels.copy(), self.col_labels.copy(),
            self.mc.copy(), self.weights, self.tol, t=self.t,
        )

    # -- small accessors ------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.rhs)

    @property
    def sar(self) -> float:
        return float(self.mc[2])

    def entry(self, row: int, col: int) -> float:
        return float(self.C[row, col])

    def label_cost(self, label: int) -> float:
        return 0.0 if is_param(label) else float(self.weights[data_index(label)])

    def row_costs(self) -> np.ndarray:
        """Objective coefficient of each row's basic vector (0 for parameters)."""
        lab = np.abs(self.labels)
        out = np.zeros(self.m)
        data = lab > 2
        out[data] = self.weights[lab[data] - DATA_OFFSET]
        return out

    def param_rows(self) -> np.ndarray:
        return np.abs(self.labels) <= 2

    def basis_signature(self) -> tuple:
        return (tuple(sorted(int(x) for x in self.col_labels)), tuple(int(x) for x in self.labels))

    def nonbasic_data_labels(self) -> list[int]:
        return [int(c) for c in self.col_labels if not is_param(int(c))]

    def interpolation_points(self) -> list[float]:
        """Abscissas of the data rows whose labels sit on the nonbasic columns."""
        idx = sorted(data_index(c) for c in self.nonbasic_data_labels())
        if self.t is None:
            return [float(i + DATA_OFFSET) for i in idx]
        return [float(self.t[i]) for i in idx]

    # -- pricing --------------------------------------------------------

    def effective_mc(self, col: int) -> tuple[float, bool]:
        """Best of a column's MC and its hidden partner's MC."""
        label = int(self.col_labels[col])
        own = float(self.mc[col])
        partner = -2.0 * self.label_cost(label) - own
        if partner > own:
            return partner, True
        return own, False

    def entering_candidates(self) -> list[Candidate]:
        """Every column (in storage order) whose effective MC exceeds TOLER."""
        out = []
        for col in range(2):
            eff, flipped = self.effective_mc(col)
            if eff > self.tol:
                out.append(Candidate(col, eff, flipped, is_param(int(self.col_labels[col]))))
        return out

    def is_converged(self) -> bool:
        return not self.entering_candidates()

    # -- transformations ------------------------------------------------

    def flip_column(self, col: int) -> None:
        """Replace a nonbasic column by its hidden partner."""
        label = int(self.col_labels[col])
        self.C[:, col] *= -1.0
        self.mc[col] = -2.0 * self.label_cost(label) - self.mc[col]
        self.col_labels[col] = -label

    def flip_row(self, row: int) -> None:
        """Swap a row's basic vector with its partner (u_i <-> v_i, b <-> c).

        Equivalent to a pivot on the hidden partner column with element -1.
        """
        cost = self.label_cost(int(self.labels[row]))
        if cost:
            self.mc[:2] -= 2.0 * cost * self.C[row]
            self.mc[2] -= 2.0 * cost * self.rhs[row]
        self.C[row] *= -1.0
        self.rhs[row] *= -1.0
        self.labels[row] *= -1

    def apply_pivot(self, row: int, col: int, flipped: bool = False) -> "CondensedTableau":
        """Exchange the basic vector of ``row`` with the vector of column ``col``.

        ``flipped`` first replaces the column by its hidden partner. Rows whose
        R entry ends up below -TOLER are then sign-flipped to restore
        feasibility; this is where bypassed pivot candidates go.
        """
        if flipped:
            self.flip_column(col)
        p = self.C[row, col]
        if not p > self.tol:
            raise NonPositivePivot(f"pivot element {p!r} at row {row}, column {col} is not positive")
        prow = self.C[row].copy()
        prhs = self.rhs[row]
        ck = self.C[:, col] / p
        self.C -= np.outer(ck, prow)
        self.rhs -= ck * prhs
        self.C[:, col] = -ck
        self.C[row] = prow / p
        self.C[row, col] = 1.0 / p
        self.rhs[row] = prhs / p
        mck = self.mc[col] / p
        self.mc[:2] -= mck * prow
        self.mc[col] = -mck
        self.mc[2] -= mck * prhs

        entering = int(self.col_labels[col])
        self.col_labels[col] = self.labels[row]
        self.labels[row] = entering

        # Parameter rows are kept at the top of the tableau, in entry order.
        if is_param(entering):
            slot = self.n_params
            if row != slot:
                self._swap_rows(row, slot)
            self.n_params += 1

        self._restore_feasibility()
        return self

    def _swap_rows(self, a: int, b: int) -> None:
        self.C[[a, b]] = self.C[[b, a]]
        self.rhs[[a, b]] = self.rhs[[b, a]]
        self.labels[[a, b]] = self.labels[[b, a]]

    def _restore_feasibility(self) -> None:
        neg = np.flatnonzero(self.rhs < -self.tol)
        if len(neg) == 0:
            return
        costs = self.row_costs()[neg]
        self.mc[:2] -= 2.0 * (costs[:, None] * self.C[neg]).sum(axis=0)
        self.mc[2] -= 2.0 * float(costs @ self.rhs[neg])
        self.C[neg] *= -1.0
        self.rhs[neg] *= -1.0
        self.labels[neg] *= -1

    def mc_in_range(self, mc_pair) -> bool:
        """True when both columns' MCs satisfy the optimality bounds."""
        for col in range(2):
            label = int(self.col_labels[col])
            lo = -2.0 * self.label_cost(label)
            if not (lo - self.tol <= mc_pair[col] <= self.tol):
                return False
        return True

    def flip_degenerate_rows(self) -> list[int]:
        """Sign-flip zero-R rows when doing so makes the tableau optimal.

        A row with |R| <= TOLER can swap u_i and v_i without changing SAR;
        the flip is kept only if the resulting marginal costs pass the
        convergence bounds. Returns the labels of the flipped rows (after
        the flip).
        """
        if self.is_converged():
            return []
        flipped = []
        costs = self.row_costs()
        for row in np.flatnonzero((np.abs(self.rhs) <= self.tol) & (costs > 0)):
            trial = self.mc[:2] - 2.0 * costs[row] * self.C[row]
            if self.mc_in_range(trial):
                self.flip_row(int(row))
                flipped.append(int(self.labels[row]))
                break
        return flipped

    # -- results --------------------------------------------------------

    def param_value(self, which: int) -> float:
        hit = np.flatnonzero(np.abs(self.labels) == which)
        if len(hit) == 0:
            return 0.0
        r = hit[0]
        return float(self.rhs[r]) if self.labels[r] > 0 else -float(self.rhs[r])

    def line(self) -> LineParams:
        return LineParams(self.param_value(1), self.param_value(2))

    def residuals(self, m_data: int | None = None) -> np.ndarray:
        """Residual of every data row, read off the tableau.

        Basic u_i rows carry +R, v_i rows -R, and nonbasic data vectors
        (interpolated points) have residual 0.
        """
        m_data = len(self.weights) if m_data is None else m_data
        r = np.zeros(m_data)
        data = np.abs(self.labels) > 2
        idx = np.abs(self.labels[data]) - DATA_OFFSET
        r[idx] = np.sign(self.labels[data]) * self.rhs[data]
        return r

    def extract_report(self, require_converged: bool = True) -> "TableauReport":
        if require_converged and not self.is_converged():
            raise NotConverged("tableau is not optimal")
        interpolated = {data_index(c) for c in self.nonbasic_data_labels()}
        data = np.abs(self.labels) > 2
        zero_rows = data & (np.abs(self.rhs) <= self.tol)
        interpolated |= {data_index(int(l)) for l in self.labels[zero_rows]}
        return TableauReport(self.line(), self.residuals(), frozenset(interpolated), self.sar)

    def format(self, digits: int = 6) -> str:
        """Text rendering in the column layout used for hand-worked examples."""
        width = digits + 7
        fmt = lambda x: f"{(0.0 if abs(x) <= self.tol else x):>{width}.{digits}g}"
        lines = []
        for r in range(self.m):
            lines.append("".join(fmt(v) for v in (*self.C[r], self.rhs[r])) + f"{int(self.labels[r]):>6d}")
        lines.append("".join(fmt(v) for v in self.mc))
        lines.append("".join(f"{int(c):>{width}d}" for c in self.col_labels))
        return "\n".join(lines)


@dataclass(frozen=True)
class TableauReport:
    line: LineParams
    residuals: np.ndarray
    interpolated: frozenset
    sar: float


def scale_dataset(ds: DataSet) -> tuple[DataSet, float, float]:
    """Divide t by max|t| and d by max|d|."""
    t_scale = float(np.max(np.abs(ds.t)))
    d_scale = float(np.max(np.abs(ds.d)))
    if t_scale == 0.0 or d_scale == 0.0:
        raise DegenerateScale(f"cannot scale: max|t| = {t_scale}, max|d| = {d_scale}")
    return DataSet(ds.t / t_scale, ds.d / d_scale, ds.w, name=ds.name), t_scale, d_scale


def unscale_params(line: LineParams, t_scale: float, d_scale: float) -> LineParams:
    return LineParams(line.a1 * d_scale, line.a2 * d_scale / t_scale)
