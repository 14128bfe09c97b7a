"""Iteration driver for the condensed simplex and everything built on it.

Strategies
----------
``br``
    BR pivot rows throughout.
``wm``
    Weighted-median pivot rows; if a basis repeats without SAR improving,
    BR rows are used until SAR beats its best value so far, and a warning
    is recorded.
``wm-pure``
    Weighted-median pivot rows with no rescue; a repeated basis raises
    :class:`CyclingDetected`.
``hybrid`` (default)
    Weighted-median rows, except that the iteration after any iteration
    whose SAR did not strictly decrease uses a BR row. The repeat guard of
    ``wm`` also applies, since that rule alone can loop on data with
    duplicated rows.
``restarted-wm``
    Two weighted-median iterations, then rebuild the tableau from the
    current residuals and repeat, summing the per-pass lines. When a pass
    ends no lower than the best earlier pass, BR iterations continue on the current tableau
    (``safeguard=True``) or the run stops with :class:`CyclingDetected`.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .core import (
    DEFAULT_TOLER,
    ZERO_LINE,
    DataSet,
    LineParams,
    SignCounts,
    classify_signs,
    compute_residuals,
    evaluate_sar,
)
from .errors import CyclingDetected, InputError, InvalidM, IterationLimitExceeded
from .lsq import l2_fit
from .pivoting import (
    ColumnPolicy,
    OpCounter,
    PivotRule,
    br_pivot_row,
    select_entering,
    wm_pivot_row,
)
from .tableau import CondensedTableau, is_param, scale_dataset, unscale_params


class Strategy(str, enum.Enum):
    BR = "br"
    WM = "wm"
    HYBRID = "hybrid"
    RESTARTED_WM = "restarted-wm"
    WM_PURE = "wm-pure"


@dataclass(frozen=True)
class StartMode:
    kind: str = "cold"  # "cold" | "l2" | "trial"
    line: Optional[LineParams] = None

    def __post_init__(self):
        if self.kind not in ("cold", "l2", "trial"):
            raise InputError(f"unknown start mode {self.kind!r}")
        if self.kind == "trial" and self.line is None:
            raise InputError("a trial start needs a line")

    @classmethod
    def cold(cls) -> "StartMode":
        return cls("cold")

    @classmethod
    def l2(cls) -> "StartMode":
        return cls("l2")

    @classmethod
    def trial(cls, line: LineParams) -> "StartMode":
        return cls("trial", line)

    def __str__(self) -> str:
        if self.kind == "trial":
            return f"trial({self.line.a1:g},{self.line.a2:g})"
        return self.kind


@dataclass
class StrategyOptions:
    strategy: Strategy = Strategy.HYBRID
    start: StartMode = field(default_factory=StartMode.cold)
    column_policy: ColumnPolicy = ColumnPolicy.MAX_MC
    tol: float = DEFAULT_TOLER
    max_iterations: Optional[int] = None  # None -> 10 m + 50
    scaling: bool = False
    degenerate_flip: bool = True
    safeguard: bool = True  # restarted-wm only
    on_iteration: Optional[Callable] = None  # called with (record, tableau)

    def __post_init__(self):
        self.strategy = Strategy(self.strategy)
        self.column_policy = ColumnPolicy(self.column_policy)
        if self.tol <= 0:
            raise InputError("tolerance must be positive")
        if self.max_iterations is not None and self.max_iterations < 2:
            raise InputError("max_iterations must be at least 2")

    def iteration_cap(self, m: int) -> int:
        return self.max_iterations if self.max_iterations is not None else 10 * m + 50


@dataclass(frozen=True)
class IterationRecord:
    index: int
    interpolation_points: tuple
    sar: float
    rule_used: PivotRule
    entering_label: int
    leaving_label: int
    pivot_value: float


@dataclass(frozen=True)
class Uniqueness:
    kind: str  # "unique" | "non-unique" | "undetermined"
    alternates: tuple = ()
    reason: str = ""

    @property
    def is_unique(self) -> bool:
        return self.kind == "unique"

    @property
    def letter(self) -> str:
        return {"unique": "U", "non-unique": "N"}.get(self.kind, "?")


@dataclass
class FitReport:
    line: LineParams
    sar: float
    residuals: np.ndarray
    sign_counts: SignCounts
    iterations: list
    uniqueness: Uniqueness
    interpolated: frozenset
    start_mode_used: StartMode
    warnings: list = field(default_factory=list)
    initial_sar: float = float("nan")
    base_line: LineParams = ZERO_LINE
    delta_line: Optional[LineParams] = None
    strategy: Strategy = Strategy.HYBRID
    bypasses: int = 0
    median_scans: int = 0
    median_calls: int = 0
    tableau: Optional[CondensedTableau] = None

    @property
    def n_iterations(self) -> int:
        return len(self.iterations)

    @property
    def sar_trajectory(self) -> list:
        return [self.initial_sar] + [r.sar for r in self.iterations]

    @property
    def br_interventions(self) -> int:
        """BR pivots taken by a weighted-median strategy."""
        if self.strategy is Strategy.BR:
            return 0
        return sum(1 for r in self.iterations if r.rule_used is PivotRule.BR)


class _Run:
    """Mutable bookkeeping shared by the passes of one fit."""

    def __init__(self, ds: DataSet, opts: StrategyOptions, start_line: LineParams = ZERO_LINE):
        self.ds = ds
        self.opts = opts
        self.start_line = start_line
        self.initial_sar = evaluate_sar(ds, start_line)
        self.records: list[IterationRecord] = []
        self.cap = opts.iteration_cap(ds.m)
        self.br_stats = OpCounter()
        self.wm_stats = OpCounter()
        self.warnings: list[str] = []

    def step(self, tab: CondensedTableau, rule: PivotRule) -> IterationRecord:
        if len(self.records) >= self.cap:
            raise IterationLimitExceeded(f"no convergence after {self.cap} iterations")
        cand = select_entering(tab, self.opts.column_policy)
        if cand.flipped:
            tab.flip_column(cand.col)
        if rule is PivotRule.BR:
            row = br_pivot_row(tab, cand.col, self.br_stats)
        else:
            row = wm_pivot_row(tab, cand.col, self.wm_stats)
        entering = int(tab.col_labels[cand.col])
        leaving = int(tab.labels[row])
        pivot = float(tab.C[row, cand.col])
        tab.apply_pivot(row, cand.col)
        if self.opts.degenerate_flip:
            tab.flip_degenerate_rows()
        rec = IterationRecord(
            index=len(self.records) + 1,
            interpolation_points=tuple(tab.interpolation_points()),
            sar=tab.sar,
            rule_used=rule,
            entering_label=entering,
            leaving_label=leaving,
            pivot_value=pivot,
        )
        self.records.append(rec)
        if self.opts.on_iteration is not None:
            self.opts.on_iteration(rec, tab)
        return rec

    def drive(self, tab: CondensedTableau, strategy: Strategy, limit: int | None = None) -> None:
        """Iterate until optimal (or ``limit`` iterations) under ``strategy``.

        Weighted-median strategies remember the best SAR seen at each set of
        nonbasic labels. Meeting a set again with no better SAR since means
        a cycle: ``wm-pure`` raises, while ``wm`` and ``hybrid`` take BR pivots
        until SAR drops below the best value reached so far.
        """
        tol = tab.tol
        prev = tab.sar
        best = prev
        force_br = strategy is Strategy.BR
        rescue_below: float | None = None
        seen: dict[tuple, float] = {}
        done = 0
        while not tab.is_converged():
            if limit is not None and done >= limit:
                return
            rule = PivotRule.BR if force_br else PivotRule.WM
            rec = self.step(tab, rule)
            done += 1
            sar = rec.sar
            best = min(best, sar)
            if strategy is Strategy.BR:
                prev = sar
                continue
            if rescue_below is not None:
                if sar < rescue_below - tol:
                    rescue_below = None
                    seen.clear()
                    force_br = False
                prev = sar
                continue
            sig = tuple(sorted(abs(int(c)) for c in tab.col_labels))
            if sig in seen and best >= seen[sig] - tol:
                if strategy is Strategy.WM_PURE:
                    raise CyclingDetected(
                        f"basis {sig} revisited at iteration {rec.index} without SAR improvement",
                        report=self.partial(tab),
                    )
                self.warnings.append(f"cycle at iteration {rec.index}; BR pivots until SAR improves")
                rescue_below = best
                force_br = True
                prev = sar
                continue
            seen[sig] = best
            force_br = strategy is Strategy.HYBRID and sar > prev - tol
            prev = sar

    def partial(self, tab: CondensedTableau, base: LineParams = ZERO_LINE) -> FitReport:
        """Report for an interrupted run (no optimality claims)."""
        line = self.start_line + base + tab.line()
        res = compute_residuals(self.ds, line)
        return FitReport(
            line=line,
            sar=evaluate_sar(self.ds, line),
            residuals=res,
            sign_counts=classify_signs(res, tab.tol),
            iterations=list(self.records),
            uniqueness=Uniqueness("undetermined", reason="run did not converge"),
            interpolated=frozenset(),
            start_mode_used=self.opts.start,
            warnings=list(self.warnings),
            initial_sar=self.initial_sar,
            base_line=self.start_line,
            strategy=self.opts.strategy,
            tableau=tab,
        )


def _solve_cold(ds: DataSet, opts: StrategyOptions, run: _Run) -> tuple[CondensedTableau, LineParams]:
    """Run the configured strategy from the all-residual basis.

    Returns the final tableau and the line to add to the tableau's own line
    (nonzero only for restarted passes).
    """
    tab = CondensedTableau.initialize(ds, opts.tol)
    if opts.strategy is not Strategy.RESTARTED_WM:
        run.drive(tab, opts.strategy)
        return tab, ZERO_LINE

    base = ZERO_LINE
    best_pass = tab.sar
    while True:
        run.drive(tab, Strategy.WM_PURE, limit=2)
        if tab.is_converged():
            return tab, base
        if tab.sar > best_pass - opts.tol:
            if not opts.safeguard:
                raise CyclingDetected(
                    f"restarted passes stalled at SAR {tab.sar:.6g}", report=run.partial(tab, base)
                )
            # BR never raises SAR, so this ends below the best pass or at the optimum
            while not tab.is_converged() and tab.sar > best_pass - opts.tol:
                run.step(tab, PivotRule.BR)
            if tab.is_converged():
                return tab, base
        best_pass = min(best_pass, tab.sar)
        base = base + tab.line()
        tab = CondensedTableau.initialize(ds.with_d(tab.residuals()), opts.tol)


def _report(ds: DataSet, opts: StrategyOptions, run: _Run, tab: CondensedTableau,
            base: LineParams, initial_sar: float, start_base: LineParams = ZERO_LINE) -> FitReport:
    ext = tab.extract_report()
    line = start_base + base + ext.line
    uniq = analyze_uniqueness(tab)
    if uniq.alternates:
        shift = start_base + base
        uniq = replace(uniq, alternates=tuple(shift + a for a in uniq.alternates))
    return FitReport(
        line=line,
        sar=evaluate_sar(ds, line),
        residuals=ext.residuals,
        sign_counts=classify_signs(ext.residuals, opts.tol),
        iterations=list(run.records),
        uniqueness=uniq,
        interpolated=ext.interpolated,
        start_mode_used=opts.start,
        warnings=list(run.warnings),
        initial_sar=initial_sar,
        base_line=start_base,
        delta_line=(base + ext.line) if opts.start.kind != "cold" else None,
        strategy=opts.strategy,
        bypasses=run.br_stats.scanned,
        median_scans=run.wm_stats.scanned,
        median_calls=run.wm_stats.calls,
        tableau=tab,
    )


def _fit_from(ds: DataSet, opts: StrategyOptions, start_line: LineParams) -> FitReport:
    """Fit an L1 line to the residuals of ``start_line`` and add the two."""
    if ds.m < 2:
        raise InputError("fitting a line needs at least two points")
    work = ds if start_line == ZERO_LINE else ds.with_d(compute_residuals(ds, start_line))
    run = _Run(ds, opts, start_line)
    initial = run.initial_sar
    tab, base = _solve_cold(work, opts, run)
    return _report(ds, opts, run, tab, base, initial, start_base=start_line)


def _fit_unscaled(ds: DataSet, opts: StrategyOptions) -> FitReport:
    if opts.start.kind == "l2":
        return fit_with_l2_start(ds, opts)
    if opts.start.kind == "trial":
        return fit_with_trial(ds, opts.start.line, opts)
    return _fit_from(ds, opts, ZERO_LINE)


def fit(ds: DataSet, opts: StrategyOptions | None = None, **kwargs) -> FitReport:
    """Best weighted L1 straight line through ``ds``.

    Keyword arguments build a :class:`StrategyOptions` when ``opts`` is not
    given, e.g. ``fit(ds, strategy="br")``.
    """
    if opts is None:
        opts = StrategyOptions(**kwargs)
    elif kwargs:
        opts = replace(opts, **kwargs)
    if not opts.scaling:
        return _fit_unscaled(ds, opts)

    scaled, t_scale, d_scale = scale_dataset(ds)
    inner = replace(opts, scaling=False)
    if opts.start.kind == "trial":
        tl = opts.start.line
        inner = replace(inner, start=StartMode.trial(LineParams(tl.a1 / d_scale, tl.a2 * t_scale / d_scale)))
    try:
        rep = _fit_unscaled(scaled, inner)
    except CyclingDetected as exc:
        if exc.report is not None:
            exc.report = _unscale_report(exc.report, ds, opts, t_scale, d_scale)
        raise
    return _unscale_report(rep, ds, opts, t_scale, d_scale)


def _unscale_report(rep: FitReport, ds: DataSet, opts: StrategyOptions, t_scale: float, d_scale: float) -> FitReport:
    line = unscale_params(rep.line, t_scale, d_scale)
    res = compute_residuals(ds, line)
    alts = tuple(unscale_params(a, t_scale, d_scale) for a in rep.uniqueness.alternates)
    return replace(
        rep,
        line=line,
        sar=evaluate_sar(ds, line),
        residuals=res,
        sign_counts=classify_signs(rep.residuals, opts.tol),
        uniqueness=replace(rep.uniqueness, alternates=alts),
        initial_sar=rep.initial_sar * d_scale,
        start_mode_used=opts.start,
        base_line=unscale_params(rep.base_line, t_scale, d_scale),
        delta_line=None if rep.delta_line is None else unscale_params(rep.delta_line, t_scale, d_scale),
        iterations=[replace(r, sar=r.sar * d_scale,
                            interpolation_points=tuple(x * t_scale for x in r.interpolation_points))
                    for r in rep.iterations],
    )


def fit_restarted_wm(ds: DataSet, opts: StrategyOptions | None = None, **kwargs) -> FitReport:
    opts = replace(opts or StrategyOptions(), strategy=Strategy.RESTARTED_WM, **kwargs)
    return fit(ds, opts)


def fit_with_l2_start(ds: DataSet, opts: StrategyOptions | None = None) -> FitReport:
    """L1 fit to the least-squares residuals, added to the least-squares line.

    Only the residual-problem iterations are counted.
    """
    opts = replace(opts or StrategyOptions(), start=StartMode.l2())
    line, _ = l2_fit(ds)
    return _fit_from(ds, opts, line)


def fit_with_trial(ds: DataSet, trial: LineParams, opts: StrategyOptions | None = None) -> FitReport:
    """Same as :func:`fit_with_l2_start` but seeded by a caller-supplied line.

    Residuals are always recomputed from ``trial``.
    """
    opts = replace(opts or StrategyOptions(), start=StartMode.trial(trial))
    return _fit_from(ds, opts, trial)


# -- optimal-face exploration ------------------------------------------------

MAX_BASES = 5000


def _zero_mc_moves(tab: CondensedTableau, positive_only: bool):
    """Pivots (col, flip, row) available from zero-MC directions of an optimum.

    With ``positive_only`` only moves with a strictly positive minimum ratio
    are returned (these change the line); otherwise every minimum-ratio row,
    degenerate ones included.
    """
    tol = tab.tol
    pool = ~tab.param_rows()
    for col in range(2):
        label = int(tab.col_labels[col])
        own = float(tab.mc[col])
        partner = -2.0 * tab.label_cost(label) - own
        for flip, value in ((False, own), (True, partner)):
            if abs(value) > tol:
                continue
            e = -tab.C[:, col] if flip else tab.C[:, col]
            rows = np.flatnonzero(pool & (e > tol))
            if len(rows) == 0:
                continue
            ratios = tab.rhs[rows] / e[rows]
            rmin = ratios.min()
            if positive_only:
                if rmin <= tol:
                    continue
                ties = rows[ratios <= rmin + tol]
                yield col, flip, int(ties[0])
            else:
                for row in rows[ratios <= rmin + tol]:
                    yield col, flip, int(row)


def analyze_uniqueness(tab: CondensedTableau) -> Uniqueness:
    """Look for an alternate optimum one pivot away from an optimal tableau.

    A nonbasic direction with zero marginal cost and a positive minimum
    ratio moves to a different optimal line; zero-ratio moves only re-base
    the same line and are ignored.
    """
    here = tab.line().key()
    alts = {}
    for col, flip, row in _zero_mc_moves(tab, positive_only=True):
        t2 = tab.copy()
        t2.apply_pivot(row, col, flipped=flip)
        line = t2.line()
        if line.key() != here:
            alts.setdefault(line.key(), line)
    if alts:
        return Uniqueness("non-unique", tuple(alts.values()))
    return Uniqueness("unique")


def enumerate_basic_optima(ds: DataSet, opts: StrategyOptions | None = None, limit: int = 1000,
                           report: FitReport | None = None, max_bases: int = MAX_BASES) -> list[LineParams]:
    """Distinct optimal lines that interpolate two or more points.

    Breadth-first walk over optimal bases reachable through zero-MC pivots
    (degenerate ones included) and degenerate row flips, starting from one
    optimal tableau. Stops after ``limit`` distinct lines or ``max_bases``
    visited bases; many points on one line give exponentially many bases.
    """
    return _explore(ds, opts, limit, report, max_bases)[0]


def _explore(ds, opts, limit, report, max_bases=None):
    max_bases = MAX_BASES if max_bases is None else max_bases
    if limit < 1:
        raise InputError("limit must be at least 1")
    opts = opts or StrategyOptions(strategy=Strategy.BR)
    if report is None or report.tableau is None or report.start_mode_used.kind != "cold" or opts.scaling:
        report = fit(ds, replace(opts, start=StartMode.cold(), scaling=False, on_iteration=None))
    start = report.tableau
    base = report.line + LineParams(-start.line().a1, -start.line().a2)
    lines = {start.line().key(): start.line()}
    visited = {start.basis_signature()}
    queue = deque([start])
    capped = False
    while queue:
        tab = queue.popleft()
        nxt = []
        for col, flip, row in _zero_mc_moves(tab, positive_only=False):
            t2 = tab.copy()
            t2.apply_pivot(row, col, flipped=flip)
            nxt.append(t2)
        costs = tab.row_costs()
        for row in np.flatnonzero((np.abs(tab.rhs) <= tab.tol) & (costs > 0)):
            t2 = tab.copy()
            t2.flip_row(int(row))
            nxt.append(t2)
        for t2 in nxt:
            if not t2.is_converged():
                continue
            sig = t2.basis_signature()
            if sig in visited:
                continue
            visited.add(sig)
            queue.append(t2)
            lines.setdefault(t2.line().key(), t2.line())
            if len(lines) >= limit or len(visited) >= max_bases:
                capped = True
                queue.clear()
                break
    out = [base + l for l in lines.values()]
    return out[:limit], capped


def uniqueness_by_enumeration(ds: DataSet, opts: StrategyOptions | None = None, limit: int = 1000,
                              max_bases: int = MAX_BASES) -> Uniqueness:
    lines, capped = _explore(ds, opts, limit, None, max_bases)
    if capped:
        return Uniqueness("undetermined", tuple(lines[1:]),
                          reason=f"enumeration stopped at {limit} lines or {max_bases} bases")
    if len(lines) > 1:
        return Uniqueness("non-unique", tuple(lines[1:]))
    return Uniqueness("unique")


@dataclass(frozen=True)
class SpacingClass:
    kind: str  # "unique-guaranteed" | "one-or-two-basic" | "one-or-more-than-two-basic"
    nonuniqueness_lower_bound: Optional[float] = None

    def permits(self, n_basic: int) -> bool:
        if self.kind == "unique-guaranteed":
            return n_basic == 1
        if self.kind == "one-or-two-basic":
            return n_basic in (1, 2)
        return n_basic == 1 or n_basic > 2


def equal_spacing_class(m: int) -> SpacingClass:
    """What equidistant abscissas alone say about uniqueness for ``m`` points."""
    if m < 4:
        raise InvalidM(f"m must be at least 4, got {m}")
    if m % 2:
        return SpacingClass("one-or-two-basic")
    if m % 4:
        return SpacingClass("unique-guaranteed")
    bound = 2.2 / m**2
    if m == 8:
        bound = max(bound, 0.03)
    return SpacingClass("one-or-more-than-two-basic", bound)
