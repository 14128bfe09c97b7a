"""Weighted L1 (least absolute residuals) straight-line fitting."""

from .core import DEFAULT_TOLER, DataPoint, DataSet, LineParams, SignCounts, classify_signs, compute_residuals, evaluate_sar, predict
from .datasets import cpi_window, fixture, load_csv, loads_csv, window
from .errors import CyclingDetected, InputError, L1LineError, NumericalFailure
from .lsq import l2_fit
from .oracle import brute_force_best, median_oracle, slope_oracle
from .pivoting import ColumnPolicy, PivotRule, weighted_median
from .solver import (
    FitReport,
    StartMode,
    Strategy,
    StrategyOptions,
    analyze_uniqueness,
    enumerate_basic_optima,
    equal_spacing_class,
    fit,
    fit_restarted_wm,
    fit_with_l2_start,
    fit_with_trial,
)

__all__ = [name for name in dir() if not name.startswith("_")]
