"""Quantum correlations of two-site states in the XXZ chain and the LMG model."""

__version__ = "0.1.0"

from .correlators import Correlators, Regime, classify, correlators, evaluate_correlators
from .ed import ed_correlators, extrapolate_ed
from .errors import SpinQCorrError
from .lmg import LmgPoint, lmg_closed_measures, lmg_lqu_published, lmg_validate
from .measures import (
    MeasureSet,
    closed_measures_xxz,
    definitional_measures,
    information_deficit,
    lqu,
    negativity,
    trace_distance_discord,
)
from .states import MeasurementBasis, XState, lmg_pair_state, xxz_state
from .sweep import (
    CriticalReport,
    SweepConfig,
    SweepRecord,
    detect_critical_points,
    locate_zero_crossing,
    run_sweep,
)

__all__ = [
    "Correlators", "Regime", "classify", "correlators", "evaluate_correlators",
    "ed_correlators", "extrapolate_ed", "SpinQCorrError",
    "LmgPoint", "lmg_closed_measures", "lmg_lqu_published", "lmg_validate",
    "MeasureSet", "closed_measures_xxz", "definitional_measures", "information_deficit",
    "lqu", "negativity", "trace_distance_discord",
    "MeasurementBasis", "XState", "lmg_pair_state", "xxz_state",
    "CriticalReport", "SweepConfig", "SweepRecord", "detect_critical_points",
    "locate_zero_crossing", "run_sweep",
]
