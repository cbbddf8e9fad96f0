"""Sweep planning, execution, rate fitting, diagnostics and reporting."""

from randtomo.experiments.fit import RateFitResult, aggregate_records, fit_monomial, fit_records
from randtomo.experiments.plan import (
    AlphaSchedule,
    ExperimentPlan,
    NoiseRegime,
    build_plan,
    default_c_alpha,
    penalty_for,
)
from randtomo.experiments.runner import (
    RECORD_COLUMNS,
    RealizationRecord,
    SweepResult,
    draw_realization,
    run_realization,
    run_sweep,
    scan_c_alpha,
)

__all__ = [
    "AlphaSchedule",
    "ExperimentPlan",
    "NoiseRegime",
    "RECORD_COLUMNS",
    "RateFitResult",
    "RealizationRecord",
    "SweepResult",
    "aggregate_records",
    "build_plan",
    "default_c_alpha",
    "draw_realization",
    "fit_monomial",
    "fit_records",
    "penalty_for",
    "run_realization",
    "run_sweep",
    "scan_c_alpha",
]
