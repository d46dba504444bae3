"""Oversampling-adjusted precision/recall, threshold sweeps and simulation."""

from .adjusted import (
    AdjustedConfusion,
    adjusted_metrics,
    confusion_from_judged,
    unadjusted_metrics,
)
from .sampling import (
    JudgedSample,
    JudgedSet,
    SampleSizeError,
    SamplingPlan,
    ScoredPopulation,
    sampling_ratios,
    stratified_sample,
)
from .simulator import (
    PopulationSpec,
    population_counts,
    population_metrics,
    simulate_population,
)
from .sweep import Sweep, recall_at_precision, threshold_sweep

__all__ = [
    "AdjustedConfusion",
    "JudgedSample",
    "JudgedSet",
    "PopulationSpec",
    "SampleSizeError",
    "SamplingPlan",
    "ScoredPopulation",
    "Sweep",
    "adjusted_metrics",
    "confusion_from_judged",
    "population_counts",
    "population_metrics",
    "recall_at_precision",
    "sampling_ratios",
    "simulate_population",
    "stratified_sample",
    "threshold_sweep",
]
