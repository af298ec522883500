"""Bayesian phase correction for coherent combination of two photon-starved beams."""

from beamcomb.circular import (
    CircularDistribution,
    argmax_phase,
    bin_centers,
    circular_convolve,
    uniform,
    wrap_phase,
    wrapped_gaussian_kernel,
)
from beamcomb.physics import SystemParams
from beamcomb.estimator import BayesFilter, NumericDegeneracyError, new_filter
from beamcomb.engine import SimConfig, SweepResult, TrajectoryRecord, run_sweep, run_trajectory
from beamcomb.stats import EfficiencyEstimate, efficiency, fraction_above, median_fraction

__version__ = "0.1.0"

__all__ = [
    "BayesFilter",
    "CircularDistribution",
    "EfficiencyEstimate",
    "NumericDegeneracyError",
    "SimConfig",
    "SweepResult",
    "SystemParams",
    "TrajectoryRecord",
    "argmax_phase",
    "bin_centers",
    "circular_convolve",
    "efficiency",
    "fraction_above",
    "median_fraction",
    "new_filter",
    "run_sweep",
    "run_trajectory",
    "uniform",
    "wrap_phase",
    "wrapped_gaussian_kernel",
]
