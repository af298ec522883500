"""Efficiency and intensity statistics of closed-loop trajectories."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from beamcomb.errors import ConfigurationError, InsufficientDataError
from beamcomb.physics import prob_click

MIN_SLOTS = 100
MIN_BATCHES = 20
DEFAULT_BUCKETS = 20


@dataclass(frozen=True)
class EfficiencyEstimate:
    eta: float
    std_error: float
    n_slots_used: int
    burn_in_slots: int


def _used(record, burn_in: int) -> np.ndarray:
    values = np.asarray(getattr(record, "bright_fraction", record), dtype=float)
    if burn_in < 0 or burn_in >= values.size:
        raise ValueError(f"burn_in={burn_in} outside [0, {values.size})")
    return values[burn_in:]


def batch_means_se(x: np.ndarray, n_batches: int = MIN_BATCHES) -> float:
    """Standard error of the mean of a correlated series by non-overlapping batch means.

    The first ``n_batches * (len(x) // n_batches)`` points are used.
    """
    x = np.asarray(x, dtype=float)
    size = x.size // n_batches
    if size < 1:
        raise InsufficientDataError(f"{x.size} points cannot fill {n_batches} batches")
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(n_batches))


def efficiency(record, burn_in: int = 0, n_batches: int = MIN_BATCHES) -> EfficiencyEstimate:
    """Time-averaged bright-port fraction after ``burn_in`` slots."""
    if n_batches < MIN_BATCHES:
        raise ConfigurationError(f"n_batches must be >= {MIN_BATCHES}")
    used = _used(record, burn_in)
    if used.size < MIN_SLOTS:
        raise InsufficientDataError(f"only {used.size} slots after burn-in, need {MIN_SLOTS}")
    eta = float(np.clip(used.mean(), 0.0, 1.0))
    return EfficiencyEstimate(eta, batch_means_se(used, n_batches), int(used.size), int(burn_in))


def intensity_histogram(record, burn_in: int = 0, n_buckets: int = DEFAULT_BUCKETS):
    """Counts of bright_fraction in ``n_buckets`` equal buckets on [0, 1].

    Returns ``(counts, edges)``; the top bucket is closed so 1.0 lands in it.
    """
    if n_buckets < 2:
        raise ConfigurationError("n_buckets must be >= 2")
    used = _used(record, burn_in)
    return np.histogram(used, bins=n_buckets, range=(0.0, 1.0))


def fraction_above(record, burn_in: int = 0, threshold: float = 0.9) -> float:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold!r}")
    used = _used(record, burn_in)
    return float(np.mean(used >= threshold))


def median_fraction(record, burn_in: int = 0) -> float:
    return float(np.median(_used(record, burn_in)))


def click_chi_square(record, params, n_groups: int = 10, min_expected: float = 5.0):
    """Chi-square test that clicks follow prob_click at the logged phase errors.

    Slots are grouped by |phase error| into ``n_groups`` equal-count groups
    (merged until each expects ``min_expected`` clicks); within each group the
    click count is compared with the sum of Bernoulli means and variances.
    Returns ``(statistic, dof, p_value)``.
    """
    err = np.abs(record.phase_error)
    p = prob_click(params, err)
    k = record.clicked.astype(float)
    order = np.argsort(err, kind="stable")
    groups = np.array_split(order, n_groups)
    obs, exp, var = [], [], []
    acc = [0.0, 0.0, 0.0]
    for g in groups:
        acc[0] += k[g].sum()
        acc[1] += p[g].sum()
        acc[2] += (p[g] * (1 - p[g])).sum()
        if acc[1] >= min_expected:
            obs.append(acc[0])
            exp.append(acc[1])
            var.append(acc[2])
            acc = [0.0, 0.0, 0.0]
    if acc[1] > 0:
        if obs:
            obs[-1] += acc[0]
            exp[-1] += acc[1]
            var[-1] += acc[2]
        else:
            obs, exp, var = [acc[0]], [acc[1]], [acc[2]]
    obs, exp, var = map(np.asarray, (obs, exp, var))
    statistic = float(np.sum((obs - exp) ** 2 / var))
    dof = len(obs)
    return statistic, dof, float(sps.chi2.sf(statistic, dof))


@dataclass(frozen=True)
class ErgodicReport:
    time_avg: float
    time_se: float
    ensemble_avg: float
    ensemble_se: float
    z_score: float


def ergodic_check(config, n_ensemble: int = 30, ensemble_slots: int = 1000, prior=None) -> ErgodicReport:
    """Compare one long run's time average with an ensemble of short runs.

    Every run discards ``config.burn_in_slots``.  The long run then covers
    ``n_ensemble * ensemble_slots`` slots, matching the ensemble's budget.
    Each short run gets its own seed and therefore its own initial phase when
    ``initial_phase`` is "random".
    """
    from beamcomb.engine import run_trajectory

    if n_ensemble < 30:
        raise ConfigurationError("n_ensemble must be >= 30")
    burn = config.burn_in_slots
    seeds = np.random.SeedSequence(config.seed).spawn(n_ensemble + 1)
    as_int = [int(s.generate_state(1, dtype=np.uint64)[0]) for s in seeds]

    long_cfg = dataclasses.replace(
        config, n_slots=burn + n_ensemble * ensemble_slots, seed=as_int[0], snapshot_every=None
    )
    long_est = efficiency(run_trajectory(long_cfg, prior=prior), burn)

    etas = []
    for seed in as_int[1:]:
        cfg = dataclasses.replace(config, n_slots=burn + ensemble_slots, seed=seed, snapshot_every=None)
        etas.append(efficiency(run_trajectory(cfg, prior=prior), burn).eta)
    etas = np.array(etas)
    ens_avg = float(etas.mean())
    ens_se = float(etas.std(ddof=1) / math.sqrt(n_ensemble))

    diff = long_est.eta - ens_avg
    scale = math.hypot(long_est.std_error, ens_se)
    if scale == 0:
        z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
    else:
        z = diff / scale
    return ErgodicReport(long_est.eta, long_est.std_error, ens_avg, ens_se, z)
