"""Closed-loop simulation: Wiener phase, dark-port clicks, Bayes correction."""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from beamcomb.circular import CircularDistribution, wrap_phase
from beamcomb.errors import ConfigurationError
from beamcomb.estimator import DEFAULT_BINS, BayesFilter
from beamcomb.physics import SystemParams, diffuse_phase, sample_click

DEFAULT_BURN_IN = 1000


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    n_slots: int
    n_bins: int = DEFAULT_BINS
    seed: int = 0
    initial_phase: Union[float, str] = "random"
    burn_in_slots: int = DEFAULT_BURN_IN
    snapshot_every: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.params, SystemParams):
            raise ConfigurationError("params must be a SystemParams")
        for name in ("n_slots", "n_bins", "seed", "burn_in_slots"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigurationError(f"{name} must be an integer, got {value!r}")
        if self.n_slots < 1:
            raise ConfigurationError("n_slots must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        if not 0 <= self.burn_in_slots < self.n_slots:
            raise ConfigurationError("burn_in_slots must satisfy 0 <= burn_in_slots < n_slots")
        if self.snapshot_every is not None:
            if isinstance(self.snapshot_every, bool) or not isinstance(self.snapshot_every, int) or self.snapshot_every < 1:
                raise ConfigurationError("snapshot_every must be a positive integer or null")
        if isinstance(self.initial_phase, str):
            if self.initial_phase != "random":
                raise ConfigurationError('initial_phase must be a number or "random"')
        elif isinstance(self.initial_phase, bool) or not isinstance(self.initial_phase, (int, float)):
            raise ConfigurationError('initial_phase must be a number or "random"')
        elif not (-math.pi < self.initial_phase <= math.pi):
            raise ConfigurationError("initial_phase must lie in (-pi, pi]")

    def to_dict(self) -> dict:
        """Flat key-value form used for config files and manifests."""
        out = dataclasses.asdict(self.params)
        for f in dataclasses.fields(self):
            if f.name != "params":
                out[f.name] = getattr(self, f.name)
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "SimConfig":
        param_keys = {f.name for f in dataclasses.fields(SystemParams)}
        own_keys = {f.name for f in dataclasses.fields(cls)} - {"params"}
        unknown = set(doc) - param_keys - own_keys
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        missing = param_keys - set(doc)
        if missing:
            raise ConfigurationError(f"missing config keys: {sorted(missing)}")
        params = SystemParams(**{k: doc[k] for k in param_keys})
        return cls(params=params, **{k: doc[k] for k in own_keys if k in doc})

    def with_params(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, params=dataclasses.replace(self.params, **changes))


@dataclass
class TrajectoryRecord:
    """Per-slot log of one closed-loop run.

    ``correction[i]`` is the control phase in force during slot ``i``, i.e. the
    MAP estimate from clicks of slots ``0..i-1``.
    """

    true_phase: np.ndarray
    correction: np.ndarray
    clicked: np.ndarray
    bright_fraction: np.ndarray
    seed: int
    snapshots: list = field(default_factory=list)

    def __len__(self) -> int:
        return self.true_phase.size

    @property
    def phase_error(self) -> np.ndarray:
        return wrap_phase(self.true_phase - self.correction)

    @property
    def dark_fraction(self) -> np.ndarray:
        return 1.0 - self.bright_fraction

    @property
    def n_clicks(self) -> int:
        return int(self.clicked.sum())


def run_trajectory(
    config: SimConfig,
    prior: CircularDistribution | None = None,
    on_snapshot: Callable[[int, list], None] | None = None,
) -> TrajectoryRecord:
    """Simulate ``config.n_slots`` slots of the feedback loop.

    Per slot: diffuse the true phase (slot 0 keeps the initial phase), sample
    the dark-port click against the correction held from the previous slot,
    feed the click to the filter, then log.  ``prior`` replaces the uniform
    starting posterior.  Posterior snapshots are taken after every
    ``snapshot_every``-th slot; they are streamed to ``on_snapshot`` when it
    is given and collected on the record otherwise.
    """
    params = config.params
    rng = np.random.default_rng(config.seed)
    filt = BayesFilter(params, config.n_bins, prior=prior)

    n = config.n_slots
    true_phase = np.empty(n)
    correction = np.empty(n)
    clicked = np.empty(n, dtype=np.int8)
    snapshots = []

    if config.initial_phase == "random":
        phase = wrap_phase(float(rng.uniform(-math.pi, math.pi)))
    else:
        phase = float(config.initial_phase)

    every = config.snapshot_every
    for i in range(n):
        if i > 0:
            phase = diffuse_phase(phase, params, rng)
        held = filt.current_correction
        k = sample_click(params, phase - held, rng)
        true_phase[i] = phase
        correction[i] = held
        clicked[i] = k
        filt.step(k)
        if every is not None and (i + 1) % every == 0:
            pairs = filt.snapshot()
            if on_snapshot is None:
                snapshots.append((i, pairs))
            else:
                on_snapshot(i, pairs)

    bright = 0.5 * (1.0 + np.cos(true_phase - correction))
    return TrajectoryRecord(true_phase, correction, clicked, bright, int(config.seed), snapshots)


def derive_seed(master_seed: int, d_index: int, i0_index: int, replicate: int) -> int:
    """Cell seed = first 64-bit word of SeedSequence(master, spawn_key=(d, i0, rep)).

    Depends only on the cell coordinates, so cells may run in any order.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(d_index, i0_index, replicate))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SweepCell:
    diffusion: float
    intensity_per_beam: float
    replicate: int
    seed: int
    eta: float
    std_error: float
    n_slots: int
    burn_in: int


@dataclass
class SweepResult:
    D_values: list
    I0_values: list
    replicates: int
    cells: list

    def cell(self, d_index: int, i0_index: int, replicate: int) -> SweepCell:
        return self.cells[(d_index * len(self.I0_values) + i0_index) * self.replicates + replicate]

    def mean_eta(self) -> tuple[np.ndarray, np.ndarray]:
        """Replicate-averaged eta per (D, I0) and its standard error.

        The error propagates the per-run batch-means errors of the replicates.
        """
        shape = (len(self.D_values), len(self.I0_values), self.replicates)
        eta = np.array([c.eta for c in self.cells]).reshape(shape)
        se = np.array([c.std_error for c in self.cells]).reshape(shape)
        return eta.mean(axis=2), np.sqrt((se**2).sum(axis=2)) / self.replicates


def _run_cell(task) -> SweepCell:
    from beamcomb.stats import efficiency

    config, D, I0, replicate = task
    record = run_trajectory(config)
    est = efficiency(record, config.burn_in_slots)
    return SweepCell(D, I0, replicate, config.seed, est.eta, est.std_error, config.n_slots, config.burn_in_slots)


def sweep_tasks(base: SimConfig, D_values, I0_values, replicates: int) -> list:
    tasks = []
    for a, D in enumerate(D_values):
        for b, I0 in enumerate(I0_values):
            for r in range(replicates):
                cfg = dataclasses.replace(
                    base.with_params(diffusion=float(D), intensity_per_beam=float(I0)),
                    seed=derive_seed(base.seed, a, b, r),
                    snapshot_every=None,
                )
                tasks.append((cfg, float(D), float(I0), r))
    return tasks


def run_sweep(base: SimConfig, D_values, I0_values, replicates: int, jobs: int | None = 1) -> SweepResult:
    """Time-averaged efficiency for every (D, I0, replicate) cell.

    ``jobs`` > 1 runs cells in worker processes; ``None`` uses every core.
    Results are ordered by cell coordinate regardless of completion order.
    """
    D_values, I0_values = list(D_values), list(I0_values)
    if not D_values or not I0_values:
        raise ConfigurationError("D and I0 value lists must be non-empty")
    if isinstance(replicates, bool) or not isinstance(replicates, int) or replicates < 1:
        raise ConfigurationError("replicates must be a positive integer")
    tasks = sweep_tasks(base, D_values, I0_values, replicates)
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_run_cell, tasks))
    else:
        cells = [_run_cell(t) for t in tasks]
    return SweepResult(D_values, I0_values, replicates, cells)
