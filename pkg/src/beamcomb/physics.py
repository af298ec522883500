"""Two-beam interferometer with a Geiger-mode detector on the dark port."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from beamcomb.circular import wrap_phase
from beamcomb.errors import ConfigurationError

# mean photons per beam per slot above which the on/off model gets coarse
LOW_POWER_WARN = 0.5


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the combiner.

    intensity_per_beam: photons per unit time in each input beam (I0).
    diffusion: relative-phase diffusion constant D, rad^2 per unit time.
    slot_duration: detection slot length (dt).
    """

    intensity_per_beam: float
    diffusion: float
    slot_duration: float

    def __post_init__(self):
        for name in ("intensity_per_beam", "diffusion", "slot_duration"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigurationError(f"{name} must be a finite number, got {value!r}")
        if self.intensity_per_beam <= 0:
            raise ConfigurationError("intensity_per_beam must be > 0")
        if self.diffusion < 0:
            raise ConfigurationError("diffusion must be >= 0")
        if self.slot_duration <= 0:
            raise ConfigurationError("slot_duration must be > 0")
        if self.photons_per_slot > LOW_POWER_WARN:
            warnings.warn(
                f"I0*dt = {self.photons_per_slot:g} is not photon-starved; "
                "the on/off detector model merges multi-photon events",
                stacklevel=3,
            )

    @property
    def photons_per_slot(self) -> float:
        """I0 * dt."""
        return self.intensity_per_beam * self.slot_duration

    @property
    def increment_variance(self) -> float:
        """Variance 2 D dt of one slot's phase increment."""
        return 2.0 * self.diffusion * self.slot_duration


def bright_intensity(params: SystemParams, phase_error):
    return params.intensity_per_beam * (1.0 + np.cos(phase_error))


def dark_intensity(params: SystemParams, phase_error):
    return params.intensity_per_beam * (1.0 - np.cos(phase_error))


def prob_no_click(params: SystemParams, phase_error):
    """Probability of zero detections in one slot at the dark port."""
    return np.exp(-params.photons_per_slot * (1.0 - np.cos(phase_error)))


def prob_click(params: SystemParams, phase_error):
    return -np.expm1(-params.photons_per_slot * (1.0 - np.cos(phase_error)))


def sample_click(params: SystemParams, phase_error: float, rng: np.random.Generator) -> int:
    """Draw k in {0, 1}; uses exactly one uniform variate from ``rng``."""
    return int(rng.random() < prob_click(params, phase_error))


def diffuse_phase(phase: float, params: SystemParams, rng: np.random.Generator) -> float:
    """One Wiener step of the relative phase.

    Always draws one standard normal, also for D = 0, so that streams line up
    across parameter choices.
    """
    step = rng.standard_normal() * math.sqrt(params.increment_variance)
    return wrap_phase(phase + step)
