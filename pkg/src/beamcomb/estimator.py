"""Recursive grid Bayes filter for the relative phase.

Each slot runs predict (convolve with the diffusion kernel), update (multiply
by the click likelihood at the correction held during the slot, renormalize)
and correct (MAP of the posterior becomes the next slot's correction).
"""

from __future__ import annotations

import math

import numpy as np

from beamcomb.circular import (
    CircularDistribution,
    _check_bins,
    bin_centers,
    uniform,
    wrap_phase,
    wrapped_gaussian_kernel,
)
from beamcomb.errors import NumericDegeneracyError
from beamcomb.physics import SystemParams

DEFAULT_BINS = 1024


class BayesFilter:
    """Posterior over the relative phase plus the correction currently applied.

    The filter owns its posterior as a private array and mutates it in place;
    ``posterior`` hands out immutable copies.
    """

    def __init__(self, params: SystemParams, n_bins: int = DEFAULT_BINS, prior: CircularDistribution | None = None):
        self.params = params
        self.n_bins = _check_bins(n_bins)
        if prior is None:
            prior = uniform(self.n_bins)
        elif prior.n_bins != self.n_bins:
            raise ValueError(f"prior has {prior.n_bins} bins, filter has {self.n_bins}")
        self._w = np.array(prior.weights, dtype=float)
        self._w /= self._w.sum()
        self._centers = bin_centers(self.n_bins)
        # cos of the bin-lag angle, mirrored so lags m and n-m agree bit for bit
        half = self.n_bins // 2 + 1
        cos_lag = np.cos(np.arange(half) * (2.0 * math.pi / self.n_bins))
        self._cos_lag = np.concatenate([cos_lag, cos_lag[1 : self.n_bins - half + 1][::-1]])
        self._corr_idx = None
        if params.diffusion > 0:
            self.kernel = wrapped_gaussian_kernel(self.n_bins, params.increment_variance)
            self._kernel_fft = np.fft.rfft(self.kernel.weights)
        else:
            # D = 0: predict is the identity
            self.kernel = None
            self._kernel_fft = None
        self.current_correction = self._argmax()

    @property
    def posterior(self) -> CircularDistribution:
        return CircularDistribution(self._w, normalize=False)

    def set_correction(self, phase: float) -> None:
        """Force the correction applied in the next slot (test and replay hook)."""
        self.current_correction = wrap_phase(float(phase))
        self._corr_idx = None

    def likelihood(self, clicked: int) -> np.ndarray:
        """p(k | theta) on the bin centres for the current correction."""
        if self._corr_idx is not None:
            cos_err = np.roll(self._cos_lag, self._corr_idx)
        else:
            cos_err = np.cos(self._centers - self.current_correction)
        mean = self.params.photons_per_slot * (1.0 - cos_err)
        if clicked:
            return -np.expm1(-mean)
        return np.exp(-mean)

    def predict(self) -> None:
        if self._kernel_fft is None:
            return
        w = np.fft.irfft(np.fft.rfft(self._w) * self._kernel_fft, self.n_bins)
        np.maximum(w, 0.0, out=w)
        w /= w.sum()
        self._w = w

    def update(self, clicked: int) -> None:
        w = self._w * self.likelihood(clicked)
        total = w.sum()
        if not (total > 0) or not math.isfinite(total):
            raise NumericDegeneracyError(f"posterior mass {total!r} after k={clicked}")
        w /= total
        self._w = w

    def _argmax(self) -> float:
        self._corr_idx = int(np.argmax(self._w))
        return float(self._centers[self._corr_idx])

    def correct(self) -> float:
        self.current_correction = self._argmax()
        return self.current_correction

    def step(self, clicked: int) -> float:
        """Process one slot's outcome; returns the correction for the next slot."""
        self.predict()
        self.update(clicked)
        return self.correct()

    def snapshot(self) -> list[tuple[float, float]]:
        return self.posterior.to_pairs()


def new_filter(params: SystemParams, n_bins: int = DEFAULT_BINS) -> BayesFilter:
    return BayesFilter(params, n_bins)
