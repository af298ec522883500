"""Discretized probability distributions on the circle (-pi, pi].

Bin ``i`` of an ``n``-bin grid covers the arc centred on
``-pi + (i + 1/2) * 2 pi / n``.  Kernels used for convolution are stored in
*lag* layout instead: index ``k`` holds the weight of a shift by ``k`` bins,
so a kernel centred on zero has its peak at index 0.
"""

from __future__ import annotations

import math

import numpy as np

from beamcomb.errors import ConfigurationError

TWO_PI = 2.0 * math.pi
MIN_BINS = 8
# per-wrap tail mass below which further images of the Gaussian are dropped
WRAP_TOL = 1e-15


def wrap_phase(x):
    """Map ``x`` (radians) into (-pi, pi].

    Values already inside the interval are returned unchanged, bit for bit.
    Accepts scalars or arrays.
    """
    if isinstance(x, float) and -math.pi < x <= math.pi:
        return x
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"phase must be finite, got {x!r}")
    inside = (arr > -math.pi) & (arr <= math.pi)
    if np.all(inside):
        return float(arr) if arr.ndim == 0 else arr.copy()
    y = np.mod(arr + math.pi, TWO_PI) - math.pi
    y = np.where(y <= -math.pi, y + TWO_PI, y)
    y = np.where(y > math.pi, y - TWO_PI, y)
    y = np.where(inside, arr, y)
    return float(y) if y.ndim == 0 else y


def _check_bins(n_bins: int) -> int:
    if int(n_bins) != n_bins or n_bins < MIN_BINS:
        raise ConfigurationError(f"n_bins must be an integer >= {MIN_BINS}, got {n_bins!r}")
    return int(n_bins)


def bin_width(n_bins: int) -> float:
    return TWO_PI / n_bins


def bin_centers(n_bins: int) -> np.ndarray:
    n_bins = _check_bins(n_bins)
    return -math.pi + (np.arange(n_bins) + 0.5) * (TWO_PI / n_bins)


class CircularDistribution:
    """Immutable histogram density over (-pi, pi].

    ``weights`` is a read-only array of probabilities per bin (not densities);
    multiply by ``n_bins / (2 pi)`` to get a density.
    """

    __slots__ = ("_weights",)

    def __init__(self, weights, normalize: bool = True):
        w = np.array(weights, dtype=float)
        if w.ndim != 1:
            raise ConfigurationError("weights must be one-dimensional")
        _check_bins(w.size)
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if normalize:
            total = w.sum()
            if total <= 0:
                raise ValueError("weights have zero total mass")
            w /= total
        w.flags.writeable = False
        self._weights = w

    @classmethod
    def delta(cls, n_bins: int, index: int) -> "CircularDistribution":
        w = np.zeros(_check_bins(n_bins))
        w[index] = 1.0
        return cls(w, normalize=False)

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def n_bins(self) -> int:
        return self._weights.size

    @property
    def centers(self) -> np.ndarray:
        return bin_centers(self.n_bins)

    def __len__(self) -> int:
        return self.n_bins

    def __repr__(self) -> str:
        return f"CircularDistribution(n_bins={self.n_bins})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, CircularDistribution):
            return NotImplemented
        return np.array_equal(self._weights, other._weights)

    __hash__ = None

    def normalize(self) -> "CircularDistribution":
        return CircularDistribution(self._weights, normalize=True)

    def rotate(self, shift: int) -> "CircularDistribution":
        """Shift all mass by ``shift`` bins (counter-clockwise for positive shifts)."""
        return CircularDistribution(np.roll(self._weights, shift), normalize=False)

    def to_pairs(self) -> list[tuple[float, float]]:
        """Ordered (bin_center_phase, weight) pairs for export."""
        return list(zip(self.centers.tolist(), self._weights.tolist()))


def uniform(n_bins: int) -> CircularDistribution:
    n_bins = _check_bins(n_bins)
    return CircularDistribution(np.full(n_bins, 1.0 / n_bins), normalize=False)


def wrap_count(variance: float) -> int:
    """Smallest number of images M whose neglected neighbour carries < WRAP_TOL."""
    log_tol = math.log(WRAP_TOL)
    m = 0
    # the (M+1)-th image sits at least pi*(2M+1) away from any bin centre
    while -((math.pi * (2 * m + 1)) ** 2) / (2.0 * variance) >= log_tol:
        m += 1
    return m


def wrapped_gaussian_kernel(n_bins: int, variance: float) -> CircularDistribution:
    """Zero-mean Gaussian increment of the given variance wrapped onto the grid.

    Returned in lag layout (index 0 = no shift) and normalized to unit mass.
    """
    n_bins = _check_bins(n_bins)
    if not (variance > 0) or not math.isfinite(variance):
        raise ValueError(f"kernel variance must be positive and finite, got {variance!r}")
    lags = np.arange(n_bins)
    lags = np.where(lags > n_bins // 2, lags - n_bins, lags)
    offsets = lags * (TWO_PI / n_bins)
    m = wrap_count(variance)
    images = offsets[None, :] + TWO_PI * np.arange(-m, m + 1)[:, None]
    w = np.exp(-(images**2) / (2.0 * variance)).sum(axis=0)
    return CircularDistribution(w)


def _convolve_weights(a: np.ndarray, b_fft: np.ndarray) -> np.ndarray:
    out = np.fft.irfft(np.fft.rfft(a) * b_fft, a.size)
    np.maximum(out, 0.0, out=out)
    out /= out.sum()
    return out


def circular_convolve(dist: CircularDistribution, kernel: CircularDistribution) -> CircularDistribution:
    """Circular convolution ``out[i] = sum_j dist[j] * kernel[(i - j) mod n]``."""
    if dist.n_bins != kernel.n_bins:
        raise ValueError(f"bin count mismatch: {dist.n_bins} != {kernel.n_bins}")
    out = _convolve_weights(dist.weights, np.fft.rfft(kernel.weights))
    return CircularDistribution(out, normalize=False)


def argmax_phase(dist: CircularDistribution) -> float:
    """Centre phase of the heaviest bin; ties go to the lowest index."""
    i = int(np.argmax(dist.weights))
    return float(bin_centers(dist.n_bins)[i])
