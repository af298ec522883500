import math

import numpy as np

from beamcomb.circular import CircularDistribution, bin_centers, wrap_phase
from beamcomb.estimator import BayesFilter
from beamcomb.physics import SystemParams, sample_click


def peak(n_bins, center, std):
    """Wrapped-normal bump on the grid centred at an arbitrary phase."""
    d = wrap_phase(bin_centers(n_bins) - center)
    return np.exp(-0.5 * (d / std) ** 2)


def antipodal_recovery(trials, n_slots=200, n_bins=1024, seed=0, tol=math.pi / 16):
    """Fraction of trials in which a filter started on the wrong (antipodal) peak recovers.

    D = 0 and I0*dt = 0.1.  The prior is a two-peak mixture centred on the true
    phase and its antipode, weighted 45/55 so the initial MAP is the wrong one.
    """
    params = SystemParams(intensity_per_beam=10.0, diffusion=0.0, slot_duration=0.01)
    rng = np.random.default_rng(seed)
    recovered = 0
    for _ in range(trials):
        truth = wrap_phase(float(rng.uniform(-math.pi, math.pi)))
        wrong = wrap_phase(truth + math.pi)
        prior = CircularDistribution(0.45 * peak(n_bins, truth, 0.3) + 0.55 * peak(n_bins, wrong, 0.3))
        filt = BayesFilter(params, n_bins, prior=prior)
        assert abs(wrap_phase(filt.current_correction - wrong)) < 2 * math.pi / n_bins
        for _ in range(n_slots):
            filt.step(sample_click(params, truth - filt.current_correction, rng))
        if abs(wrap_phase(filt.current_correction - truth)) < tol:
            recovered += 1
    return recovered / trials
