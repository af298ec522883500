import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from beamcomb.circular import (
    CircularDistribution,
    argmax_phase,
    bin_centers,
    circular_convolve,
    uniform,
    wrap_count,
    wrap_phase,
    wrapped_gaussian_kernel,
)
from beamcomb.errors import ConfigurationError

from oracles import convolve_naive, kernel_direct, kernel_fourier

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def random_dist(n, seed):
    return CircularDistribution(np.random.default_rng(seed).random(n))


@pytest.mark.parametrize(
    "x, expected",
    [(1.5 * math.pi, -0.5 * math.pi), (math.pi, math.pi), (-math.pi, math.pi), (0.0, 0.0), (4 * math.pi + 0.25, 0.25)],
)
def test_wrap_phase_examples(x, expected):
    assert wrap_phase(x) == pytest.approx(expected, abs=1e-12)


def test_wrap_phase_boundaries_exact():
    assert wrap_phase(math.pi) == math.pi
    assert wrap_phase(-math.pi) == math.pi


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_wrap_phase_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        wrap_phase(bad)


@given(finite)
def test_wrap_phase_range_and_congruence(x):
    y = wrap_phase(x)
    assert -math.pi < y <= math.pi
    turns = (x - y) / (2 * math.pi)
    assert turns == pytest.approx(round(turns), abs=1e-6)


@given(st.floats(min_value=-math.pi, max_value=math.pi, exclude_min=True))
def test_wrap_phase_identity_inside(x):
    assert wrap_phase(x) == x


def test_wrap_phase_vectorized():
    out = wrap_phase(np.array([1.5 * math.pi, -math.pi, 0.1]))
    np.testing.assert_allclose(out, [-0.5 * math.pi, math.pi, 0.1])


@pytest.mark.parametrize("n", [8, 1024])
def test_uniform(n):
    u = uniform(n)
    assert np.all(u.weights == 1.0 / n)
    assert u.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_uniform_rejects_small_grid():
    with pytest.raises(ConfigurationError):
        uniform(7)


def test_bin_centers():
    c = bin_centers(8)
    assert c[0] == pytest.approx(-math.pi + math.pi / 8)
    assert c[-1] == pytest.approx(math.pi - math.pi / 8)
    np.testing.assert_allclose(np.diff(c), 2 * math.pi / 8)


def test_distribution_is_read_only():
    d = uniform(8)
    with pytest.raises(ValueError):
        d.weights[0] = 1.0


def test_distribution_rejects_negative_weights():
    with pytest.raises(ValueError):
        CircularDistribution([-1.0] + [1.0] * 7)


def test_kernel_fig2_parameters():
    # D = 0.05, dt = 0.01 -> variance 0.001
    n, var = 1024, 0.001
    k = wrapped_gaussian_kernel(n, var).weights
    lags = np.arange(n)
    off = np.where(lags > n // 2, lags - n, lags) * (2 * math.pi / n)
    width = 2 * math.pi / n
    sigma = math.sqrt(var)
    # oracle: Gaussian density integrated over each bin
    integrated = norm.cdf(off + width / 2, scale=sigma) - norm.cdf(off - width / 2, scale=sigma)
    integrated /= integrated.sum()
    std = math.sqrt(np.sum(k * off**2))
    assert std == pytest.approx(0.0316, abs=5e-4)
    assert std == pytest.approx(math.sqrt(np.sum(integrated * off**2)), rel=2e-3)
    inside = np.abs(off) <= 3 * sigma
    assert k[inside].sum() == pytest.approx(integrated[inside].sum(), abs=1e-3)
    assert k[inside].sum() == pytest.approx(0.997, abs=1e-3)


def test_kernel_wide_tends_to_uniform():
    n = 64
    k = wrapped_gaussian_kernel(n, 100.0).weights
    np.testing.assert_allclose(k, kernel_direct(n, 100.0), atol=1e-14)
    assert np.max(np.abs(k - 1.0 / n)) < 1e-6


@pytest.mark.parametrize("variance", [0.001, 0.05, 1.0, 5.0])
def test_kernel_matches_direct_and_fourier_oracles(variance):
    n = 64
    k = wrapped_gaussian_kernel(n, variance).weights
    np.testing.assert_allclose(k, kernel_direct(n, variance), atol=1e-14)
    if variance >= 0.05:
        # the Fourier series converges too slowly for very narrow kernels
        np.testing.assert_allclose(k, kernel_fourier(n, variance), atol=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_kernel_rejects_non_positive_variance(bad):
    with pytest.raises(ValueError):
        wrapped_gaussian_kernel(64, bad)


def test_wrap_count():
    assert wrap_count(0.001) == 0
    assert wrap_count(100.0) > 0


@given(st.floats(min_value=1e-6, max_value=50.0), st.integers(min_value=8, max_value=300))
@settings(max_examples=50, deadline=None)
def test_kernel_normalized_and_symmetric(variance, n):
    k = wrapped_gaussian_kernel(n, variance).weights
    assert k.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(k >= 0)
    mirrored = k[(-np.arange(n)) % n]
    np.testing.assert_allclose(k, mirrored, atol=1e-12, rtol=0)


def test_convolve_uniform_invariant():
    u = uniform(64)
    out = circular_convolve(u, random_dist(64, 1))
    np.testing.assert_allclose(out.weights, 1 / 64, atol=1e-15)


def test_convolve_delta_sifts():
    k = wrapped_gaussian_kernel(64, 0.2)
    out = circular_convolve(CircularDistribution.delta(64, 10), k)
    np.testing.assert_allclose(out.weights, np.roll(k.weights, 10), atol=1e-15)


def test_convolve_matches_double_loop():
    a, b = random_dist(64, 2), random_dist(64, 3)
    expected = convolve_naive(a.weights.tolist(), b.weights.tolist())
    np.testing.assert_allclose(circular_convolve(a, b).weights, expected, atol=1e-10, rtol=0)


def test_convolve_mismatched_bins():
    with pytest.raises(ValueError):
        circular_convolve(uniform(8), uniform(16))


@given(st.integers(0, 10_000), st.integers(0, 10_000))
@settings(max_examples=30)
def test_convolve_commutative(s1, s2):
    a, b = random_dist(32, s1), random_dist(32, s2)
    np.testing.assert_allclose(circular_convolve(a, b).weights, circular_convolve(b, a).weights, atol=1e-10)


@given(st.integers(0, 10_000), st.integers(-100, 100))
@settings(max_examples=30)
def test_convolve_shift_equivariant(seed, r):
    a = random_dist(32, seed)
    k = wrapped_gaussian_kernel(32, 0.3)
    lhs = circular_convolve(a.rotate(r), k).weights
    rhs = np.roll(circular_convolve(a, k).weights, r)
    np.testing.assert_allclose(lhs, rhs, atol=1e-15)


@given(st.integers(0, 10_000))
@settings(max_examples=30)
def test_convolve_output_normalized(seed):
    out = circular_convolve(random_dist(48, seed), random_dist(48, seed + 1))
    assert out.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(out.weights >= 0)


def test_argmax_delta():
    assert argmax_phase(CircularDistribution.delta(16, 5)) == bin_centers(16)[5]


def test_argmax_uniform_picks_bin_zero():
    assert argmax_phase(uniform(64)) == bin_centers(64)[0]


def test_argmax_strict_maximum():
    w = np.full(64, (1 - 0.61) / 62)
    w[10], w[50] = 0.30, 0.31
    assert argmax_phase(CircularDistribution(w)) == bin_centers(64)[50]


@given(st.integers(0, 10_000), st.floats(min_value=1e-3, max_value=1e3))
@settings(max_examples=30)
def test_argmax_scale_invariant(seed, c):
    d = random_dist(40, seed)
    assert argmax_phase(CircularDistribution(d.weights * c)) == argmax_phase(d)
