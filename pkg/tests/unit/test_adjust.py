"""Tests for the reduction adjustment and SVT denoising."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import numpy as np
import pytest

from netdisrupt.core.adjust import (
    adjusted_matrix_bounds,
    adjusted_overlap_bounds,
    reduce,
    reduction_interval,
    svt_denoise,
    svt_threshold,
)
from netdisrupt.core.bounds import destroyed_created_bounds, dpo_bounds, overlap_bounds
from netdisrupt.core.models import BoundTerm
from netdisrupt.core.netmat import IndicatorSpectra
from netdisrupt.core.oracle import permutation_overlaps
from netdisrupt.errors import ValidationError
from tests.helpers import line, network, random_binary, random_symmetric, star


def test_reduce_splits_row_offsets():
    """Residual rows sum to zero and the parts rebuild the matrix."""
    rng = np.random.default_rng(21)
    net = network(random_symmetric(rng, 6), name="x")
    parts = reduce(net)

    assert np.allclose(parts.residual.values.sum(axis=1), 0.0)
    assert np.allclose(parts.reconstruct(), net.values)
    assert parts.residual.name == "x~"
    assert not parts.residual.has_mask


def test_reduce_constant_matrix():
    """A constant matrix is all offset: residual 0 and r = c / 2."""
    parts = reduce(network(np.full((5, 5), 3.0)))

    assert np.allclose(parts.residual.values, 0.0)
    assert np.allclose(parts.row_offsets, 1.5)


def test_reduce_star_offsets():
    """The hub carries the largest offset; residual rows all average zero."""
    parts = reduce(star())

    assert np.all(parts.row_offsets[0] > parts.row_offsets[1:])
    assert np.allclose(parts.row_offsets[1:], parts.row_offsets[1])
    assert np.allclose(parts.residual.values.mean(axis=1), 0.0)


def test_reduction_interval_needs_equal_sizes():
    """Different sizes have no reduced form; the matrix bounds fall back unchanged."""
    x1 = np.ones((3, 3))
    x0 = np.eye(4)

    assert reduction_interval(x1, x0) is None
    assert adjusted_matrix_bounds(x1, x0) == overlap_bounds(x1, x0)


def test_reduction_interval_contains_every_matching():
    """The reduced-form interval brackets the overlap of every relabeling."""
    rng = np.random.default_rng(22)

    for _ in range(100):
        n = int(rng.integers(2, 7))
        x1 = random_binary(rng, n).values
        x0 = random_binary(rng, n).values
        interval = reduction_interval(x1, x0)
        overlaps = permutation_overlaps(x1, x0) / n**2

        assert interval.lower_active is BoundTerm.REDUCTION
        assert interval.lower <= overlaps.min() + 1e-9
        assert overlaps.max() <= interval.upper + 1e-9


def test_adjusted_bounds_never_widen():
    """Adjusted bounds lie inside the unadjusted ones."""
    rng = np.random.default_rng(23)

    for _ in range(500):
        n = int(rng.integers(2, 12))
        net1, net0 = random_binary(rng, n), random_binary(rng, n)
        y1, y0 = float(rng.choice([0.0, 1.0])), float(rng.choice([0.0, 1.0]))
        spectra = IndicatorSpectra()

        base = dpo_bounds(net1, net0, y1, y0, spectra=spectra)
        adjusted = adjusted_overlap_bounds(net1, net0, y1, y0, spectra=spectra)

        assert base.lower - 1e-12 <= adjusted.lower <= adjusted.upper <= base.upper + 1e-12


def test_adjusted_bounds_toy_destroyed_links():
    """Adjusted destroyed-link bounds still contain 3 and 4 pairs."""
    adjusted = destroyed_created_bounds(line(), star(), overlap=adjusted_matrix_bounds)
    plain = destroyed_created_bounds(line(), star())

    lower, upper = adjusted["destroyed"].as_pair_counts(6)
    assert lower <= 3 + 1e-9 and upper >= 4 - 1e-9
    assert adjusted["destroyed"].width <= plain["destroyed"].width + 1e-12


def test_adjusted_bounds_toy_destroyed_links_value():
    """Adjustment lifts the toy destroyed-link lower bound to 1.887 pairs; the upper stays 5."""
    adjusted = destroyed_created_bounds(line(), star(), overlap=adjusted_matrix_bounds)

    lower, upper = adjusted["destroyed"].as_pair_counts(6)
    assert lower == pytest.approx(1.887, abs=1e-3)
    assert upper == pytest.approx(5.0)


def test_adjusted_bounds_constant_networks_are_points():
    """Constant networks make every indicator all-or-nothing, so F is identified."""
    rng = np.random.default_rng(27)

    for _ in range(20):
        n = int(rng.integers(2, 9))
        c1, c0 = (float(v) for v in rng.integers(0, 3, size=2))
        net1 = network(np.full((n, n), c1), group=1)
        net0 = network(np.full((n, n), c0))
        for y1, y0 in ((0.5, 0.5), (1.5, 0.5), (0.5, 2.5), (2.5, 2.5)):
            bound = adjusted_overlap_bounds(net1, net0, y1, y0)
            truth = float(c1 <= y1 and c0 <= y0)

            assert bound.lower == pytest.approx(truth, abs=1e-9)
            assert bound.upper == pytest.approx(truth, abs=1e-9)


def test_adjusted_overlap_bounds_unequal_sizes_fall_back():
    """Networks of different sizes get the unadjusted interval."""
    adjusted = adjusted_overlap_bounds(line(5), star(6), 0.0, 0.0)

    assert adjusted == dpo_bounds(line(5), star(6), 0.0, 0.0)


def test_svt_threshold_binary():
    """Binary threshold is c * sqrt(N p (1 - p))."""
    net = star()
    p = 10 / 36

    assert svt_threshold(net) == pytest.approx(2.01 * np.sqrt(6 * p * (1 - p)))
    assert svt_threshold(net, constant=1.0) == pytest.approx(np.sqrt(6 * p * (1 - p)))


def test_svt_threshold_weighted():
    """Weighted threshold is c * sqrt(N) * sd."""
    rng = np.random.default_rng(24)
    net = network(random_symmetric(rng, 8))

    assert svt_threshold(net) == pytest.approx(2.01 * np.sqrt(8) * net.values.std())


def test_svt_denoise_auto_zero_returns_input():
    """An empty network has threshold 0 and is returned as is."""
    empty = network(np.zeros((4, 4)))

    assert svt_denoise(empty) is empty


def test_svt_denoise_explicit_threshold():
    """A huge threshold removes everything; a tiny one keeps the matrix."""
    rng = np.random.default_rng(25)
    net = network(random_symmetric(rng, 6), name="x")

    assert np.allclose(svt_denoise(net, threshold=1e6).values, 0.0)
    kept = svt_denoise(net, threshold=1e-12)
    assert np.allclose(kept.values, net.values)
    assert kept.name == "svt(x)"


def test_svt_denoise_binary_output_is_clipped():
    """Denoised binary networks stay inside [0, 1]."""
    rng = np.random.default_rng(26)
    denoised = svt_denoise(random_binary(rng, 20, p=0.3))

    assert denoised.values.min() >= 0.0
    assert denoised.values.max() <= 1.0


def test_svt_denoise_rejects_non_positive_threshold():
    """Explicit thresholds must be positive."""
    with pytest.raises(ValidationError):
        svt_denoise(star(), threshold=0.0)
    with pytest.raises(ValidationError):
        svt_denoise(star(), threshold=-1.0)


def test_svt_denoise_is_idempotent_at_fixed_threshold():
    """Denoising twice at the same threshold changes nothing more."""
    rng = np.random.default_rng(28)

    for _ in range(30):
        n = int(rng.integers(4, 20))
        net = network(random_symmetric(rng, n))
        magnitudes = np.sort(np.abs(np.linalg.eigvalsh(net.values)))
        gap = int(np.argmax(np.diff(magnitudes)))
        tau = float(magnitudes[gap] + magnitudes[gap + 1]) / 2

        once = svt_denoise(net, threshold=tau)
        twice = svt_denoise(once, threshold=tau)
        assert np.allclose(twice.values, once.values, atol=1e-9)


def test_svt_denoise_recovers_planted_rank_one():
    """A strong rank-1 signal under Gaussian noise is reconstructed below the noise level."""
    rng = np.random.default_rng(29)
    n, sd = 200, 0.1
    v = rng.uniform(0.3, 0.9, size=n)
    signal = np.outer(v, v)
    noise = rng.normal(scale=sd, size=(n, n))
    noise = (noise + noise.T) / np.sqrt(2)

    denoised = svt_denoise(network(signal + noise))
    error = np.sqrt(np.mean((denoised.values - signal) ** 2))

    assert error < np.sqrt(np.mean(noise**2))
    assert np.linalg.matrix_rank(denoised.values, tol=1e-6) == 1


if __name__ == "__main__":
    test_reduce_splits_row_offsets()
    test_reduction_interval_contains_every_matching()
    test_adjusted_bounds_never_widen()
    print("All tests passed!")
