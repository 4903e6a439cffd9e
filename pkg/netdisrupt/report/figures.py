"""Plot data for effect distributions: histograms and smoothed densities."""

from __future__ import annotations

import logging

import numpy as np
from scipy.stats import gaussian_kde

logger = logging.getLogger(__name__)

KDE_MAX_SAMPLES = 20000


def common_range(*samples: np.ndarray) -> tuple[float, float]:
    """Smallest interval covering every sample, widened when it is a single point."""
    lo = min(float(np.min(s)) for s in samples)
    hi = max(float(np.max(s)) for s in samples)
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def histogram(values: np.ndarray, bins: int, value_range: tuple[float, float]) -> dict:
    """Bin edges and the fraction of entries in each bin."""
    values = np.ravel(values)
    counts, edges = np.histogram(values, bins=bins, range=value_range)
    return {"edges": edges, "mass": counts / max(values.size, 1)}


def smoothed_density(
    values: np.ndarray, points: int, value_range: tuple[float, float]
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian KDE with Silverman's bandwidth on an even grid over ``value_range``.

    Large samples are thinned with a fixed seed. A sample with no spread has no density;
    zeros are returned for it.
    """
    values = np.ravel(values)
    x = np.linspace(value_range[0], value_range[1], points)
    if values.size > KDE_MAX_SAMPLES:
        values = np.random.default_rng(0).choice(values, KDE_MAX_SAMPLES, replace=False)
    if values.size < 2 or np.ptp(values) == 0:
        logger.debug("degenerate sample for density; writing zeros")
        return x, np.zeros_like(x)
    try:
        kde = gaussian_kde(values, bw_method="silverman")
    except np.linalg.LinAlgError:
        logger.debug("singular sample covariance for density; writing zeros")
        return x, np.zeros_like(x)
    return x, kde(x)
