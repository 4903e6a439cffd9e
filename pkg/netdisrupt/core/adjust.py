"""Pre-processing adjustments: row-offset reduction of overlap bounds and SVT denoising."""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg

from netdisrupt.core.bounds import PairingMode, dpo_bounds, overlap_bounds, paired_products
from netdisrupt.core.models import BoundInterval, BoundTerm, Network, ReductionDecomposition
from netdisrupt.core.netmat import IndicatorSpectra, eigh_checked
from netdisrupt.errors import ValidationError

logger = logging.getLogger(__name__)

SVT_CONSTANT = 2.01


def _reduce_matrix(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    row_means = x.mean(axis=1)
    offsets = row_means - x.mean() / 2
    return x - offsets[:, None] - offsets[None, :], offsets


def reduce(net: Network, mask_fill: float = 0.0) -> ReductionDecomposition:
    """Split net into r 1^T + 1 r^T plus a residual whose rows all sum to zero.

    r_i is the row mean of i minus half the grand mean. The residual is built from the
    filled matrix and is unmasked.
    """
    residual, offsets = _reduce_matrix(net.filled(mask_fill))
    return ReductionDecomposition(
        residual=net.with_values(
            (residual + residual.T) / 2, name=f"{net.name}~", keep_mask=False
        ),
        row_offsets=offsets,
    )


def _complement_of_ones(n: int) -> np.ndarray:
    """Orthonormal basis of the vectors summing to zero."""
    return scipy.linalg.null_space(np.ones((1, n)))


def reduction_interval(x1: np.ndarray, x0: np.ndarray) -> BoundInterval | None:
    """Overlap bounds from the reduced form, or None when the sizes differ.

    With zero-row-sum residuals X~, Y~ and offsets r, s,
    n^2 * overlap(P) = tr(X~_P Y~) + 2n sum_i r_P(i) s_i + 2 (sum r)(sum s).
    The trace is bounded by pairing the residual spectra on the complement of the ones
    vector, which permutations preserve; the linear term by sorted and anti-sorted products.
    """
    x1, x0 = np.asarray(x1, dtype=float), np.asarray(x0, dtype=float)
    if x1.shape != x0.shape:
        return None
    n = x1.shape[0]
    res1, r = _reduce_matrix(x1)
    res0, s = _reduce_matrix(x0)

    basis = _complement_of_ones(n)
    eig1 = eigh_checked(basis.T @ res1 @ basis, "reduced x1", eigvals_only=True)
    eig0 = eigh_checked(basis.T @ res0 @ basis, "reduced x0", eigvals_only=True)
    trace_lo = paired_products(eig1, eig0, PairingMode.ANTI)
    trace_hi = paired_products(eig1, eig0, PairingMode.CO)

    r_sorted, s_sorted = np.sort(r), np.sort(s)
    linear_lo = float(np.dot(r_sorted, s_sorted[::-1]))
    linear_hi = float(np.dot(r_sorted, s_sorted))
    constant = 2.0 * r.sum() * s.sum()

    lower = (trace_lo + 2 * n * linear_lo + constant) / n**2
    upper = (trace_hi + 2 * n * linear_hi + constant) / n**2
    upper = float(np.clip(upper, 0.0, 1.0))
    return BoundInterval(
        lower=min(float(np.clip(lower, 0.0, 1.0)), upper),
        upper=upper,
        lower_active=BoundTerm.REDUCTION,
        upper_active=BoundTerm.REDUCTION,
    )


def adjusted_matrix_bounds(x1: np.ndarray, x0: np.ndarray) -> BoundInterval:
    """overlap_bounds intersected with the reduction bounds.

    Falls back to plain overlap_bounds when the arms differ in size.
    """
    base = overlap_bounds(x1, x0)
    reduced = reduction_interval(x1, x0)
    if reduced is None:
        logger.warning(
            "reduction needs equal sizes (%d vs %d); using unadjusted bounds",
            np.shape(x1)[0],
            np.shape(x0)[0],
        )
        return base
    return base.intersect(reduced)


def adjusted_overlap_bounds(
    net1: Network,
    net0: Network,
    y1: float,
    y0: float,
    spectra: IndicatorSpectra | None = None,
) -> BoundInterval:
    """dpo_bounds tightened by the reduction of both indicator matrices."""
    if spectra is None:
        spectra = IndicatorSpectra()
    base = dpo_bounds(net1, net0, y1, y0, spectra=spectra)
    if net1.n != net0.n:
        logger.warning(
            "reduction needs equal group sizes (%d vs %d); using unadjusted bounds", net1.n, net0.n
        )
        return base
    x1 = spectra.matrix(net1, y1)
    x0 = spectra.matrix(net0, y0)
    return base.intersect(reduction_interval(x1, x0))


def svt_threshold(net: Network, constant: float = SVT_CONSTANT) -> float:
    """Universal threshold: c*sqrt(N p(1-p)) for binary data, c*sqrt(N)*sd otherwise."""
    values = net.unmasked_values()
    if net.is_binary():
        p = float(values.mean())
        return constant * float(np.sqrt(net.n * p * (1.0 - p)))
    return constant * float(np.sqrt(net.n)) * float(values.std())


def svt_denoise(
    net: Network,
    threshold: float | str | None = "auto",
    constant: float = SVT_CONSTANT,
    mask_fill: float = 0.0,
) -> Network:
    """Zero every eigenvalue of magnitude below the threshold and rebuild the network.

    ``threshold`` is a matrix-scale value or "auto" for svt_threshold. Binary inputs are
    clipped back to [0, 1].
    """
    if threshold is None or threshold == "auto":
        tau = svt_threshold(net, constant)
        if tau == 0.0:
            logger.info("auto SVT threshold is 0 for %r; leaving it unchanged", net.name)
            return net
    else:
        tau = float(threshold)
        if not tau > 0:
            raise ValidationError(f"SVT threshold must be positive, got {threshold!r}")

    eigenvalues, vectors = eigh_checked(net.filled(mask_fill), net.name, eigvals_only=False)
    keep = np.abs(eigenvalues) >= tau
    values = (vectors[:, keep] * eigenvalues[keep]) @ vectors[:, keep].T
    values = (values + values.T) / 2
    if net.is_binary():
        values = np.clip(values, 0.0, 1.0)
    logger.debug("SVT on %r: tau=%.6g, kept %d of %d eigenvalues", net.name, tau, keep.sum(), net.n)
    return net.with_values(values, name=f"svt({net.name})")
