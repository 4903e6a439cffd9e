"""Spectral treatment effects, the aggregate-disruption bound, and matrix lifts."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from netdisrupt.core.bounds import pad_sorted
from netdisrupt.core.models import (
    DteCurve,
    EigenPair,
    MonotoneLift,
    Network,
    PointIdentifiedDte,
    SteBasis,
    SteField,
)
from netdisrupt.core.netmat import eigen_pairs, spectrum
from netdisrupt.errors import ValidationError

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-9


def _padded_positions(eigenvalues: np.ndarray, length: int) -> np.ndarray:
    """Eigenvector index for each slot of the zero-padded, descending-sorted list (-1 for padding).

    Among equal values the real eigenpairs come before padded zeros.
    """
    padded = np.concatenate([eigenvalues, np.zeros(length - len(eigenvalues))])
    index = np.concatenate([np.arange(len(eigenvalues)), np.full(length - len(eigenvalues), -1)])
    order = np.argsort(-padded, kind="stable")
    return index[order]


def _is_degenerate(eigenvalues: np.ndarray) -> bool:
    return bool(np.any(np.abs(np.diff(eigenvalues)) < DEGENERACY_TOL))


def ste_field(
    net1: Network,
    net0: Network,
    basis: SteBasis | str = SteBasis.TREATED,
    custom_basis: np.ndarray | None = None,
    mask_fill: float = 0.0,
) -> SteField:
    """Spectral treatment effect sum_r (sigma_r1 - sigma_r0) phi_r phi_r^T on the basis cells.

    Args:
        net1: Treated-arm network.
        net0: Control-arm network.
        basis: Whose eigenvectors carry the effect: treated (STT), untreated (STU) or custom.
        custom_basis: Matrix with orthonormal columns, required for the custom basis; column r
            is paired with the r-th largest eigenvalue gap.
        mask_fill: Value substituted into masked cells before decomposition.

    Returns:
        SteField with matrix-scale values. ``dropped_terms`` counts nonzero gaps that fell on
        padded slots with no basis vector (only possible when the basis arm is the smaller one).
    """
    basis = SteBasis(basis)
    pair1, pair0 = eigen_pairs(net1, mask_fill), eigen_pairs(net0, mask_fill)
    sigma1, sigma0 = pad_sorted(pair1.eigenvalues, pair0.eigenvalues)
    gaps = sigma1 - sigma0
    length = len(gaps)

    if basis is SteBasis.CUSTOM:
        if custom_basis is None:
            raise ValidationError("custom basis requested without a basis matrix")
        unit = np.asarray(custom_basis, dtype=float)
        if unit.ndim != 2 or unit.shape[1] > length:
            raise ValidationError(
                f"custom basis has shape {unit.shape}; need at most {length} columns"
            )
        if not np.allclose(unit.T @ unit, np.eye(unit.shape[1]), atol=1e-8):
            raise ValidationError("custom basis columns are not orthonormal")
        vectors = unit * np.sqrt(unit.shape[0])
        positions = np.concatenate(
            [np.arange(unit.shape[1]), np.full(length - unit.shape[1], -1)]
        )
    else:
        pair: EigenPair = pair1 if basis is SteBasis.TREATED else pair0
        vectors = pair.eigenvectors
        positions = _padded_positions(pair.eigenvalues, length)

    used = positions >= 0
    dropped = int(np.count_nonzero(~used & (gaps != 0)))
    phi = vectors[:, positions[used]]
    values = (phi * gaps[used]) @ phi.T
    values = (values + values.T) / 2

    degenerate = _is_degenerate(pair1.eigenvalues) or _is_degenerate(pair0.eigenvalues)
    if degenerate:
        logger.debug(
            "near-degenerate spectrum in %r or %r; eigenbasis not unique", net1.name, net0.name
        )
    if dropped:
        logger.warning("%d spectral effect terms have no %s basis vector", dropped, basis.value)
    return SteField(
        basis=basis, values=values, eigengap=gaps, degenerate=degenerate, dropped_terms=dropped
    )


def disruption_lower_bound(net1: Network, net0: Network, mask_fill: float = 0.0) -> float:
    """Squared distance between the sorted embedded spectra.

    By Hoffman-Wielandt this lower-bounds the mean squared change of dyadic outcomes under
    any matching of agents between arms.
    """
    sigma1, sigma0 = pad_sorted(spectrum(net1, mask_fill), spectrum(net0, mask_fill))
    return float(np.sum((sigma1 - sigma0) ** 2))


def empirical_cdf(entries: np.ndarray, grid) -> np.ndarray:
    """Fraction of entries <= each grid point."""
    ordered = np.sort(np.ravel(entries))
    return np.searchsorted(ordered, np.asarray(grid, dtype=float), side="right") / ordered.size


def quantile_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Sup distance between the empirical quantile functions of two samples."""
    a, b = np.sort(np.ravel(a)), np.sort(np.ravel(b))
    if a.size == b.size:
        return float(np.max(np.abs(a - b)))
    levels = np.union1d(np.arange(1, a.size + 1) / a.size, np.arange(1, b.size + 1) / b.size)
    mids = (np.concatenate([[0.0], levels[:-1]]) + levels) / 2
    qa = a[np.ceil(mids * a.size).astype(int) - 1]
    qb = b[np.ceil(mids * b.size).astype(int) - 1]
    return float(np.max(np.abs(qa - qb)))


def dte_point_identified(
    net1: Network,
    net0: Network,
    grid: Sequence[float],
    basis: SteBasis | str = SteBasis.TREATED,
    custom_basis: np.ndarray | None = None,
) -> PointIdentifiedDte:
    """Distribution of treatment effects assuming the policy is matrix rank invariant.

    Both the STT and STU entry distributions are computed; under the assumption they agree,
    and their quantile sup-distance is reported as a diagnostic.
    """
    grid = np.asarray(grid, dtype=float)
    stt = ste_field(net1, net0, SteBasis.TREATED)
    stu = ste_field(net1, net0, SteBasis.UNTREATED)
    stt_cdf, stu_cdf = empirical_cdf(stt.values, grid), empirical_cdf(stu.values, grid)

    basis = SteBasis(basis)
    if basis is SteBasis.TREATED:
        cdf = stt_cdf
    elif basis is SteBasis.UNTREATED:
        cdf = stu_cdf
    else:
        cdf = empirical_cdf(ste_field(net1, net0, basis, custom_basis).values, grid)

    distance = quantile_distance(stt.values, stu.values)
    logger.info("STT/STU quantile distance %.3g", distance)
    return PointIdentifiedDte(
        basis=basis,
        curve=DteCurve(grid=grid, lower=cdf, upper=cdf),
        stt_cdf=stt_cdf,
        stu_cdf=stu_cdf,
        sup_distance=distance,
    )


def implicit_counterfactual(net1: Network, net0: Network, mask_fill: float = 0.0) -> np.ndarray:
    """Control-arm eigenvalues placed on treated-arm eigenvectors: sum_r sigma_r0 phi_r1 phi_r1^T.

    Under a rank-invariant lift this is the control network expressed in treated-arm labels.
    """
    pair1, pair0 = eigen_pairs(net1, mask_fill), eigen_pairs(net0, mask_fill)
    _, sigma0 = pad_sorted(pair1.eigenvalues, pair0.eigenvalues)
    positions = _padded_positions(pair1.eigenvalues, len(sigma0))
    used = positions >= 0
    phi = pair1.eigenvectors[:, positions[used]]
    return (phi * sigma0[used]) @ phi.T


def matrix_lift(g: MonotoneLift, net: Network, mask_fill: float = 0.0) -> Network:
    """Apply g to the embedded eigenvalues of net and rebuild the matrix-scale network.

    The result is unmasked: the lift acts on the filled matrix.
    """
    pair = eigen_pairs(net, mask_fill)
    lo, hi = float(pair.eigenvalues.min()), float(pair.eigenvalues.max())
    if not g.is_nondecreasing_on(lo, hi):
        raise ValidationError(
            f"lift is decreasing somewhere on the spectrum range [{lo:g}, {hi:g}]"
        )
    phi = pair.eigenvectors
    values = (phi * np.asarray(g(pair.eigenvalues), dtype=float)) @ phi.T
    return net.with_values((values + values.T) / 2, name=f"g({net.name})", keep_mask=False)
