"""Eigenvalue-rearrangement bounds on the DPO and DTE, plus marginal-only baselines.

All probabilities are fractions of the N² ordered dyads of the function embedding. A
network's indicator 1{Y <= y} has embedded eigenvalues whose squares sum to the
fraction of cells at or below y, so that fraction is used directly wherever a bound
needs the sum of squared eigenvalues.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from enum import Enum

import numpy as np

from netdisrupt.core.models import (
    BoundInterval,
    BoundTerm,
    DpoCellTable,
    DteCurve,
    Network,
    Spectrum,
)
from netdisrupt.core.netmat import IndicatorSpectra, matrix_spectrum
from netdisrupt.errors import ValidationError

logger = logging.getLogger(__name__)

MAX_PMF_SUPPORT = 12

OverlapFn = Callable[[np.ndarray, np.ndarray], BoundInterval]
CornerFn = Callable[..., BoundInterval]


class PairingMode(str, Enum):
    """How two descending eigenvalue lists are matched."""

    CO = "co"  # r-th largest with r-th largest
    ANTI = "anti"  # r-th largest with r-th smallest


def _eigenvalues(s: Spectrum | np.ndarray) -> np.ndarray:
    return s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s, dtype=float)


def pad_sorted(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Zero-pad two eigenvalue lists to a common length and sort both descending.

    Re-sorting after padding places the padded zeros between positive and negative values.
    """
    a, b = _eigenvalues(a), _eigenvalues(b)
    length = max(len(a), len(b))
    a = np.concatenate([a, np.zeros(length - len(a))])
    b = np.concatenate([b, np.zeros(length - len(b))])
    return np.sort(a)[::-1], np.sort(b)[::-1]


def paired_products(s1, s0, mode: PairingMode | str = PairingMode.CO) -> float:
    """Inner product of two descending eigenvalue lists, co-paired or anti-paired."""
    a, b = pad_sorted(s1, s0)
    if PairingMode(mode) is PairingMode.ANTI:
        b = b[::-1]
    return float(np.dot(a, b))


def _overlap_interval(m1: float, m0: float, lam1, lam0) -> BoundInterval:
    """Overlap interval from indicator densities and indicator spectra."""
    co = paired_products(lam1, lam0, PairingMode.CO)
    anti = paired_products(lam1, lam0, PairingMode.ANTI)
    # max/min return the first binding term on ties
    lower, lower_active = max(
        [
            (m1 + m0 - 1.0, BoundTerm.SUM_MINUS_ONE),
            (anti, BoundTerm.ANTI_PAIRED),
            (0.0, BoundTerm.ZERO),
        ],
        key=lambda term: term[0],
    )
    upper, upper_active = min(
        [(m1, BoundTerm.MARGINAL1), (m0, BoundTerm.MARGINAL0), (co, BoundTerm.CO_PAIRED)],
        key=lambda term: term[0],
    )
    upper = float(np.clip(upper, 0.0, 1.0))
    lower = min(float(np.clip(lower, 0.0, 1.0)), upper)
    return BoundInterval(lower, upper, lower_active, upper_active)


def overlap_bounds(x1: np.ndarray, x0: np.ndarray) -> BoundInterval:
    """Bounds on (1/n²) sum_ij X1[P(i), P(j)] X0[i, j] over relabelings, for 0/1 matrices.

    Matrices of different sizes are compared through their function embeddings.
    """
    x1, x0 = np.asarray(x1, dtype=float), np.asarray(x0, dtype=float)
    return _overlap_interval(
        float(x1.mean()),
        float(x0.mean()),
        matrix_spectrum(x1, "x1"),
        matrix_spectrum(x0, "x0"),
    )


def dpo_bounds(
    net1: Network,
    net0: Network,
    y1: float,
    y0: float,
    spectra: IndicatorSpectra | None = None,
) -> BoundInterval:
    """Spectral bounds on F(y1, y0) = P(Y1 <= y1, Y0 <= y0)."""
    if spectra is None:
        spectra = IndicatorSpectra()
    interval = _overlap_interval(
        net1.fraction_at_most(y1),
        net0.fraction_at_most(y0),
        spectra.spectrum(net1, y1),
        spectra.spectrum(net0, y0),
    )
    return BoundInterval(
        interval.lower, interval.upper, interval.lower_active, interval.upper_active, y1=y1, y0=y0
    )


def frechet_overlap(m1: float, m0: float) -> BoundInterval:
    """Marginal-only bounds on a joint probability with marginals m1 and m0."""
    lower, lower_active = max(
        [(m1 + m0 - 1.0, BoundTerm.SUM_MINUS_ONE), (0.0, BoundTerm.ZERO)], key=lambda term: term[0]
    )
    upper, upper_active = min(
        [(m1, BoundTerm.MARGINAL1), (m0, BoundTerm.MARGINAL0)], key=lambda term: term[0]
    )
    return BoundInterval(float(lower), float(upper), lower_active, upper_active)


def frechet_hoeffding(net1: Network, net0: Network, y1: float, y0: float) -> BoundInterval:
    """Frechet-Hoeffding bounds on F(y1, y0) from the two marginal fractions."""
    interval = frechet_overlap(net1.fraction_at_most(y1), net0.fraction_at_most(y0))
    return BoundInterval(
        interval.lower, interval.upper, interval.lower_active, interval.upper_active, y1=y1, y0=y0
    )


def mean_difference(net1: Network, net0: Network) -> float:
    """Mean of unmasked cells of net1 minus that of net0."""
    return float(net1.unmasked_values().mean() - net0.unmasked_values().mean())


def _require_binary(*nets: Network) -> None:
    for net in nets:
        if not net.is_binary():
            raise ValidationError(f"network {net.name!r} must take values in {{0, 1}}")


def link_indicators(net1: Network, net0: Network) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Pairs of 0/1 matrices whose overlap is the destroyed or created link fraction."""
    _require_binary(net1, net0)
    link1 = net1.filled(0.0)
    link0 = net0.filled(0.0)
    absent1 = ((net1.values <= 0) & ~net1.mask).astype(float)
    absent0 = ((net0.values <= 0) & ~net0.mask).astype(float)
    return {
        "destroyed": (absent1, link0),  # P(Y1 = 0, Y0 = 1)
        "created": (link1, absent0),  # P(Y1 = 1, Y0 = 0)
    }


def destroyed_created_bounds(
    net1: Network, net0: Network, overlap: OverlapFn = overlap_bounds
) -> dict[str, BoundInterval]:
    """Bounds on the fractions of ordered dyads whose link the policy destroys or creates."""
    return {name: overlap(x1, x0) for name, (x1, x0) in link_indicators(net1, net0).items()}


def frechet_destroyed_created(net1: Network, net0: Network) -> dict[str, BoundInterval]:
    """Marginal-only counterpart of destroyed_created_bounds."""
    return {
        name: frechet_overlap(float(x1.mean()), float(x0.mean()))
        for name, (x1, x0) in link_indicators(net1, net0).items()
    }


def dte_grid(net1: Network, net0: Network, y: float) -> np.ndarray:
    """Treated-arm thresholds y1 at which the sup/inf over y1 - y0 = y can change."""
    candidates = np.union1d(net1.support(), net0.support() + y)
    if candidates.size == 0:
        raise ValidationError("empty threshold grid: both networks have no unmasked cells")
    return candidates


def dte_bounds(
    net1: Network,
    net0: Network,
    y: float,
    grid: Sequence[float] | None = None,
    spectra: IndicatorSpectra | None = None,
) -> BoundInterval:
    """Spectral bounds on Delta(y) = P(Y1 - Y0 <= y).

    ``grid`` lists the y1 values searched (y0 = y1 - y); by default the support-derived
    grid, on which the sup and inf are attained. The lower bound uses the strict event
    Y0 < y0. Ties keep the first (smallest) y1.
    """
    if spectra is None:
        spectra = IndicatorSpectra()
    candidates = dte_grid(net1, net0, y) if grid is None else np.sort(np.asarray(grid, dtype=float))
    if candidates.size == 0:
        raise ValidationError("empty threshold grid")

    best_lower = (-np.inf, BoundTerm.ZERO, None)
    best_upper = (np.inf, BoundTerm.ONE, None)
    for y1 in candidates:
        y0 = float(y1 - y)
        f1 = net1.fraction_at_most(y1)
        lam1 = spectra.spectrum(net1, y1)

        f0_strict = net0.fraction_at_most(y0, strict=True)
        lam0_strict = spectra.spectrum(net0, y0, strict=True)
        lower, lower_term = max(
            [
                (f1 - f0_strict, BoundTerm.MARGINAL_GAP),
                (f1 - paired_products(lam1, lam0_strict), BoundTerm.CO_GAP),
                (0.0, BoundTerm.ZERO),
            ],
            key=lambda term: term[0],
        )
        if lower > best_lower[0]:
            best_lower = (lower, lower_term, (float(y1), y0))

        f0 = net0.fraction_at_most(y0)
        lam0 = spectra.spectrum(net0, y0)
        gap, upper_term = min(
            [
                (f1 - f0, BoundTerm.MARGINAL_GAP),
                (paired_products(lam1, lam0) - f0, BoundTerm.CO_GAP),
                (0.0, BoundTerm.ONE),
            ],
            key=lambda term: term[0],
        )
        if 1.0 + gap < best_upper[0]:
            best_upper = (1.0 + gap, upper_term, (float(y1), y0))

    upper = float(np.clip(best_upper[0], 0.0, 1.0))
    lower = min(float(np.clip(best_lower[0], 0.0, 1.0)), upper)
    return BoundInterval(
        lower=lower,
        upper=upper,
        lower_active=best_lower[1],
        upper_active=best_upper[1],
        lower_at=best_lower[2],
        upper_at=best_upper[2],
    )


def dte_curve(
    net1: Network,
    net0: Network,
    grid: Sequence[float],
    spectra: IndicatorSpectra | None = None,
) -> DteCurve:
    """Pointwise DTE bounds repaired to be nondecreasing in y."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValidationError("DTE curve needs at least one grid point")
    if np.any(np.diff(grid) < 0):
        raise ValidationError("DTE curve grid must be sorted ascending")

    if spectra is None:
        spectra = IndicatorSpectra()
    points = [dte_bounds(net1, net0, float(y), spectra=spectra) for y in grid]
    lower = np.maximum.accumulate([p.lower for p in points])
    upper = np.minimum.accumulate([p.upper for p in points][::-1])[::-1]
    return DteCurve(grid=grid, lower=np.minimum(lower, upper), upper=upper)


def _marginal_pmf(net: Network, support: np.ndarray) -> np.ndarray:
    values = net.unmasked_values()
    return np.array([np.count_nonzero(values == a) for a in support], dtype=float) / net.n**2


def pmf_cell_bounds(
    net1: Network,
    net0: Network,
    corner: CornerFn = dpo_bounds,
    spectra: IndicatorSpectra | None = None,
    max_support: int = MAX_PMF_SUPPORT,
) -> DpoCellTable:
    """Bounds on P(Y1 = a, Y0 = b) for finitely-valued outcomes.

    Each cell is the rectangle difference F(a,b) - F(a-,b) - F(a,b-) + F(a-,b-) evaluated with
    interval arithmetic on corner bounds, then clipped by the exactly identified marginals.
    """
    support1, support0 = net1.support(), net0.support()
    for net, support in ((net1, support1), (net0, support0)):
        if support.size > max_support:
            raise ValidationError(
                f"network {net.name!r} takes {support.size} distinct values (limit {max_support}); "
                "use dpo_bounds on chosen thresholds instead"
            )
    if spectra is None:
        spectra = IndicatorSpectra()
    p1, p0 = _marginal_pmf(net1, support1), _marginal_pmf(net0, support0)

    k1, k0 = support1.size, support0.size
    # row/column 0 stands for a threshold of -inf, where F is exactly 0
    lo = np.zeros((k1 + 1, k0 + 1))
    hi = np.zeros((k1 + 1, k0 + 1))
    for i, a in enumerate(support1, start=1):
        for j, b in enumerate(support0, start=1):
            bound = corner(net1, net0, float(a), float(b), spectra=spectra)
            lo[i, j], hi[i, j] = bound.lower, bound.upper

    cells = []
    for i in range(1, k1 + 1):
        row = []
        for j in range(1, k0 + 1):
            lower = lo[i, j] - hi[i - 1, j] - hi[i, j - 1] + lo[i - 1, j - 1]
            upper = hi[i, j] - lo[i - 1, j] - lo[i, j - 1] + hi[i - 1, j - 1]
            floor = max(0.0, p1[i - 1] + p0[j - 1] - 1.0)
            ceiling = min(1.0, p1[i - 1], p0[j - 1])

            lower_active = BoundTerm.CELL_DIFFERENCE
            if floor >= lower:
                lower = floor
                lower_active = BoundTerm.ZERO if floor == 0.0 else BoundTerm.MARGINAL_CLIP
            upper_active = BoundTerm.CELL_DIFFERENCE
            if ceiling <= upper:
                upper, upper_active = ceiling, BoundTerm.MARGINAL_CLIP
            row.append(
                BoundInterval(
                    lower=float(min(lower, upper)),
                    upper=float(upper),
                    lower_active=lower_active,
                    upper_active=upper_active,
                    y1=float(support1[i - 1]),
                    y0=float(support0[j - 1]),
                )
            )
        cells.append(tuple(row))

    logger.debug("cell table %dx%d for %r vs %r", k1, k0, net1.name, net0.name)
    return DpoCellTable(
        support1=support1,
        support0=support0,
        cells=tuple(cells),
        marginals1=p1,
        marginals0=p0,
        masked1=net1.masked_fraction,
        masked0=net0.masked_fraction,
    )
