"""Exact small-instance identified sets by exhaustive search over agent matchings."""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from netdisrupt.core.bounds import PairingMode, link_indicators, paired_products
from netdisrupt.core.models import Network, SharpSet
from netdisrupt.core.netmat import matrix_spectrum, threshold_indicator
from netdisrupt.errors import ValidationError

logger = logging.getLogger(__name__)

MAX_ORACLE_SIZE = 10
FULL_SET_LIMIT = 8  # the CLI prints every value only up to this size
_CHUNK = 5040  # 7! permutations per vectorized batch


def nth_permutation(n: int, k: int) -> tuple[int, ...]:
    """The k-th permutation of range(n) in lexicographic order."""
    if not 0 <= k < math.factorial(n):
        raise ValidationError(f"permutation index {k} out of range for n={n}")
    pool = list(range(n))
    out = []
    for position in range(n - 1, -1, -1):
        index, k = divmod(k, math.factorial(position))
        out.append(pool.pop(index))
    return tuple(out)


def overlap_at(x1: np.ndarray, x0: np.ndarray, perm) -> float:
    """sum_ij x1[perm[i], perm[j]] * x0[i, j]."""
    perm = np.asarray(perm)
    return float(np.sum(x1[np.ix_(perm, perm)] * x0))


def _coset_overlaps(x1: np.ndarray, x0: np.ndarray, first: int) -> np.ndarray:
    n = x1.shape[0]
    rest = [k for k in range(n) if k != first]
    perms = itertools.permutations(rest)
    out = []
    while True:
        batch = list(itertools.islice(perms, _CHUNK))
        if not batch:
            break
        p = np.empty((len(batch), n), dtype=np.intp)
        p[:, 0] = first
        p[:, 1:] = batch
        permuted = x1[p[:, :, None], p[:, None, :]]
        out.append(np.einsum("kij,ij->k", permuted, x0))
    return np.concatenate(out) if out else np.empty(0)


def permutation_overlaps(x1: np.ndarray, x0: np.ndarray, workers: int | None = None) -> np.ndarray:
    """The overlap sum for every permutation of range(n), in lexicographic order.

    Permutations sharing a first element form a contiguous block, so each block is
    evaluated on its own worker and the blocks are concatenated in order.
    """
    x1, x0 = np.asarray(x1, dtype=float), np.asarray(x0, dtype=float)
    n = x1.shape[0]
    if x1.shape != x0.shape or x1.shape != (n, n):
        raise ValidationError(
            f"oracle needs two square matrices of equal size, got {x1.shape} and {x0.shape}"
        )
    if n > MAX_ORACLE_SIZE:
        raise ValidationError(
            f"oracle enumerates n! matchings and is limited to n <= {MAX_ORACLE_SIZE}, got {n}"
        )

    with ThreadPoolExecutor(max_workers=workers) as pool:
        blocks = list(pool.map(lambda first: _coset_overlaps(x1, x0, first), range(n)))
    return np.concatenate(blocks)


def _check_pair(net1: Network, net0: Network) -> None:
    if net1.n != net0.n:
        raise ValidationError(
            f"oracle needs equal group sizes, got {net1.n} and {net0.n}; "
            "use the spectral bounds instead"
        )
    if net1.n > MAX_ORACLE_SIZE:
        raise ValidationError(f"oracle is limited to n <= {MAX_ORACLE_SIZE}, got {net1.n}")


def sharp_set(
    x1: np.ndarray, x0: np.ndarray, scale: float = 1.0, workers: int | None = None
) -> SharpSet:
    """Distinct values of scale * overlap over all permutations, with first-in-order witnesses."""
    sums = permutation_overlaps(x1, x0, workers)
    values, first_index, counts = np.unique(sums, return_index=True, return_counts=True)
    n = np.asarray(x1).shape[0]
    return SharpSet(
        values=values * scale,
        counts=counts,
        argmin_perm=nth_permutation(n, int(first_index[0])),
        argmax_perm=nth_permutation(n, int(first_index[-1])),
        n_permutations=sums.size,
    )


def sharp_overlap_set(
    net1: Network, net0: Network, y1: float, y0: float, workers: int | None = None
) -> SharpSet:
    """All achievable values of P(Y1 <= y1, Y0 <= y0) over matchings of agents."""
    _check_pair(net1, net0)
    x1 = threshold_indicator(net1, y1).filled(0.0)
    x0 = threshold_indicator(net0, y0).filled(0.0)
    result = sharp_set(x1, x0, scale=1.0 / net1.n**2, workers=workers)
    logger.debug("sharp overlap set at (%g, %g): %d values", y1, y0, len(result.values))
    return result


def orthogonal_relaxation(
    net1: Network, net0: Network, y1: float, y0: float
) -> tuple[float, float]:
    """(anti-paired, co-paired) products of the indicator spectra, valid for any sizes."""
    s1 = matrix_spectrum(threshold_indicator(net1, y1).filled(0.0), net1.name)
    s0 = matrix_spectrum(threshold_indicator(net0, y0).filled(0.0), net0.name)
    return paired_products(s1, s0, PairingMode.ANTI), paired_products(s1, s0, PairingMode.CO)


def link_change_matrices(net1: Network, net0: Network) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Destroyed/created indicator pairs with self-dyads removed."""
    pairs = {}
    for name, (x1, x0) in link_indicators(net1, net0).items():
        x1, x0 = x1.copy(), x0.copy()
        np.fill_diagonal(x1, 0.0)
        np.fill_diagonal(x0, 0.0)
        pairs[name] = (x1, x0)
    return pairs


def sharp_destroyed_created(
    net1: Network, net0: Network, workers: int | None = None
) -> tuple[SharpSet, SharpSet]:
    """Achievable numbers of destroyed and created links (unordered pairs) over all matchings."""
    _check_pair(net1, net0)
    pairs = link_change_matrices(net1, net0)
    destroyed = sharp_set(*pairs["destroyed"], scale=0.5, workers=workers)
    created = sharp_set(*pairs["created"], scale=0.5, workers=workers)
    return destroyed, created
