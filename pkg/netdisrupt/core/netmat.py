"""Network operations: thresholding, function-embedding spectra, symmetrization, moments."""

from __future__ import annotations

import logging
import string
import threading
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from netdisrupt.core.models import EigenPair, Network, Spectrum
from netdisrupt.errors import NumericalError, ValidationError

logger = logging.getLogger(__name__)

MAX_PATTERN_VERTICES = 5


def threshold_indicator(net: Network, y: float, strict: bool = False) -> Network:
    """Binary network with 1 where the value is <= y (< y when strict).

    Masked cells stay masked and behave as +inf, so they are never below a finite threshold.
    """
    hits = net.values < y if strict else net.values <= y
    op = "<" if strict else "<="
    return net.with_values((hits & ~net.mask).astype(float), name=f"1{{{net.name} {op} {y:g}}}")


def eigh_checked(matrix: np.ndarray, name: str, eigvals_only: bool):
    try:
        return scipy.linalg.eigh(matrix, eigvals_only=eigvals_only, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed on matrix {name!r}: {exc}") from exc


def spectrum(net: Network, mask_fill: float = 0.0, threshold: float | None = None) -> Spectrum:
    """All eigenvalues of the filled matrix divided by N, sorted descending."""
    eigenvalues = eigh_checked(net.filled(mask_fill), net.name, eigvals_only=True)
    return Spectrum(
        eigenvalues=eigenvalues[::-1] / net.n,
        source_dim=net.n,
        threshold=threshold,
    )


def eigen_pairs(net: Network, mask_fill: float = 0.0) -> EigenPair:
    """Embedded eigenvalues (descending) with sqrt(N)-scaled orthonormal eigenvectors."""
    eigenvalues, vectors = eigh_checked(net.filled(mask_fill), net.name, eigvals_only=False)
    n = net.n
    return EigenPair(
        eigenvalues=eigenvalues[::-1] / n,
        eigenvectors=vectors[:, ::-1] * np.sqrt(n),
    )


def matrix_spectrum(matrix: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Embedded eigenvalues of a raw symmetric array, sorted descending."""
    eigenvalues = eigh_checked(matrix, name, eigvals_only=True)
    return eigenvalues[::-1] / matrix.shape[0]


def symmetrize_bipartite(
    rows: Sequence[str],
    cols: Sequence[str],
    B,
    group: int = 0,
    name: str = "",
) -> Network:
    """Embed a rectangular rows x cols matrix as a symmetric network over both sides.

    Within-side cells are masked: thresholding treats them as +inf and raw-value operations
    fill them with the caller's mask_fill.
    """
    B = np.asarray(B, dtype=float)
    rows, cols = [str(r) for r in rows], [str(c) for c in cols]
    m, n = len(rows), len(cols)
    if B.shape != (m, n):
        raise ValidationError(f"bipartite matrix has shape {B.shape}, expected ({m}, {n})")
    collisions = sorted(set(rows) & set(cols))
    if collisions:
        raise ValidationError(f"labels appear on both sides of the bipartite network: {collisions}")

    values = np.zeros((m + n, m + n))
    values[:m, m:] = B
    values[m:, :m] = B.T
    mask = np.ones((m + n, m + n), dtype=bool)
    mask[:m, m:] = False
    mask[m:, :m] = False
    return Network(labels=tuple(rows + cols), values=values, mask=mask, group=group, name=name)


@dataclass(frozen=True)
class GraphPattern:
    """A small multigraph on vertices 0..n_vertices-1 (loops and repeated edges allowed)."""

    edges: tuple[tuple[int, int], ...]
    n_vertices: int

    @classmethod
    def from_edges(cls, edges: Sequence[tuple[int, int]], n_vertices: int | None = None):
        edges = tuple((int(u), int(v)) for u, v in edges)
        used = max((max(e) for e in edges), default=-1) + 1
        return cls(edges=edges, n_vertices=used if n_vertices is None else n_vertices)


EDGE = GraphPattern.from_edges([(0, 1)])
TWO_STAR = GraphPattern.from_edges([(0, 1), (0, 2)])
TRIANGLE = GraphPattern.from_edges([(0, 1), (1, 2), (2, 0)])
FOUR_CYCLE = GraphPattern.from_edges([(0, 1), (1, 2), (2, 3), (3, 0)])


def homomorphism_density(pattern: GraphPattern, net: Network, mask_fill: float = 0.0) -> float:
    """Average over all vertex maps of the product of mapped cell values along pattern edges."""
    k = pattern.n_vertices
    if k > MAX_PATTERN_VERTICES:
        raise ValidationError(
            f"pattern has {k} vertices; exhaustive evaluation is limited to {MAX_PATTERN_VERTICES}"
        )
    n = net.n
    if not pattern.edges:
        return 1.0

    letters = string.ascii_lowercase
    subscripts = ",".join(letters[u] + letters[v] for u, v in pattern.edges)
    matrix = net.filled(mask_fill)
    has_loop = any(u == v for u, v in pattern.edges)
    total = np.einsum(
        subscripts + "->", *([matrix] * len(pattern.edges)), optimize=not has_loop
    )
    # vertices touched by no edge each contribute a free sum over N agents
    isolated = k - len({v for e in pattern.edges for v in e})
    return float(total) * n**isolated / n**k


class IndicatorSpectra:
    """Thread-safe memo of indicator spectra keyed by (network, canonical threshold).

    Thresholds are snapped to the largest support value not above them, so every threshold
    producing the same indicator matrix shares one entry. Only spectra are kept; the indicator
    matrix itself is rebuilt by ``matrix``. An optional denoiser is applied to the indicator
    before decomposition.
    """

    def __init__(self, denoise: Callable[[Network], Network] | None = None):
        self.denoise = denoise
        self._entries: dict[tuple, Spectrum] = {}
        self._lock = threading.Lock()

    def _key(self, net: Network, y: float, strict: bool) -> tuple:
        support = net.support()
        side = "left" if strict else "right"
        return (net.fingerprint, int(np.searchsorted(support, y, side=side)))

    def _indicator(self, net: Network, y: float, strict: bool) -> Network:
        indicator = threshold_indicator(net, y, strict=strict)
        if self.denoise is not None:
            indicator = self.denoise(indicator)
        return indicator

    def matrix(self, net: Network, y: float, strict: bool = False) -> np.ndarray:
        """Indicator matrix after denoising, with masked cells set to 0. Not cached."""
        return self._indicator(net, y, strict).filled(0.0)

    def spectrum(self, net: Network, y: float, strict: bool = False) -> Spectrum:
        """Embedded spectrum of the (denoised) indicator matrix."""
        key = self._key(net, y, strict)
        with self._lock:
            hit = self._entries.get(key)
        if hit is not None:
            return hit
        indicator = self._indicator(net, y, strict)
        built = Spectrum(
            eigenvalues=matrix_spectrum(indicator.filled(0.0), indicator.name),
            source_dim=net.n,
            threshold=y,
            strict=strict,
        )
        with self._lock:
            return self._entries.setdefault(key, built)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def __bool__(self) -> bool:
        return True
