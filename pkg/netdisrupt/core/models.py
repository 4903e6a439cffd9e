"""Data models for networks, spectra, and identification results."""

from __future__ import annotations

import hashlib
from collections.abc import Callable
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import interp1d

from netdisrupt.errors import ValidationError


def _frozen(array, dtype=float) -> np.ndarray:
    """Copy an array-like and make the copy read-only."""
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


class DiagonalPolicy(str, Enum):
    """How self-dyads were treated at ingestion."""

    ZERO = "zero"  # self-dyads stored as 0
    KEEP = "keep"  # self-dyads kept at their recorded value


class BoundTerm(str, Enum):
    """Which term of a bound formula was binding."""

    # overlap lower terms
    SUM_MINUS_ONE = "sum_minus_one"
    ANTI_PAIRED = "anti_paired"
    ZERO = "zero"
    # overlap upper terms
    MARGINAL1 = "marginal1"
    MARGINAL0 = "marginal0"
    CO_PAIRED = "co_paired"
    # effect-distribution terms
    MARGINAL_GAP = "marginal_gap"
    CO_GAP = "co_gap"
    ONE = "one"
    # Refinements
    REDUCTION = "reduction"
    CELL_DIFFERENCE = "cell_difference"
    MARGINAL_CLIP = "marginal_clip"


class SteBasis(str, Enum):
    """Basis used to express spectral treatment effects."""

    TREATED = "treated"  # STT
    UNTREATED = "untreated"  # STU
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class Network:
    """A symmetric matrix of dyadic outcomes over labeled agents.

    Masked cells are structurally excluded dyads (for example the within-side blocks of a
    symmetrized bipartite network). They store 0 and never enter integrals or counts.
    """

    labels: tuple[str, ...]
    values: np.ndarray
    mask: np.ndarray | None = None
    group: int = 0
    diagonal_policy: DiagonalPolicy = DiagonalPolicy.ZERO
    name: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValidationError(
                f"network {self.name!r}: values must be a square matrix, got shape {values.shape}"
            )
        n = values.shape[0]
        if n < 2:
            raise ValidationError(f"network {self.name!r}: dimension must be at least 2, got {n}")

        labels = tuple(str(label) for label in self.labels)
        if len(labels) != n:
            raise ValidationError(
                f"network {self.name!r}: {len(labels)} labels for a {n}x{n} matrix"
            )
        if len(set(labels)) != n:
            seen: set[str] = set()
            dupes = sorted({label for label in labels if label in seen or seen.add(label)})
            raise ValidationError(f"network {self.name!r}: duplicate labels {dupes}")

        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            i, j = bad[0]
            kind = "NaN" if np.isnan(values[i, j]) else "infinite"
            raise ValidationError(f"network {self.name!r}: {kind} entry at ({i}, {j})")

        if self.mask is None:
            mask = np.zeros((n, n), dtype=bool)
        else:
            mask = np.array(self.mask, dtype=bool)
            if mask.shape != (n, n):
                raise ValidationError(
                    f"network {self.name!r}: mask shape {mask.shape} does not match ({n}, {n})"
                )
            if not np.array_equal(mask, mask.T):
                i, j = np.argwhere(mask != mask.T)[0]
                raise ValidationError(f"network {self.name!r}: mask is asymmetric at ({i}, {j})")

        values = np.where(mask, 0.0, values)
        asym = np.argwhere(values != values.T)
        if asym.size:
            i, j = asym[0]
            raise ValidationError(
                f"network {self.name!r}: asymmetric at ({i}, {j}): "
                f"{values[i, j]!r} != {values[j, i]!r} ({len(asym) // 2} offending pairs)"
            )
        if self.group not in (0, 1):
            raise ValidationError(f"network {self.name!r}: group must be 0 or 1, got {self.group}")

        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "mask", _frozen(mask, dtype=bool))
        object.__setattr__(self, "diagonal_policy", DiagonalPolicy(self.diagonal_policy))

    @property
    def n(self) -> int:
        """Number of agents."""
        return self.values.shape[0]

    @cached_property
    def fingerprint(self) -> str:
        """Content hash of values and mask, used as a cache key."""
        digest = hashlib.sha1()
        digest.update(np.asarray(self.values.shape, dtype=np.int64).tobytes())
        digest.update(np.ascontiguousarray(self.values).tobytes())
        digest.update(np.packbits(self.mask).tobytes())
        return digest.hexdigest()

    @property
    def has_mask(self) -> bool:
        return bool(self.mask.any())

    @property
    def masked_fraction(self) -> float:
        """Fraction of the N² cells that are structurally excluded."""
        return float(self.mask.mean())

    def filled(self, mask_fill: float = 0.0) -> np.ndarray:
        """Writable copy of the values with masked cells set to ``mask_fill``."""
        return np.where(self.mask, mask_fill, self.values)

    def unmasked_values(self) -> np.ndarray:
        """Flat array of the values of unmasked cells."""
        return self.values[~self.mask]

    def support(self) -> np.ndarray:
        """Sorted distinct values over unmasked cells."""
        return np.unique(self.unmasked_values())

    def is_binary(self) -> bool:
        return bool(np.isin(self.unmasked_values(), (0.0, 1.0)).all())

    def fraction_at_most(self, y: float, strict: bool = False) -> float:
        """Fraction of the N² cells with value <= y (or < y); masked cells never count."""
        hits = self.values < y if strict else self.values <= y
        return float(np.count_nonzero(hits & ~self.mask)) / self.n**2

    def relabel(self, perm) -> Network:
        """Reorder agents so that new position i holds old agent perm[i]."""
        perm = np.asarray(perm)
        return replace(
            self,
            labels=tuple(self.labels[k] for k in perm),
            values=self.values[np.ix_(perm, perm)],
            mask=self.mask[np.ix_(perm, perm)],
        )

    def with_values(self, values, name: str | None = None, keep_mask: bool = True) -> Network:
        """Copy with new values over the same agents."""
        return replace(
            self,
            values=values,
            mask=self.mask if keep_mask else None,
            name=self.name if name is None else name,
        )

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        data = {
            "name": self.name,
            "labels": list(self.labels),
            "matrix": self.values.tolist(),
            "group": self.group,
            "diagonal_policy": self.diagonal_policy.value,
        }
        if self.has_mask:
            data["mask"] = self.mask.astype(int).tolist()
        return data


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of a function embedding, sorted descending (matrix eigenvalues / N)."""

    eigenvalues: np.ndarray
    source_dim: int
    threshold: float | None = None
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def sum_of_squares(self) -> float:
        return float(np.dot(self.eigenvalues, self.eigenvalues))

    def to_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "source_dim": self.source_dim,
            "threshold": self.threshold,
            "strict": self.strict,
        }


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Embedded eigenvalues with eigenvectors scaled by sqrt(N) (unit L2 eigenfunctions)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _frozen(self.eigenvectors))

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def unit_vectors(self) -> np.ndarray:
        """Orthonormal columns (the eigenvectors without the embedding scale)."""
        return self.eigenvectors / np.sqrt(self.dim)

    def reconstruct(self) -> np.ndarray:
        """Sum of lambda_r phi_r phi_r^T, i.e. the embedded function on the N x N cells."""
        phi = self.eigenvectors
        return (phi * self.eigenvalues) @ phi.T


@dataclass(frozen=True)
class BoundInterval:
    """A lower/upper pair recording which relaxation term was binding on each side."""

    lower: float
    upper: float
    lower_active: BoundTerm
    upper_active: BoundTerm
    y1: float | None = None
    y0: float | None = None
    lower_at: tuple[float, float] | None = None  # (y1, y0) attaining a sup
    upper_at: tuple[float, float] | None = None  # (y1, y0) attaining an inf

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def intersect(self, other: BoundInterval) -> BoundInterval:
        """Intersection, keeping the binding term of whichever side is tighter."""
        lower, lower_active = (
            (other.lower, other.lower_active)
            if other.lower > self.lower
            else (self.lower, self.lower_active)
        )
        upper, upper_active = (
            (other.upper, other.upper_active)
            if other.upper < self.upper
            else (self.upper, self.upper_active)
        )
        return replace(
            self,
            lower=min(lower, upper),
            upper=upper,
            lower_active=lower_active,
            upper_active=upper_active,
        )

    def as_pair_counts(self, n: int) -> tuple[float, float]:
        """Convert fractions of ordered dyads into counts of unordered pairs."""
        scale = n * n / 2.0
        return self.lower * scale, self.upper * scale

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        data = {
            "y1": self.y1,
            "y0": self.y0,
            "lower": self.lower,
            "upper": self.upper,
            "lower_active": self.lower_active.value,
            "upper_active": self.upper_active.value,
        }
        if self.lower_at is not None:
            data["lower_at"] = list(self.lower_at)
        if self.upper_at is not None:
            data["upper_at"] = list(self.upper_at)
        return data


@dataclass(frozen=True, eq=False)
class DteCurve:
    """Pointwise bounds on the distribution of treatment effects over a grid."""

    grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        for name in ("grid", "lower", "upper"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.grid.tolist(), self.lower.tolist(), self.upper.tolist(), strict=True))

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
        }


@dataclass(frozen=True, eq=False)
class DpoCellTable:
    """Bounds on P(Y1 = a, Y0 = b) for every pair of support values."""

    support1: np.ndarray
    support0: np.ndarray
    cells: tuple[tuple[BoundInterval, ...], ...]
    marginals1: np.ndarray
    marginals0: np.ndarray
    masked1: float = 0.0
    masked0: float = 0.0

    def __post_init__(self):
        for name in ("support1", "support0", "marginals1", "marginals0"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def cell(self, a: float, b: float) -> BoundInterval:
        i = int(np.flatnonzero(self.support1 == a)[0])
        j = int(np.flatnonzero(self.support0 == b)[0])
        return self.cells[i][j]

    def lower_matrix(self) -> np.ndarray:
        return np.array([[c.lower for c in row] for row in self.cells])

    def upper_matrix(self) -> np.ndarray:
        return np.array([[c.upper for c in row] for row in self.cells])

    def altered_fraction(self) -> tuple[float, float]:
        """Bounds on the mass of dyads whose outcome differs between arms."""
        off = self.support1[:, None] != self.support0[None, :]
        lower = float(self.lower_matrix()[off].sum())
        upper = float(self.upper_matrix()[off].sum())
        return min(lower, 1.0), min(upper, 1.0)

    def to_dict(self) -> dict:
        return {
            "support1": self.support1.tolist(),
            "support0": self.support0.tolist(),
            "marginals1": self.marginals1.tolist(),
            "marginals0": self.marginals0.tolist(),
            "masked1": self.masked1,
            "masked0": self.masked0,
            "cells": [[c.to_dict() for c in row] for row in self.cells],
        }


@dataclass(frozen=True, eq=False)
class SteField:
    """Spectral treatment effects on the N x N cells of the basis network."""

    basis: SteBasis
    values: np.ndarray
    eigengap: np.ndarray  # sigma_r1 - sigma_r0 after padding and sorting
    degenerate: bool = False
    dropped_terms: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "eigengap", _frozen(self.eigengap))

    def l2_squared(self) -> float:
        """Integral of STE^2 over the unit square."""
        n = self.values.shape[0]
        return float(np.sum(self.values**2)) / n**2

    def entries(self) -> np.ndarray:
        return self.values.ravel()


@dataclass(frozen=True, eq=False)
class PointIdentifiedDte:
    """DTE under matrix rank invariance, with the STT/STU agreement diagnostic."""

    basis: SteBasis
    curve: DteCurve
    stt_cdf: np.ndarray
    stu_cdf: np.ndarray
    sup_distance: float

    def to_dict(self) -> dict:
        return {
            "basis": self.basis.value,
            "grid": self.curve.grid.tolist(),
            "cdf": self.curve.lower.tolist(),
            "stt_cdf": self.stt_cdf.tolist(),
            "stu_cdf": self.stu_cdf.tolist(),
            "sup_distance": self.sup_distance,
        }


@dataclass(frozen=True, eq=False)
class MonotoneLift:
    """A scalar nondecreasing function, as a piecewise-linear table or polynomial coefficients."""

    knots_x: np.ndarray | None = None
    knots_y: np.ndarray | None = None
    coefficients: np.ndarray | None = None

    def __post_init__(self):
        table = self.knots_x is not None or self.knots_y is not None
        poly = self.coefficients is not None
        if table == poly:
            raise ValidationError(
                "a lift needs exactly one of a knot table or polynomial coefficients"
            )
        if poly:
            object.__setattr__(self, "coefficients", _frozen(self.coefficients))
            return
        xs, ys = _frozen(self.knots_x), _frozen(self.knots_y)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size == 0:
            raise ValidationError("knot table needs two equal-length, non-empty 1-D arrays")
        if np.any(np.diff(xs) <= 0):
            raise ValidationError("knot x values must be strictly increasing")
        object.__setattr__(self, "knots_x", xs)
        object.__setattr__(self, "knots_y", ys)

    @classmethod
    def piecewise_linear(cls, xs, ys) -> MonotoneLift:
        return cls(knots_x=xs, knots_y=ys)

    @classmethod
    def polynomial(cls, coefficients) -> MonotoneLift:
        """Coefficients in increasing degree: c0 + c1 x + c2 x^2 + ..."""
        return cls(coefficients=coefficients)

    @classmethod
    def identity(cls) -> MonotoneLift:
        return cls.polynomial([0.0, 1.0])

    @classmethod
    def scaling(cls, factor: float) -> MonotoneLift:
        return cls.polynomial([0.0, factor])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.coefficients is not None:
            return Polynomial(self.coefficients)(x)
        if self.knots_x.size == 1:
            return np.full_like(x, self.knots_y[0])
        line = interp1d(
            self.knots_x, self.knots_y, kind="linear", fill_value="extrapolate", assume_sorted=True
        )
        return line(x)

    def is_nondecreasing_on(self, lo: float, hi: float, tol: float = 1e-12) -> bool:
        """Exact check that the function does not decrease anywhere on [lo, hi]."""
        if hi <= lo:
            return True
        if self.coefficients is not None:
            slope = Polynomial(self.coefficients).deriv()
            roots = slope.roots() if slope.degree() > 0 else np.array([])
            roots = roots[np.isreal(roots)].real
            points = np.unique(np.concatenate([[lo, hi], [r for r in roots if lo < r < hi]]))
            mids = (points[:-1] + points[1:]) / 2
            return bool(np.all(slope(mids) >= -tol))
        inner = self.knots_x[(self.knots_x > lo) & (self.knots_x < hi)]
        points = np.concatenate([[lo], inner, [hi]])
        return bool(np.all(np.diff(self(points)) >= -tol))


@dataclass(frozen=True, eq=False)
class SharpSet:
    """Achievable values of a statistic over all agent matchings, with witnesses."""

    values: np.ndarray
    counts: np.ndarray
    argmin_perm: tuple[int, ...]
    argmax_perm: tuple[int, ...]
    n_permutations: int = 0

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValidationError("a sharp set cannot be empty")
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "counts", _frozen(self.counts, dtype=np.int64))

    @property
    def min(self) -> float:
        return float(self.values[0])

    @property
    def max(self) -> float:
        return float(self.values[-1])

    def verify(self, statistic: Callable[[tuple[int, ...]], float], tol: float = 1e-12) -> bool:
        """Recompute the statistic at both witnesses and compare with min and max."""
        return (
            abs(statistic(self.argmin_perm) - self.min) <= tol
            and abs(statistic(self.argmax_perm) - self.max) <= tol
        )

    def to_dict(self, full: bool = True) -> dict:
        data = {
            "min": self.min,
            "max": self.max,
            "argmin_perm": list(self.argmin_perm),
            "argmax_perm": list(self.argmax_perm),
            "n_permutations": self.n_permutations,
        }
        if full:
            data["values"] = self.values.tolist()
            data["counts"] = self.counts.tolist()
        return data


@dataclass(frozen=True, eq=False)
class ReductionDecomposition:
    """A symmetric matrix split into row offsets plus a zero-row-sum residual."""

    residual: Network
    row_offsets: np.ndarray
    grand_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "row_offsets", _frozen(self.row_offsets))

    def reconstruct(self) -> np.ndarray:
        r = self.row_offsets
        return self.residual.values + r[:, None] + r[None, :] + self.grand_offset
