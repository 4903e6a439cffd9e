"""Core identification engine."""

from netdisrupt.core.adjust import (
    adjusted_matrix_bounds,
    adjusted_overlap_bounds,
    reduce,
    svt_denoise,
    svt_threshold,
)
from netdisrupt.core.bounds import (
    PairingMode,
    destroyed_created_bounds,
    dpo_bounds,
    dte_bounds,
    dte_curve,
    frechet_destroyed_created,
    frechet_hoeffding,
    mean_difference,
    overlap_bounds,
    paired_products,
    pmf_cell_bounds,
)
from netdisrupt.core.models import (
    BoundInterval,
    BoundTerm,
    DiagonalPolicy,
    DpoCellTable,
    DteCurve,
    EigenPair,
    MonotoneLift,
    Network,
    PointIdentifiedDte,
    ReductionDecomposition,
    SharpSet,
    Spectrum,
    SteBasis,
    SteField,
)
from netdisrupt.core.netmat import (
    GraphPattern,
    IndicatorSpectra,
    eigen_pairs,
    homomorphism_density,
    spectrum,
    symmetrize_bipartite,
    threshold_indicator,
)
from netdisrupt.core.oracle import (
    orthogonal_relaxation,
    sharp_destroyed_created,
    sharp_overlap_set,
)
from netdisrupt.core.ste import (
    disruption_lower_bound,
    dte_point_identified,
    matrix_lift,
    ste_field,
)

__all__ = [
    "BoundInterval",
    "BoundTerm",
    "DiagonalPolicy",
    "DpoCellTable",
    "DteCurve",
    "EigenPair",
    "GraphPattern",
    "IndicatorSpectra",
    "MonotoneLift",
    "Network",
    "PairingMode",
    "PointIdentifiedDte",
    "ReductionDecomposition",
    "SharpSet",
    "Spectrum",
    "SteBasis",
    "SteField",
    "adjusted_matrix_bounds",
    "adjusted_overlap_bounds",
    "destroyed_created_bounds",
    "disruption_lower_bound",
    "dpo_bounds",
    "dte_bounds",
    "dte_curve",
    "dte_point_identified",
    "eigen_pairs",
    "frechet_destroyed_created",
    "frechet_hoeffding",
    "homomorphism_density",
    "matrix_lift",
    "mean_difference",
    "orthogonal_relaxation",
    "overlap_bounds",
    "paired_products",
    "pmf_cell_bounds",
    "reduce",
    "sharp_destroyed_created",
    "sharp_overlap_set",
    "spectrum",
    "ste_field",
    "svt_denoise",
    "svt_threshold",
    "symmetrize_bipartite",
    "threshold_indicator",
]
