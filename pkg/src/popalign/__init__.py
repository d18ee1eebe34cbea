"""Alignment of item popularity with the top singular subspaces of a user-item graph."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    DegreeSummary,
    InteractionMatrix,
    MotifCounts,
    butterfly_count,
    degree_summary,
    remove_columns,
    trace_a4,
    wedge_count,
)
from .spectral import (  # noqa: E402
    AlignmentProfile,
    SpectralDecomposition,
    alignment_profile,
    principal_right_vector,
    svd,
    truncate,
)
