"""Domain decompositions and boundary constraints."""

from fbpinn_gn.domain.constraints import ConstraintKind, ConstraintOp, constraint_apply
from fbpinn_gn.domain.decomposition import (
    Decomposition,
    Decomposition1D,
    Decomposition2D,
    DecompositionError,
)

__all__ = [
    "ConstraintKind",
    "ConstraintOp",
    "Decomposition",
    "Decomposition1D",
    "Decomposition2D",
    "DecompositionError",
    "constraint_apply",
]
