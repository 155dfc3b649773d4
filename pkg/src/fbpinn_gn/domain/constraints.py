"""Hard boundary-constraint operators.

The constrained field is ``c(x) * u(x)``: ``c`` vanishes where the
boundary data is zero, so the boundary loss drops out of the objective.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from fbpinn_gn.autodiff.jet import Jet2, mul, powi, scale, tanh


class ConstraintKind(str, Enum):
    """Available constraint factors."""

    TANH_SCALED = "tanh_scaled"  # c(x) = tanh(kappa * pi * x), pins u(0) = 0
    PRODUCT_BUBBLE = "product_bubble"  # c(x) = prod_i (1 - x_i^2), zero on the box boundary


@dataclass(frozen=True)
class ConstraintOp:
    """
    Multiplicative constraint factor ``c``.

    Attributes:
        kind: Which factor
        kappa: Frequency multiplier for ``TANH_SCALED``
    """

    kind: ConstraintKind
    kappa: float = 16.0

    def __post_init__(self) -> None:
        """Validate constraint."""
        object.__setattr__(self, "kind", ConstraintKind(self.kind))
        if self.kind is ConstraintKind.TANH_SCALED and self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    @classmethod
    def tanh_scaled(cls, kappa: float = 16.0) -> "ConstraintOp":
        return cls(ConstraintKind.TANH_SCALED, kappa)

    @classmethod
    def product_bubble(cls) -> "ConstraintOp":
        return cls(ConstraintKind.PRODUCT_BUBBLE)

    def factor(self, coords: Sequence[Jet2]) -> Jet2:
        """
        Evaluate ``c`` on coordinate jets.

        Args:
            coords: One jet per axis

        Returns:
            Jet of ``c(x)``
        """
        if self.kind is ConstraintKind.TANH_SCALED:
            if len(coords) != 1:
                raise ValueError(f"tanh_scaled constraint is one-dimensional, got {len(coords)} coordinates")
            return tanh(scale(coords[0], self.kappa * np.pi))

        bubble = 1.0 - powi(coords[0], 2)
        for x in coords[1:]:
            bubble = mul(bubble, 1.0 - powi(x, 2))
        return bubble

    def apply(self, coords: Sequence[Jet2], u: Jet2) -> Jet2:
        """Constrained field ``c(x) * u`` with full jet arithmetic."""
        return mul(self.factor(coords), u)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {"kind": self.kind.value, "kappa": self.kappa}


def constraint_apply(c: ConstraintOp, coords: Sequence[Jet2], u: Jet2) -> Jet2:
    """Apply constraint ``c`` at ``coords`` to the field jet ``u``."""
    return c.apply(coords, u)
