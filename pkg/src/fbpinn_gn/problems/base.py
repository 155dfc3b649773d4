"""Boundary-value problem interface.

Every problem is a linear differential operator plus a forcing term,
``r(x) = L(ũ)(x) - f(x)``, posed on [-1, 1]^dim with a hard constraint.
``L`` only ever sees field jets, one per seeded axis, so the same code
evaluates residuals of the field and (through linearity) of its parameter
tangents.
"""

from abc import ABC, abstractmethod
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.autodiff.jet import Jet2, Real, jet_const, jet_var
from fbpinn_gn.domain.constraints import ConstraintOp


def seed_coordinates(points: NDArray[np.float64], axis: int) -> list[Jet2]:
    """
    Coordinate jets for a directional pass.

    Args:
        points: Array of shape ``(N, dim)``
        axis: Coordinate to differentiate along

    Returns:
        One jet per coordinate: ``jet_var`` along ``axis``, ``jet_const`` elsewhere
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return [
        jet_var(pts[:, d]) if d == axis else jet_const(pts[:, d]) for d in range(pts.shape[1])
    ]


class Problem(ABC):
    """
    Boundary-value problem on [-1, 1]^dim.

    Attributes:
        name: Registry name
        dim: Spatial dimension
        constraint: Hard constraint operator
        axes: Axes whose directional jets the operator needs, in the order
            ``operator`` receives them
    """

    name: str
    dim: int
    constraint: ConstraintOp
    axes: tuple[int, ...]

    @abstractmethod
    def exact(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Exact solution at points of shape ``(N, dim)``."""

    @abstractmethod
    def exact_jet(self, coords: Sequence[Jet2]) -> Jet2:
        """Exact solution on coordinate jets."""

    @abstractmethod
    def forcing(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Forcing term ``f`` at points of shape ``(N, dim)``."""

    @abstractmethod
    def operator(self, field_jets: Sequence[Jet2]) -> Real:
        """Linear operator ``L`` applied to field jets (one per entry of ``axes``)."""

    @property
    def domain(self) -> list[tuple[float, float]]:
        return [(-1.0, 1.0)] * self.dim

    def residual(self, points: NDArray[np.float64], field_jets: Sequence[Jet2]) -> NDArray[np.float64]:
        """
        Residual ``L(ũ) - f`` at each point.

        Args:
            points: Array of shape ``(N, dim)``
            field_jets: Constrained-field jets, one per entry of ``axes``

        Returns:
            Residuals of shape ``(N,)``
        """
        pts = self._points(points)
        return np.asarray(self.operator(field_jets), dtype=np.float64) - self.forcing(pts)

    def exact_residual(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Residual of the exact solution, computed through the jet machinery."""
        pts = self._points(points)
        jets = [self.exact_jet(seed_coordinates(pts, axis)) for axis in self.axes]
        return self.residual(pts, jets)

    def _points(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        pts = np.asarray(points, dtype=np.float64)
        if self.dim == 1 and pts.ndim == 1:
            pts = pts[:, None]
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.dim:
            raise ValueError(f"Problem {self.name!r} expects {self.dim}D points, got shape {pts.shape}")
        return pts

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {"name": self.name, "dim": self.dim, "constraint": self.constraint.to_dict()}

    def __repr__(self) -> str:
        """Detailed representation."""
        return f"{type(self).__name__}(name={self.name!r}, dim={self.dim})"
