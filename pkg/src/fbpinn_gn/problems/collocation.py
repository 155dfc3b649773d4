"""Collocation and test point sets on [-1, 1]^dim."""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray


class SamplingScheme(str, Enum):
    """How collocation points are placed."""

    UNIFORM_GRID = "uniform_grid"
    RANDOM = "random"


@dataclass(frozen=True)
class CollocationSet:
    """
    Points where residuals are evaluated.

    Attributes:
        points: Array of shape ``(N, dim)``, sorted lexicographically
        scheme: How the points were generated
    """

    points: NDArray[np.float64]
    scheme: SamplingScheme = SamplingScheme.UNIFORM_GRID

    def __post_init__(self) -> None:
        """Validate collocation points."""
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError(f"Collocation points must be a non-empty (N, dim) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("Collocation points must be finite")
        if np.any(np.abs(pts) > 1.0):
            raise ValueError("Collocation points must lie in [-1, 1]^dim")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "scheme", SamplingScheme(self.scheme))

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return self.n_points

    def permuted(self, rng: np.random.Generator) -> "CollocationSet":
        """Same points in a random order."""
        return CollocationSet(self.points[rng.permutation(self.n_points)], self.scheme)


def _counts(dim: int, counts: int | Sequence[int]) -> list[int]:
    if isinstance(counts, (int, np.integer)):
        per_axis = [int(counts)] * dim
    else:
        per_axis = [int(c) for c in counts]
    if len(per_axis) != dim:
        raise ValueError(f"Expected {dim} per-axis counts, got {per_axis}")
    if any(c < 2 for c in per_axis):
        raise ValueError(f"Grid counts must be at least 2 per axis, got {per_axis}")
    return per_axis


def collocation_uniform(dim: int, counts: int | Sequence[int]) -> CollocationSet:
    """
    Equispaced tensor grid including the endpoints.

    Args:
        dim: 1 or 2
        counts: Points per axis (a single int applies to every axis)

    Returns:
        CollocationSet in lexicographic (x-major) order
    """
    if dim not in (1, 2):
        raise ValueError(f"Only 1D and 2D grids are supported, got dim={dim}")
    axes = [np.linspace(-1.0, 1.0, n) for n in _counts(dim, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.reshape(-1) for m in mesh], axis=1)
    return CollocationSet(points, SamplingScheme.UNIFORM_GRID)


def collocation_random(dim: int, n_points: int, rng: np.random.Generator) -> CollocationSet:
    """
    Uniform random points, sorted lexicographically.

    Args:
        dim: 1 or 2
        n_points: Number of points (>= 1)
        rng: Seeded generator

    Returns:
        CollocationSet
    """
    if n_points < 1:
        raise ValueError(f"Point count must be positive, got {n_points}")
    points = rng.uniform(-1.0, 1.0, size=(n_points, dim))
    order = np.lexsort(points.T[::-1])
    return CollocationSet(points[order], SamplingScheme.RANDOM)
