"""Residual rows, block-structured residual Jacobians and parameter layouts."""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray


@dataclass(frozen=True)
class ParameterLayout:
    """
    Concatenated parameter blocks ``θ = (θ_1, ..., θ_K)``.

    Attributes:
        sizes: Parameter count of each block
    """

    sizes: tuple[int, ...]
    offsets: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        """Validate layout and derive the prefix-sum offsets."""
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s <= 0 for s in sizes):
            raise ValueError(f"Block sizes must be positive, got {list(sizes)}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "offsets", tuple(int(o) for o in np.concatenate([[0], np.cumsum(sizes)])))

    @classmethod
    def uniform(cls, n_blocks: int, block_size: int) -> "ParameterLayout":
        return cls((block_size,) * n_blocks)

    @property
    def n_blocks(self) -> int:
        return len(self.sizes)

    @property
    def n_params(self) -> int:
        return self.offsets[-1]

    def block_slice(self, k: int) -> slice:
        """Global index range of block ``k``."""
        return slice(self.offsets[k], self.offsets[k + 1])

    def owners(self, indices: NDArray[np.intp] | Sequence[int]) -> NDArray[np.intp]:
        """Block owning each global parameter index."""
        idx = np.asarray(indices, dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_params):
            raise IndexError(f"Parameter index out of range for P={self.n_params}")
        return np.searchsorted(np.asarray(self.offsets[1:]), idx, side="right")


@dataclass(frozen=True)
class ResidualRow:
    """
    One collocation point's residual and its sparse parameter gradient.

    Attributes:
        point: Spatial coordinates
        value: Residual ``r_i``
        indices: Global parameter indices of the stored gradient entries (sorted)
        grad: ``∂r_i/∂θ_j`` for each stored index
    """

    point: NDArray[np.float64]
    value: float
    indices: NDArray[np.intp]
    grad: NDArray[np.float64]

    def __post_init__(self) -> None:
        """Validate row."""
        if len(self.indices) != len(self.grad):
            raise ValueError("Row indices and gradient entries must have the same length")

    def blocks(self, layout: ParameterLayout) -> list[int]:
        """Parameter blocks touched by this row."""
        return sorted({int(k) for k in layout.owners(self.indices)})

    def dense_grad(self, n_params: int) -> NDArray[np.float64]:
        """Scatter the gradient into a dense vector."""
        out = np.zeros(n_params)
        out[self.indices] = self.grad
        return out


@dataclass(frozen=True)
class JacobianBlock:
    """
    Residual Jacobian restricted to one parameter block.

    Attributes:
        block: Block (subdomain) index
        rows: Collocation indices whose residual depends on this block
        values: Array of shape ``(len(rows), P_block)``
    """

    block: int
    rows: NDArray[np.intp]
    values: NDArray[np.float64]


@dataclass
class ResidualJacobian:
    """
    Residual vector and its Jacobian stored per parameter block.

    Row ``i`` of the full Jacobian is nonzero only in blocks that list ``i``
    in their ``rows``; entries are the unscaled ``∂r_i/∂θ_j``.
    """

    points: NDArray[np.float64]
    residuals: NDArray[np.float64]
    layout: ParameterLayout
    blocks: list[JacobianBlock]

    @property
    def n_points(self) -> int:
        return int(self.residuals.shape[0])

    def loss(self) -> float:
        """Mean squared residual."""
        return float(np.mean(self.residuals**2))

    def gradient(self) -> NDArray[np.float64]:
        """Loss gradient ``(2/N) Σ_i r_i ∇r_i`` as a dense vector."""
        grad = np.zeros(self.layout.n_params)
        for block in self.blocks:
            grad[self.layout.block_slice(block.block)] += block.values.T @ self.residuals[block.rows]
        return grad * (2.0 / self.n_points)

    def membership(self) -> NDArray[np.bool_]:
        """Boolean ``(N, K)`` mask of which blocks each row touches."""
        member = np.zeros((self.n_points, self.layout.n_blocks), dtype=bool)
        for block in self.blocks:
            member[block.rows, block.block] = True
        return member

    def dense(self) -> NDArray[np.float64]:
        """Full ``(N, P)`` residual Jacobian."""
        out = np.zeros((self.n_points, self.layout.n_params))
        for block in self.blocks:
            sl = self.layout.block_slice(block.block)
            out[block.rows, sl] = block.values
        return out

    def rows(self) -> list[ResidualRow]:
        """Per-point residual rows with sparse gradients."""
        per_row_idx: list[list[NDArray[np.intp]]] = [[] for _ in range(self.n_points)]
        per_row_val: list[list[NDArray[np.float64]]] = [[] for _ in range(self.n_points)]
        for block in sorted(self.blocks, key=lambda b: b.block):
            sl = self.layout.block_slice(block.block)
            cols = np.arange(sl.start, sl.stop)
            for local, i in enumerate(block.rows):
                per_row_idx[i].append(cols)
                per_row_val[i].append(block.values[local])

        rows = []
        for i in range(self.n_points):
            indices = np.concatenate(per_row_idx[i]) if per_row_idx[i] else np.zeros(0, dtype=np.intp)
            grad = np.concatenate(per_row_val[i]) if per_row_val[i] else np.zeros(0)
            rows.append(ResidualRow(self.points[i], float(self.residuals[i]), indices, grad))
        return rows

    @classmethod
    def from_rows(cls, rows: Sequence[ResidualRow], layout: ParameterLayout) -> "ResidualJacobian":
        """
        Regroup residual rows into per-block form.

        Entries of a row falling in block ``k`` become that row's slice of
        ``values`` for block ``k``; missing entries inside a touched block are zero.
        """
        if not rows:
            raise ValueError("At least one residual row is required")
        points = np.stack([np.atleast_1d(np.asarray(r.point, dtype=np.float64)) for r in rows])
        residuals = np.array([r.value for r in rows], dtype=np.float64)

        block_rows: dict[int, list[int]] = {}
        block_vals: dict[int, list[NDArray[np.float64]]] = {}
        for i, row in enumerate(rows):
            owners = layout.owners(row.indices)
            for k in np.unique(owners):
                sl = layout.block_slice(int(k))
                local = np.zeros(layout.sizes[int(k)])
                sel = owners == k
                local[np.asarray(row.indices)[sel] - sl.start] = np.asarray(row.grad)[sel]
                block_rows.setdefault(int(k), []).append(i)
                block_vals.setdefault(int(k), []).append(local)

        blocks = [
            JacobianBlock(k, np.asarray(block_rows[k], dtype=np.intp), np.stack(block_vals[k]))
            for k in sorted(block_rows)
        ]
        return cls(points, residuals, layout, blocks)
