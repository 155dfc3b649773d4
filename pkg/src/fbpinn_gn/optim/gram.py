"""Block-sparse Gram matrices ``G = Jᵀ J`` over the subdomain adjacency graph.

A residual row only touches the parameter blocks of the subdomains that
cover its point, so ``G_kl`` can be nonzero only when subdomains ``k`` and
``l`` overlap. Only the upper-triangular blocks ``k <= l`` of overlapping
pairs are stored; the lower triangle is implied by symmetry.
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.models.residuals import ParameterLayout, ResidualJacobian, ResidualRow

NONZERO_THRESHOLD = 1e-14


class GramAssemblyError(RuntimeError):
    """Raised when residual rows do not respect the block structure.

    This includes:
    - A row whose gradient couples two subdomains that do not overlap
    - Rows built against a different parameter layout
    """

    pass


@dataclass
class BlockSymMatrix:
    """
    Symmetric matrix stored as dense upper-triangular blocks.

    Attributes:
        layout: Row/column block partition
        blocks: ``(k, l) -> G_kl`` for stored pairs with ``k <= l``
    """

    layout: ParameterLayout
    blocks: dict[tuple[int, int], NDArray[np.float64]]

    def __post_init__(self) -> None:
        """Validate block shapes."""
        for (k, l), block in self.blocks.items():
            if k > l:
                raise ValueError(f"Only upper-triangular blocks may be stored, got ({k}, {l})")
            expected = (self.layout.sizes[k], self.layout.sizes[l])
            if block.shape != expected:
                raise ValueError(f"Block ({k}, {l}) has shape {block.shape}, expected {expected}")

    @property
    def n(self) -> int:
        return self.layout.n_params

    def stored_pairs(self) -> list[tuple[int, int]]:
        """Stored ``(k, l)`` pairs in sorted order."""
        return sorted(self.blocks)

    def block(self, k: int, l: int) -> NDArray[np.float64]:
        """Block ``G_kl`` (transposed storage for ``k > l``, zeros if not stored)."""
        if k <= l:
            found = self.blocks.get((k, l))
            return found if found is not None else np.zeros((self.layout.sizes[k], self.layout.sizes[l]))
        return self.block(l, k).T

    def diagonal_block(self, k: int) -> NDArray[np.float64]:
        return self.block(k, k)

    def densify(self) -> NDArray[np.float64]:
        """Full symmetric ``(P, P)`` matrix."""
        dense = np.zeros((self.n, self.n))
        for (k, l), block in self.blocks.items():
            rows, cols = self.layout.block_slice(k), self.layout.block_slice(l)
            dense[rows, cols] = block
            if k != l:
                dense[cols, rows] = block.T
        return dense

    def matvec(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """``G @ x`` using only stored blocks."""
        x = np.asarray(x, dtype=np.float64)
        y = np.zeros_like(x)
        for (k, l) in self.stored_pairs():
            block = self.blocks[(k, l)]
            sk, sl = self.layout.block_slice(k), self.layout.block_slice(l)
            y[sk] += block @ x[sl]
            if k != l:
                y[sl] += block.T @ x[sk]
        return y

    def nonzero_mask(self, threshold: float = NONZERO_THRESHOLD) -> NDArray[np.bool_]:
        """Boolean mask of ``|G_ij| > threshold`` on the densified matrix."""
        return np.abs(self.densify()) > threshold

    def nonzero_entries(self, threshold: float = NONZERO_THRESHOLD) -> NDArray[np.intp]:
        """Coordinates ``(i, j)`` of entries above ``threshold``, row-major order."""
        return np.argwhere(self.nonzero_mask(threshold))

    def __repr__(self) -> str:
        """Detailed representation."""
        return f"BlockSymMatrix(n={self.n}, n_blocks={self.layout.n_blocks}, stored={len(self.blocks)})"


def _normalized_pairs(adjacency: Iterable[tuple[int, int]], n_blocks: int) -> set[tuple[int, int]]:
    pairs = {(min(k, l), max(k, l)) for k, l in adjacency}
    return pairs | {(k, k) for k in range(n_blocks)}


def assemble_gram(
    source: ResidualJacobian | Sequence[ResidualRow],
    layout: ParameterLayout,
    adjacency: Iterable[tuple[int, int]],
    scale: float = 1.0,
) -> BlockSymMatrix:
    """
    Assemble ``scale * Σ_i ∇r_i ∇r_iᵀ`` block by block.

    Args:
        source: Block Jacobian, or residual rows (regrouped into blocks)
        layout: Parameter block layout
        adjacency: Pairs of overlapping subdomains; self-pairs are always stored
        scale: Multiplier applied to every block (``1/N`` for the mean loss)

    Returns:
        BlockSymMatrix storing exactly the adjacency pairs

    Raises:
        GramAssemblyError: A row couples a non-adjacent pair, or the layouts differ
    """
    jac = source if isinstance(source, ResidualJacobian) else ResidualJacobian.from_rows(source, layout)
    if jac.layout != layout:
        raise GramAssemblyError(f"Jacobian layout {jac.layout.sizes} does not match {layout.sizes}")

    pairs = _normalized_pairs(adjacency, layout.n_blocks)

    member = jac.membership().astype(np.int64)
    co_occurrence = member.T @ member
    for k, l in zip(*np.nonzero(np.triu(co_occurrence))):
        if (int(k), int(l)) not in pairs:
            raise GramAssemblyError(
                f"Residual rows couple subdomains {int(k)} and {int(l)}, which do not overlap"
            )

    by_block = {b.block: b for b in jac.blocks}
    blocks: dict[tuple[int, int], NDArray[np.float64]] = {}
    for k, l in sorted(pairs):
        out = np.zeros((layout.sizes[k], layout.sizes[l]))
        bk, bl = by_block.get(k), by_block.get(l)
        if bk is not None and bl is not None:
            _, ik, il = np.intersect1d(bk.rows, bl.rows, assume_unique=True, return_indices=True)
            if ik.size:
                out = scale * (bk.values[ik].T @ bl.values[il])
        if k == l:
            out = 0.5 * (out + out.T)
        blocks[(k, l)] = out
    return BlockSymMatrix(layout, blocks)
