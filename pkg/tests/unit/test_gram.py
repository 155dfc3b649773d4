"""Unit tests for block-sparse Gram assembly."""

import numpy as np
import pytest

from fbpinn_gn.models.fbpinn import FbpinnModel
from fbpinn_gn.models.mlp import InitKind, InitScheme
from fbpinn_gn.models.residuals import JacobianBlock, ParameterLayout, ResidualJacobian
from fbpinn_gn.optim.gauss_newton import gram_matrix
from fbpinn_gn.optim.gram import BlockSymMatrix, GramAssemblyError, assemble_gram


def _max_abs(a):
    return max(float(np.max(np.abs(a))), 1.0)


@pytest.mark.unit
class TestAssembly:
    """Test Gram assembly against dense products."""

    def test_matches_dense_product_1d(self, model_1d, mild_ode, colloc_1d):
        """Test densified G equals (1/N) J^T J for a 1D FBPINN."""
        jac = model_1d.jacobian(mild_ode, colloc_1d.points)
        dense_j = jac.dense()
        expected = dense_j.T @ dense_j / colloc_1d.n_points

        gram = gram_matrix(model_1d, jac).densify()

        np.testing.assert_allclose(gram, expected, rtol=0, atol=1e-12 * _max_abs(expected))

    def test_matches_dense_product_2d(self, model_2d, helmholtz, colloc_2d):
        """Test densified G equals (1/N) J^T J for a 2D FBPINN."""
        jac = model_2d.jacobian(helmholtz, colloc_2d.points)
        dense_j = jac.dense()
        expected = dense_j.T @ dense_j / colloc_2d.n_points

        gram = gram_matrix(model_2d, jac).densify()

        np.testing.assert_allclose(gram, expected, rtol=0, atol=1e-12 * _max_abs(expected))

    @pytest.mark.parametrize("seed", range(20))
    def test_positive_semidefinite(self, decomposition_1d, decomposition_2d, mild_ode, helmholtz, seed):
        """Test G has no eigenvalue below round-off for random models and random points."""
        rng = np.random.default_rng(seed)
        if seed % 2:
            scheme = InitScheme(InitKind.GLOROT_UNIFORM, seed)
            model = FbpinnModel.create(decomposition_2d, [2, 4, 1], helmholtz.constraint, scheme)
            problem, points = helmholtz, rng.uniform(-1.0, 1.0, size=(60, 2))
        else:
            model = FbpinnModel.create(decomposition_1d, [1, 5, 1], mild_ode.constraint, InitScheme(seed=seed))
            problem, points = mild_ode, rng.uniform(-1.0, 1.0, size=(60, 1))

        eigenvalues = np.linalg.eigvalsh(gram_matrix(model, model.jacobian(problem, points)).densify())

        assert eigenvalues.min() >= -1e-8 * max(eigenvalues.max(), 1e-300)

    def test_stores_exactly_adjacent_pairs(self, model_1d, mild_ode, colloc_1d):
        """Test that only overlapping subdomain pairs are stored for a chain of 4."""
        gram = gram_matrix(model_1d, model_1d.jacobian(mild_ode, colloc_1d.points))

        assert gram.stored_pairs() == [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (3, 3)]

    def test_non_adjacent_blocks_are_zero(self, model_1d, mild_ode, colloc_1d):
        """Test the nonzero pattern respects the adjacency graph."""
        gram = gram_matrix(model_1d, model_1d.jacobian(mild_ode, colloc_1d.points))
        mask = gram.nonzero_mask()
        layout = model_1d.layout

        assert not mask[layout.block_slice(0), layout.block_slice(2)].any()
        assert not mask[layout.block_slice(3), layout.block_slice(1)].any()
        assert mask[layout.block_slice(1), layout.block_slice(2)].any()

    def test_diagonal_blocks_symmetric(self, model_1d, mild_ode, colloc_1d):
        """Test every stored diagonal block is exactly symmetric."""
        gram = gram_matrix(model_1d, model_1d.jacobian(mild_ode, colloc_1d.points))

        for k in range(model_1d.n_blocks):
            block = gram.diagonal_block(k)
            np.testing.assert_array_equal(block, block.T)

    def test_rows_and_jacobian_agree(self, model_1d, mild_ode, colloc_1d):
        """Test assembling from residual rows gives the same matrix."""
        jac = model_1d.jacobian(mild_ode, colloc_1d.points)
        layout, adjacency = model_1d.layout, model_1d.adjacency()

        from_rows = assemble_gram(jac.rows(), layout, adjacency).densify()
        from_jac = assemble_gram(jac, layout, adjacency).densify()

        np.testing.assert_allclose(from_rows, from_jac, rtol=0, atol=1e-12 * _max_abs(from_jac))

    def test_non_adjacent_coupling_rejected(self):
        """Test that a row touching blocks 0 and 2 of a chain is an error."""
        layout = ParameterLayout.uniform(3, 1)
        jac = ResidualJacobian(
            np.zeros((1, 1)),
            np.array([1.0]),
            layout,
            [JacobianBlock(0, np.array([0]), np.ones((1, 1))), JacobianBlock(2, np.array([0]), np.ones((1, 1)))],
        )

        with pytest.raises(GramAssemblyError, match="do not overlap"):
            assemble_gram(jac, layout, {(0, 1), (1, 2)})

    def test_layout_mismatch_rejected(self, model_1d, mild_ode, colloc_1d):
        """Test that the Jacobian layout must match."""
        jac = model_1d.jacobian(mild_ode, colloc_1d.points)

        with pytest.raises(GramAssemblyError, match="does not match"):
            assemble_gram(jac, ParameterLayout.uniform(2, 32), {(0, 1)})


@pytest.mark.unit
class TestBlockSymMatrix:
    """Test the symmetric block container."""

    @pytest.fixture
    def matrix(self):
        """3x3 block matrix with blocks of size 2 on a chain."""
        layout = ParameterLayout.uniform(3, 2)
        rng = np.random.default_rng(0)
        blocks = {}
        for pair in [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)]:
            block = rng.normal(size=(2, 2))
            blocks[pair] = block + block.T if pair[0] == pair[1] else block
        return BlockSymMatrix(layout, blocks)

    def test_densify_is_symmetric(self, matrix):
        """Test the dense form mirrors off-diagonal blocks."""
        dense = matrix.densify()

        np.testing.assert_array_equal(dense, dense.T)
        np.testing.assert_array_equal(dense[0:2, 4:6], np.zeros((2, 2)))

    def test_matvec(self, matrix):
        """Test block matvec against the dense product."""
        x = np.arange(6.0)

        np.testing.assert_allclose(matrix.matvec(x), matrix.densify() @ x, rtol=1e-14)

    def test_lower_block_is_transpose(self, matrix):
        """Test G_lk = G_kl^T and missing blocks are zero."""
        np.testing.assert_array_equal(matrix.block(1, 0), matrix.blocks[(0, 1)].T)
        assert not matrix.block(2, 0).any()

    def test_lower_storage_rejected(self):
        """Test that blocks below the diagonal cannot be stored."""
        with pytest.raises(ValueError, match="upper-triangular"):
            BlockSymMatrix(ParameterLayout.uniform(2, 1), {(1, 0): np.zeros((1, 1))})

    def test_block_shape_checked(self):
        """Test block shapes must match the layout."""
        with pytest.raises(ValueError, match="expected"):
            BlockSymMatrix(ParameterLayout.uniform(2, 2), {(0, 0): np.zeros((1, 1))})

    def test_nonzero_entries_row_major(self):
        """Test nonzero coordinates of a diagonal matrix."""
        matrix = BlockSymMatrix(ParameterLayout.uniform(2, 1), {(0, 0): np.eye(1), (1, 1): np.eye(1)})

        np.testing.assert_array_equal(matrix.nonzero_entries(), [[0, 0], [1, 1]])
