"""Unit tests for the regularized linear solvers."""

import numpy as np
import pytest

from fbpinn_gn.models.residuals import ParameterLayout
from fbpinn_gn.optim.gauss_newton import gram_matrix
from fbpinn_gn.optim.gram import BlockSymMatrix
from fbpinn_gn.optim.solvers import (
    BlockCGSolver,
    DenseCholeskySolver,
    LinearSolver,
    SolverError,
    SolverKind,
    make_solver,
)


@pytest.fixture
def fbpinn_system(model_1d, mild_ode, colloc_1d):
    """Gram matrix and gradient of a small 1D FBPINN."""
    jac = model_1d.jacobian(mild_ode, colloc_1d.points)
    return gram_matrix(model_1d, jac), jac.gradient()


def _zero_gram(n_blocks=2, size=3):
    layout = ParameterLayout.uniform(n_blocks, size)
    return BlockSymMatrix(layout, {(k, k): np.zeros((size, size)) for k in range(n_blocks)})


@pytest.mark.unit
class TestDenseCholesky:
    """Test the direct solver."""

    def test_solves_regularized_system(self, fbpinn_system):
        """Test (G + mu I) d = b to a tight residual."""
        gram, b = fbpinn_system
        result = DenseCholeskySolver().solve(gram, b, 1e-2)
        a = gram.densify() + 1e-2 * np.eye(gram.n)

        np.testing.assert_allclose(a @ result.solution, b, rtol=1e-6, atol=1e-8 * np.abs(b).max())
        assert result.iterations == 0
        assert result.converged

    def test_zero_gram_returns_scaled_rhs(self):
        """Test G = 0 gives d = b / mu."""
        b = np.arange(1.0, 7.0)
        result = DenseCholeskySolver().solve(_zero_gram(), b, 2.0)

        np.testing.assert_allclose(result.solution, b / 2.0, rtol=1e-15)

    def test_indefinite_system_raises(self):
        """Test that a failed factorization raises SolverError."""
        with pytest.raises(SolverError, match="Cholesky"):
            DenseCholeskySolver().solve(_zero_gram(), np.ones(6), -1.0)


@pytest.mark.unit
class TestBlockCG:
    """Test block-Jacobi preconditioned CG."""

    def test_agrees_with_dense(self, fbpinn_system):
        """Test CG and Cholesky steps agree to relative 1e-6."""
        gram, b = fbpinn_system
        dense = DenseCholeskySolver().solve(gram, b, 1.0).solution
        cg = BlockCGSolver(tol=1e-10).solve(gram, b, 1.0)

        assert cg.converged
        assert np.linalg.norm(cg.solution - dense) <= 1e-6 * np.linalg.norm(dense)

    def test_zero_gram_converges_in_one_iteration(self):
        """Test that G = 0 is solved exactly by the preconditioner."""
        b = np.arange(1.0, 7.0)
        result = BlockCGSolver().solve(_zero_gram(), b, 1.0)

        assert result.iterations == 1
        np.testing.assert_allclose(result.solution, b, rtol=1e-15)

    def test_zero_rhs(self, fbpinn_system):
        """Test b = 0 returns zero without iterating."""
        gram, b = fbpinn_system
        result = BlockCGSolver().solve(gram, np.zeros_like(b), 1.0)

        assert result.iterations == 0
        assert not np.any(result.solution)

    def test_iteration_cap_returns_best_iterate(self, fbpinn_system):
        """Test that hitting max_iter is flagged and never worsens the residual."""
        gram, b = fbpinn_system
        result = BlockCGSolver(tol=1e-14, max_iter=1).solve(gram, b, 1e-6)

        assert not result.converged
        assert result.iterations == 1
        assert result.residual <= 1.0

    def test_default_cap_is_system_size(self, fbpinn_system):
        """Test CG converges within P iterations by default."""
        gram, b = fbpinn_system
        result = BlockCGSolver(tol=1e-10).solve(gram, b, 1.0)

        assert result.converged
        assert result.iterations <= gram.n

    @pytest.mark.parametrize("kwargs", [{"tol": 0.0}, {"max_iter": 0}])
    def test_invalid_settings(self, kwargs):
        """Test tolerance and cap validation."""
        with pytest.raises(ValueError):
            BlockCGSolver(**kwargs)


@pytest.mark.unit
class TestSolverFactory:
    """Test backend selection and right-hand side checks."""

    def test_make_solver(self):
        """Test building both backends from strings."""
        assert isinstance(make_solver("dense_cholesky"), DenseCholeskySolver)
        solver = make_solver(SolverKind.BLOCK_CG, tol=1e-6, max_iter=5)
        assert isinstance(solver, BlockCGSolver)
        assert solver.max_iter == 5

    def test_unknown_backend(self):
        """Test unknown solver names."""
        with pytest.raises(ValueError):
            make_solver("lu")

    def test_protocol(self):
        """Test both backends satisfy the solver protocol."""
        assert isinstance(DenseCholeskySolver(), LinearSolver)
        assert isinstance(BlockCGSolver(), LinearSolver)

    @pytest.mark.parametrize("solver", [DenseCholeskySolver(), BlockCGSolver()])
    def test_non_finite_rhs(self, solver):
        """Test NaN right-hand sides are rejected."""
        b = np.ones(6)
        b[2] = np.nan

        with pytest.raises(SolverError, match="non-finite"):
            solver.solve(_zero_gram(), b, 1.0)

    def test_rhs_shape(self):
        """Test the right-hand side length is checked."""
        with pytest.raises(ValueError, match="shape"):
            DenseCholeskySolver().solve(_zero_gram(), np.ones(4), 1.0)
