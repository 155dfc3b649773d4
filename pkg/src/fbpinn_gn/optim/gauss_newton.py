"""Regularized Gauss–Newton (energy natural gradient) steps.

The update is ``θ ← θ - η d`` with ``(G + μI) d = ∇L``, where
``G = (1/N) Σ_i ∇r_i ∇r_iᵀ`` is assembled block-sparsely from the model's
residual Jacobian and ``∇L = (2/N) Σ_i r_i ∇r_i``.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.models.protocols import PinnModel
from fbpinn_gn.models.residuals import ResidualJacobian
from fbpinn_gn.optim.gram import BlockSymMatrix, assemble_gram
from fbpinn_gn.optim.solvers import LinearSolver, SolveResult, SolverKind, make_solver
from fbpinn_gn.problems.base import Problem
from fbpinn_gn.problems.collocation import CollocationSet


@dataclass(frozen=True)
class GnConfig:
    """
    Gauss–Newton settings.

    Attributes:
        eta: Constant step size
        mu: Tikhonov regularization added to the Gram diagonal
        solver: Linear-solver backend
        cg_tol: Relative residual tolerance for block CG
        cg_max_iter: CG iteration cap (None: system size)
    """

    eta: float = 1e-2
    mu: float = 1.0
    solver: SolverKind = SolverKind.DENSE_CHOLESKY
    cg_tol: float = 1e-10
    cg_max_iter: int | None = None

    def __post_init__(self) -> None:
        """Validate settings."""
        if self.eta <= 0:
            raise ValueError(f"Step size eta must be positive, got {self.eta}")
        if self.mu <= 0:
            raise ValueError(f"Regularization mu must be positive, got {self.mu}")
        object.__setattr__(self, "solver", SolverKind(self.solver))

    def build_solver(self) -> LinearSolver:
        return make_solver(self.solver, tol=self.cg_tol, max_iter=self.cg_max_iter)


@dataclass(frozen=True)
class GnDiagnostics:
    """Per-step diagnostics of a Gauss–Newton update."""

    loss: float
    residual_norm: float
    grad_norm: float
    step_norm: float
    solver_iterations: int
    solver_residual: float
    converged: bool

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            "loss": self.loss,
            "residual_norm": self.residual_norm,
            "grad_norm": self.grad_norm,
            "step_norm": self.step_norm,
            "solver_iterations": self.solver_iterations,
            "solver_residual": self.solver_residual,
            "converged": self.converged,
        }


def gram_matrix(model: PinnModel, jac: ResidualJacobian) -> BlockSymMatrix:
    """Mean-scaled Gram matrix ``(1/N) Jᵀ J`` on the model's adjacency pattern."""
    return assemble_gram(jac, model.layout, model.adjacency(), scale=1.0 / jac.n_points)


def gauss_newton_direction(
    gram: BlockSymMatrix,
    grad: NDArray[np.float64],
    cfg: GnConfig,
    solver: LinearSolver | None = None,
) -> SolveResult:
    """Solve ``(G + μI) d = ∇L``; a zero gradient gives ``d = 0`` without solving."""
    if not np.any(grad):
        return SolveResult(np.zeros_like(grad, dtype=np.float64), 0, 0.0, True)
    return (solver or cfg.build_solver()).solve(gram, grad, cfg.mu)


def gn_update(
    model: PinnModel,
    jac: ResidualJacobian,
    cfg: GnConfig,
    solver: LinearSolver | None = None,
) -> tuple[NDArray[np.float64], GnDiagnostics, SolveResult]:
    """
    Apply one update given the Jacobian at the current parameters.

    Returns:
        Tuple ``(new_params, diagnostics, solve_result)``
    """
    grad = jac.gradient()
    result = gauss_newton_direction(gram_matrix(model, jac), grad, cfg, solver)
    step = -cfg.eta * result.solution
    new_params = model.params() + step
    model.set_params(new_params)

    diagnostics = GnDiagnostics(
        loss=jac.loss(),
        residual_norm=float(np.linalg.norm(jac.residuals)),
        grad_norm=float(np.linalg.norm(grad)),
        step_norm=float(np.linalg.norm(step)),
        solver_iterations=result.iterations,
        solver_residual=result.residual,
        converged=result.converged,
    )
    return new_params, diagnostics, result


def gn_step(
    model: PinnModel,
    problem: Problem,
    colloc: CollocationSet,
    cfg: GnConfig,
) -> tuple[NDArray[np.float64], GnDiagnostics]:
    """
    One regularized Gauss–Newton step on the full collocation set.

    The model's parameters are updated in place; the new vector is also returned.

    Args:
        model: Model to update
        problem: Boundary-value problem
        colloc: Collocation points
        cfg: Step settings

    Returns:
        Tuple ``(new_params, diagnostics)``; non-converged CG is flagged
        in the diagnostics and the best iterate is used

    Raises:
        SolverError: Cholesky factorization failed
    """
    jac = model.jacobian(problem, colloc.points)
    new_params, diagnostics, _ = gn_update(model, jac, cfg)
    return new_params, diagnostics
