"""Linear solvers for the regularized system ``(G + μI) d = b``.

Two interchangeable backends:

- ``DenseCholeskySolver`` densifies ``G`` and factors it with
  ``scipy.linalg.cho_factor``.
- ``BlockCGSolver`` runs preconditioned conjugate gradients on the
  block-sparse matvec. The preconditioner is block Jacobi, applying the
  Cholesky factors of every ``G_kk + μI``.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Protocol, runtime_checkable

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from fbpinn_gn.optim.gram import BlockSymMatrix


class SolverError(RuntimeError):
    """Raised when a direct solve fails.

    This includes:
    - Cholesky factorization of a matrix that is not positive definite
    - Non-finite right-hand sides
    """

    pass


class SolverKind(str, Enum):
    """Available linear-solver backends."""

    DENSE_CHOLESKY = "dense_cholesky"
    BLOCK_CG = "block_cg"


@dataclass(frozen=True)
class SolveResult:
    """
    Outcome of a linear solve.

    Attributes:
        solution: Solution vector (best iterate for CG)
        iterations: CG iterations (0 for direct solves)
        residual: Relative residual ``‖b - A d‖ / ‖b‖``
        converged: Whether the tolerance was met
    """

    solution: NDArray[np.float64]
    iterations: int
    residual: float
    converged: bool


@runtime_checkable
class LinearSolver(Protocol):
    """Protocol for ``(G + μI) d = b`` solvers."""

    name: str

    def solve(self, gram: BlockSymMatrix, rhs: NDArray[np.float64], mu: float) -> SolveResult:
        """Solve the regularized system."""
        ...


def _check_rhs(rhs: NDArray[np.float64], n: int) -> NDArray[np.float64]:
    b = np.asarray(rhs, dtype=np.float64)
    if b.shape != (n,):
        raise ValueError(f"Right-hand side must have shape ({n},), got {b.shape}")
    if not np.all(np.isfinite(b)):
        raise SolverError("Right-hand side contains non-finite values")
    return b


def _relative_residual(r: NDArray[np.float64], b_norm: float) -> float:
    return float(np.linalg.norm(r) / b_norm) if b_norm > 0 else float(np.linalg.norm(r))


class DenseCholeskySolver:
    """Direct solve on the densified regularized matrix."""

    name = SolverKind.DENSE_CHOLESKY.value

    def solve(self, gram: BlockSymMatrix, rhs: NDArray[np.float64], mu: float) -> SolveResult:
        """
        Factor ``G + μI`` and solve.

        Raises:
            SolverError: Factorization failed
        """
        b = _check_rhs(rhs, gram.n)
        a = gram.densify()
        a[np.diag_indices_from(a)] += mu
        try:
            factor = cho_factor(a, lower=True, check_finite=True)
        except (LinAlgError, ValueError) as e:
            raise SolverError(f"Cholesky factorization of G + mu*I failed (mu={mu}): {e}") from e
        d = cho_solve(factor, b)
        residual = _relative_residual(b - (a @ d), float(np.linalg.norm(b)))
        return SolveResult(d, 0, residual, True)


class BlockCGSolver:
    """
    Block-Jacobi preconditioned conjugate gradients.

    Attributes:
        tol: Relative residual tolerance
        max_iter: Iteration cap (defaults to the system size)
    """

    name = SolverKind.BLOCK_CG.value

    def __init__(self, tol: float = 1e-10, max_iter: int | None = None):
        if tol <= 0:
            raise ValueError(f"CG tolerance must be positive, got {tol}")
        if max_iter is not None and max_iter < 1:
            raise ValueError(f"CG iteration cap must be positive, got {max_iter}")
        self.tol = tol
        self.max_iter = max_iter

    def _preconditioner(self, gram: BlockSymMatrix, mu: float) -> list[tuple[slice, tuple]]:
        factors = []
        for k in range(gram.layout.n_blocks):
            block = gram.diagonal_block(k).copy()
            block[np.diag_indices_from(block)] += mu
            try:
                factors.append((gram.layout.block_slice(k), cho_factor(block, lower=True)))
            except LinAlgError as e:
                raise SolverError(f"Cholesky factorization of diagonal block {k} failed: {e}") from e
        return factors

    def solve(self, gram: BlockSymMatrix, rhs: NDArray[np.float64], mu: float) -> SolveResult:
        """
        Solve iteratively from a zero initial guess.

        Returns the iterate with the smallest residual seen; ``converged`` is
        False when ``max_iter`` ran out first.
        """
        b = _check_rhs(rhs, gram.n)
        b_norm = float(np.linalg.norm(b))
        x = np.zeros_like(b)
        if b_norm == 0.0:
            return SolveResult(x, 0, 0.0, True)

        factors = self._preconditioner(gram, mu)

        def apply_a(v: NDArray[np.float64]) -> NDArray[np.float64]:
            return gram.matvec(v) + mu * v

        def apply_m(v: NDArray[np.float64]) -> NDArray[np.float64]:
            z = np.empty_like(v)
            for sl, factor in factors:
                z[sl] = cho_solve(factor, v[sl])
            return z

        max_iter = self.max_iter or gram.n
        r = b.copy()
        z = apply_m(r)
        p = z.copy()
        rz = float(r @ z)

        best_x, best_res = x.copy(), 1.0
        iterations = 0
        while iterations < max_iter:
            ap = apply_a(p)
            alpha = rz / float(p @ ap)
            x = x + alpha * p
            r = r - alpha * ap
            iterations += 1

            res = float(np.linalg.norm(r)) / b_norm
            if res < best_res:
                best_x, best_res = x.copy(), res
            if res <= self.tol:
                return SolveResult(x, iterations, res, True)

            z = apply_m(r)
            rz_next = float(r @ z)
            p = z + (rz_next / rz) * p
            rz = rz_next

        return SolveResult(best_x, iterations, best_res, False)


def make_solver(kind: SolverKind | str, tol: float = 1e-10, max_iter: int | None = None) -> LinearSolver:
    """Build the backend named by ``kind``."""
    kind = SolverKind(kind)
    if kind is SolverKind.DENSE_CHOLESKY:
        return DenseCholeskySolver()
    return BlockCGSolver(tol=tol, max_iter=max_iter)
