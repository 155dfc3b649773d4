"""Protocol definitions for trainable PINN models.

Optimizers, the Gram assembler and the experiment runner only depend on
this interface, so the domain-decomposed model and the single-network
baseline are interchangeable, and tests can drive the optimizers with
small hand-built models.
"""

from collections.abc import Sequence
from typing import Protocol, runtime_checkable

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.autodiff.jet import Jet2
from fbpinn_gn.models.residuals import ParameterLayout, ResidualJacobian
from fbpinn_gn.problems.base import Problem


@runtime_checkable
class PinnModel(Protocol):
    """Protocol for a constrained PINN ansatz with a flat parameter vector.

    Methods:
        params: Current global parameter vector
        set_params: Overwrite the parameter vector in place
        adjacency: Parameter-block pairs that may couple in the Gram matrix
        field_eval: Jet of the constrained field along one axis
        field_values: Plain field values
        jacobian: Residuals and their block-sparse Jacobian on a point set

    Example:
        >>> model: PinnModel = FbpinnModel.create(decomposition, [1, 20, 1], constraint)
        >>> jac = model.jacobian(problem, colloc.points)
        >>> jac.loss(), jac.gradient().shape
    """

    @property
    def dim(self) -> int: ...

    @property
    def layout(self) -> ParameterLayout: ...

    @property
    def n_params(self) -> int: ...

    def params(self) -> NDArray[np.float64]:
        """Copy of the global parameter vector ``θ``."""
        ...

    def set_params(self, theta: NDArray[np.float64]) -> None:
        """Copy ``theta`` into the model's parameter storage.

        Raises:
            NetworkShapeError: Length differs from ``n_params``
        """
        ...

    def adjacency(self) -> set[tuple[int, int]]:
        """Block pairs ``(k, l)``, ``k <= l``, whose residual rows can overlap."""
        ...

    def cover_mask(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        """Boolean ``(N, n_blocks)`` mask of which blocks influence each point."""
        ...

    def field_eval(self, points: NDArray[np.float64] | Sequence[float], axis: int) -> Jet2:
        """Jet of the constrained field along ``axis``."""
        ...

    def field_values(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Constrained field values, shape ``(N,)``."""
        ...

    def jacobian(self, problem: Problem, points: NDArray[np.float64]) -> ResidualJacobian:
        """Residuals at ``points`` and their parameter Jacobian."""
        ...
