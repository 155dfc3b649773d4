"""High-frequency first-order ODE ``u' = 16 pi cos(16 pi x)``, ``u(0) = 0``."""

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.autodiff.jet import Jet2, Real, scale, sin
from fbpinn_gn.domain.constraints import ConstraintOp
from fbpinn_gn.problems.base import Problem


class OdeProblem(Problem):
    """
    ``du/dx - w pi cos(w pi x) = 0`` on [-1, 1] with exact solution ``sin(w pi x)``.

    The residual only reads first derivatives.
    """

    name = "ode1d_hf"
    dim = 1
    axes = (0,)

    def __init__(self, frequency: float = 16.0, kappa: float | None = None):
        """
        Initialize problem.

        Args:
            frequency: Solution frequency multiplier ``w``
            kappa: Constraint multiplier (default: ``frequency``)
        """
        self.frequency = float(frequency)
        self.constraint = ConstraintOp.tanh_scaled(self.frequency if kappa is None else kappa)

    def exact(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        x = self._points(points)[:, 0]
        return np.sin(self.frequency * np.pi * x)

    def exact_jet(self, coords: Sequence[Jet2]) -> Jet2:
        return sin(scale(coords[0], self.frequency * np.pi))

    def forcing(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        x = self._points(points)[:, 0]
        w = self.frequency * np.pi
        return w * np.cos(w * x)

    def operator(self, field_jets: Sequence[Jet2]) -> Real:
        return field_jets[0].d1


def ode_problem(kappa: float | None = None) -> OdeProblem:
    """High-frequency ODE with frequency 16."""
    return OdeProblem(frequency=16.0, kappa=kappa)
