"""2D Helmholtz problem with homogeneous Dirichlet data."""

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.autodiff.jet import Jet2, Real, mul, powi
from fbpinn_gn.domain.constraints import ConstraintOp
from fbpinn_gn.problems.base import Problem


class HelmholtzProblem(Problem):
    """
    ``Δu + k^2 u = f`` on [-1, 1]^2, ``u = 0`` on the boundary.

    With ``f = -4 + 2(x^2 + y^2) + k^2 (1 - x^2)(1 - y^2)`` the exact
    solution is ``(1 - x^2)(1 - y^2)``.
    """

    name = "helmholtz2d"
    dim = 2
    axes = (0, 1)

    def __init__(self, wave_number: float = 1.0):
        self.wave_number = float(wave_number)
        self.constraint = ConstraintOp.product_bubble()

    def exact(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        pts = self._points(points)
        return (1.0 - pts[:, 0] ** 2) * (1.0 - pts[:, 1] ** 2)

    def exact_jet(self, coords: Sequence[Jet2]) -> Jet2:
        return mul(1.0 - powi(coords[0], 2), 1.0 - powi(coords[1], 2))

    def forcing(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        pts = self._points(points)
        x2, y2 = pts[:, 0] ** 2, pts[:, 1] ** 2
        return -4.0 + 2.0 * (x2 + y2) + self.wave_number**2 * (1.0 - x2) * (1.0 - y2)

    def operator(self, field_jets: Sequence[Jet2]) -> Real:
        along_x, along_y = field_jets
        return along_x.d2 + along_y.d2 + self.wave_number**2 * along_x.val


def helmholtz_problem(wave_number: float = 1.0) -> HelmholtzProblem:
    """Helmholtz problem with ``k = 1``."""
    return HelmholtzProblem(wave_number=wave_number)
