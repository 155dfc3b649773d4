"""Constrained PINN ansätze: the domain-decomposed FBPINN and a single-network baseline.

The FBPINN field is

    ũ(x) = c(x) * Σ_k ω_k(x) u_k(n_k(x)),

summed only over subdomains whose window is positive at ``x``. Every
subnetwork is a view into one global parameter vector laid out block by
block, so the optimizers see a single flat ``θ``.

Residual Jacobians are computed per subdomain: the subnet's parameter
tangents are pushed through the window, the constraint and the problem's
(linear) differential operator, giving a dense ``(n_k, P_k)`` block for the
``n_k`` collocation points the subdomain covers.
"""

from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any, TypeVar

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.autodiff.jet import Jet2, mul
from fbpinn_gn.domain.constraints import ConstraintOp
from fbpinn_gn.domain.decomposition import Decomposition
from fbpinn_gn.lib.config import app_config
from fbpinn_gn.lib.utils import chunk_slices, spawn_rngs
from fbpinn_gn.models.mlp import MLP, InitScheme, NetworkShapeError, param_count
from fbpinn_gn.models.residuals import JacobianBlock, ParameterLayout, ResidualJacobian, ResidualRow
from fbpinn_gn.problems.base import Problem, seed_coordinates
from fbpinn_gn.problems.collocation import CollocationSet

T = TypeVar("T")


class _LocalizedPinn(ABC):
    """Shared evaluation machinery for models built from parameter blocks."""

    kind = "base"

    def __init__(
        self,
        layer_sizes: Sequence[int],
        n_blocks: int,
        constraint: ConstraintOp,
        params: NDArray[np.float64] | None = None,
        activation: str = "tanh",
        workers: int | None = None,
        chunk_size: int | None = None,
    ):
        self.layer_sizes = tuple(int(d) for d in layer_sizes)
        if self.layer_sizes[-1] != 1:
            raise NetworkShapeError(f"Subnet output size must be 1, got {self.layer_sizes[-1]}")
        self.constraint = constraint
        self._layout = ParameterLayout.uniform(n_blocks, param_count(self.layer_sizes))

        theta = np.zeros(self._layout.n_params) if params is None else np.array(params, dtype=np.float64)
        if theta.shape != (self._layout.n_params,):
            raise NetworkShapeError(
                f"Expected {self._layout.n_params} parameters, got shape {theta.shape}"
            )
        self._theta = theta
        self.subnets = [
            MLP(self.layer_sizes, self._theta[self._layout.block_slice(k)], activation)
            for k in range(n_blocks)
        ]
        self.workers = workers if workers is not None else app_config.workers
        self.chunk_size = chunk_size if chunk_size is not None else app_config.chunk_size

    @property
    @abstractmethod
    def dim(self) -> int:
        """Spatial dimension."""

    @abstractmethod
    def cover_mask(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        """Boolean ``(N, n_blocks)`` mask of which blocks influence each point."""

    @abstractmethod
    def adjacency(self) -> set[tuple[int, int]]:
        """Block pairs ``(k, l)``, ``k <= l``, that may share residual rows."""

    @abstractmethod
    def _window(self, k: int, coords: Sequence[Jet2]) -> Jet2 | None:
        """Window jet of block ``k`` (None when the block is unweighted)."""

    @abstractmethod
    def _local_inputs(self, k: int, coords: Sequence[Jet2]) -> list[Jet2]:
        """Subnet inputs for block ``k``."""

    @property
    def layout(self) -> ParameterLayout:
        return self._layout

    @property
    def n_params(self) -> int:
        return self._layout.n_params

    @property
    def n_blocks(self) -> int:
        return self._layout.n_blocks

    def params(self) -> NDArray[np.float64]:
        """Copy of the global parameter vector."""
        return self._theta.copy()

    def set_params(self, theta: NDArray[np.float64]) -> None:
        """Copy ``theta`` into the shared storage (subnet views follow)."""
        values = np.asarray(theta, dtype=np.float64)
        if values.shape != self._theta.shape:
            raise NetworkShapeError(
                f"Expected {self.n_params} parameters, got shape {values.shape}"
            )
        self._theta[...] = values

    def save_params(self, path: Any) -> None:
        """Write ``θ`` as text, one value per line."""
        np.savetxt(path, self._theta, fmt="%.17e")

    def load_params(self, path: Any) -> None:
        """Load a vector written by ``save_params``."""
        self.set_params(np.atleast_1d(np.loadtxt(path, dtype=np.float64)))

    def field_eval(self, points: NDArray[np.float64] | Sequence[float] | float, axis: int) -> Jet2:
        """
        Jet of the constrained field along ``axis``.

        Args:
            points: A single point or an array of shape ``(N, dim)``
            axis: Direction of the first and second derivative

        Returns:
            Jet with scalar fields for a single point, ``(N,)`` fields otherwise
        """
        pts, single = self._point_array(points)
        if not 0 <= axis < self.dim:
            raise ValueError(f"Axis {axis} out of range for a {self.dim}D model")
        coords = seed_coordinates(pts, axis)
        mask = self.cover_mask(pts)

        acc = _zero_fields(len(pts))
        for k in range(self.n_blocks):
            idx = np.flatnonzero(mask[:, k])
            if idx.size == 0:
                continue
            local = [c.take(idx) for c in coords]
            u = self.subnets[k].forward_jet(self._local_inputs(k, local))
            w = self._window(k, local)
            _accumulate(acc, idx, mul(w, u) if w is not None else u)

        field = self.constraint.apply(coords, Jet2(*acc))
        return field.take(0) if single else field

    def field_values(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Constrained field values, shape ``(N,)``."""
        pts, _ = self._point_array(points)
        return np.asarray(self.field_eval(pts, 0).val)

    def residuals(self, problem: Problem, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Residuals ``L(ũ) - f`` without parameter derivatives."""
        pts = self._problem_points(problem, points)
        return problem.residual(pts, [self.field_eval(pts, axis) for axis in problem.axes])

    def jacobian(self, problem: Problem, points: NDArray[np.float64]) -> ResidualJacobian:
        """
        Residuals and their block-sparse parameter Jacobian.

        Blocks are evaluated independently (on ``workers`` threads when more
        than one is configured) and reduced in block order, so results do not
        depend on the worker count.

        Args:
            problem: Boundary-value problem
            points: Array of shape ``(N, dim)``

        Returns:
            ResidualJacobian holding one dense block per covering subdomain
        """
        pts = self._problem_points(problem, points)
        coords_by_axis = [seed_coordinates(pts, axis) for axis in problem.axes]
        factors = [self.constraint.factor(coords) for coords in coords_by_axis]
        mask = self.cover_mask(pts)
        active = [k for k in range(self.n_blocks) if mask[:, k].any()]

        def block(k: int) -> tuple[list[Jet2], JacobianBlock]:
            return self._block_terms(problem, k, np.flatnonzero(mask[:, k]), coords_by_axis, factors)

        results = self._map_blocks(block, active)

        sums = [_zero_fields(len(pts)) for _ in problem.axes]
        for terms, jac_block in results:
            for acc, term in zip(sums, terms):
                _accumulate(acc, jac_block.rows, term)
        field_jets = [mul(factor, Jet2(*acc)) for factor, acc in zip(factors, sums)]
        residuals = problem.residual(pts, field_jets)
        return ResidualJacobian(pts, residuals, self._layout, [b for _, b in results])

    def residual_row(self, problem: Problem, point: NDArray[np.float64] | Sequence[float] | float) -> ResidualRow:
        """Residual at a single point with its sparse gradient."""
        pts, _ = self._point_array(point)
        return self.jacobian(problem, pts[:1]).rows()[0]

    def _block_terms(
        self,
        problem: Problem,
        k: int,
        idx: NDArray[np.intp],
        coords_by_axis: Sequence[Sequence[Jet2]],
        factors: Sequence[Jet2],
    ) -> tuple[list[Jet2], JacobianBlock]:
        net = self.subnets[k]
        field_terms = []
        tangent_terms = []
        for coords, factor in zip(coords_by_axis, factors):
            local = [c.take(idx) for c in coords]
            inputs = self._local_inputs(k, local)
            outs, tans = [], []
            for sl in chunk_slices(len(idx), self.chunk_size):
                out, tangent = net.forward_jet_with_tangents([u.take(sl) for u in inputs])
                outs.append(out)
                tans.append(tangent)
            u, du = _concat(outs), _concat(tans)

            w = self._window(k, local)
            if w is not None:
                u = mul(w, u)
                du = mul(w.expand(), du)
            field_terms.append(u)
            tangent_terms.append(mul(factor.take(idx).expand(), du))

        values = np.array(problem.operator(tangent_terms), dtype=np.float64)
        return field_terms, JacobianBlock(k, idx, values)

    def _map_blocks(self, fn: Callable[[int], T], blocks: list[int]) -> list[T]:
        if self.workers > 1 and len(blocks) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                return list(pool.map(fn, blocks))
        return [fn(k) for k in blocks]

    def _point_array(self, points: Any) -> tuple[NDArray[np.float64], bool]:
        arr = np.asarray(points, dtype=np.float64)
        single = arr.ndim == 0 or (arr.ndim == 1 and self.dim > 1)
        if self.dim == 1 and arr.ndim <= 1:
            arr = arr.reshape(-1, 1)
        arr = np.atleast_2d(arr)
        if arr.shape[1] != self.dim:
            raise NetworkShapeError(f"Expected {self.dim}D points, got shape {arr.shape}")
        return arr, single

    def _problem_points(self, problem: Problem, points: Any) -> NDArray[np.float64]:
        if problem.dim != self.dim:
            raise ValueError(f"Problem {problem.name!r} is {problem.dim}D but the model is {self.dim}D")
        pts, _ = self._point_array(points.points if isinstance(points, CollocationSet) else points)
        return pts

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            "kind": self.kind,
            "layer_sizes": list(self.layer_sizes),
            "n_blocks": self.n_blocks,
            "n_params": self.n_params,
            "constraint": self.constraint.to_dict(),
        }


class FbpinnModel(_LocalizedPinn):
    """
    Window-weighted sum of subdomain networks under a hard constraint.

    Subnet ``k`` sees its subdomain mapped onto [-1, 1]^dim by the
    decomposition's normalization.
    """

    kind = "fbpinn"

    def __init__(
        self,
        decomposition: Decomposition,
        layer_sizes: Sequence[int],
        constraint: ConstraintOp,
        params: NDArray[np.float64] | None = None,
        activation: str = "tanh",
        workers: int | None = None,
        chunk_size: int | None = None,
    ):
        """
        Initialize FBPINN model.

        Args:
            decomposition: 1D or 2D decomposition of the domain
            layer_sizes: Subnet widths, first entry equal to the dimension
            constraint: Hard constraint factor
            params: Global parameter vector (copied); zeros when omitted
            activation: Hidden activation of every subnet
            workers: Threads for per-subdomain Jacobian blocks (default from ``app_config``)
            chunk_size: Points per tangent batch (default from ``app_config``)

        Raises:
            NetworkShapeError: Input width differs from the decomposition dimension
        """
        if int(layer_sizes[0]) != decomposition.dim:
            raise NetworkShapeError(
                f"Subnet input size {layer_sizes[0]} does not match {decomposition.dim}D decomposition"
            )
        self.decomposition = decomposition
        super().__init__(
            layer_sizes,
            decomposition.n_subdomains,
            constraint,
            params=params,
            activation=activation,
            workers=workers,
            chunk_size=chunk_size,
        )

    @classmethod
    def create(
        cls,
        decomposition: Decomposition,
        layer_sizes: Sequence[int],
        constraint: ConstraintOp,
        init: InitScheme | None = None,
        **kwargs: Any,
    ) -> "FbpinnModel":
        """
        Create a model with every subnet freshly initialized.

        The master seed of ``init`` is split with ``SeedSequence.spawn`` into
        one independent stream per subdomain.
        """
        init = init or InitScheme()
        model = cls(decomposition, layer_sizes, constraint, **kwargs)
        for net, rng in zip(model.subnets, spawn_rngs(init.seed, model.n_blocks)):
            net.initialize(init.kind, rng)
        return model

    @property
    def dim(self) -> int:
        return self.decomposition.dim

    def cover_mask(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        pts, _ = self._point_array(points)
        return self.decomposition.cover_mask(pts)

    def covering_subdomains(self, point: Sequence[float] | float) -> list[int]:
        return self.decomposition.covering_subdomains(point)

    def adjacency(self) -> set[tuple[int, int]]:
        return self.decomposition.adjacency()

    def _window(self, k: int, coords: Sequence[Jet2]) -> Jet2:
        return self.decomposition.window_at(k, coords)

    def _local_inputs(self, k: int, coords: Sequence[Jet2]) -> list[Jet2]:
        return self.decomposition.normalize_at(k, coords)

    def __repr__(self) -> str:
        """Detailed representation."""
        return (
            f"FbpinnModel(n_subdomains={self.n_blocks}, layer_sizes={list(self.layer_sizes)}, "
            f"n_params={self.n_params})"
        )


class VanillaPinnModel(_LocalizedPinn):
    """Single network on the whole domain under a hard constraint (dense Jacobian rows)."""

    kind = "vanilla"

    def __init__(
        self,
        layer_sizes: Sequence[int],
        constraint: ConstraintOp,
        params: NDArray[np.float64] | None = None,
        activation: str = "tanh",
        workers: int | None = None,
        chunk_size: int | None = None,
    ):
        super().__init__(
            layer_sizes,
            1,
            constraint,
            params=params,
            activation=activation,
            workers=workers,
            chunk_size=chunk_size,
        )

    @classmethod
    def create(
        cls,
        layer_sizes: Sequence[int],
        constraint: ConstraintOp,
        init: InitScheme | None = None,
        **kwargs: Any,
    ) -> "VanillaPinnModel":
        """Create a model whose network is initialized from the first spawned stream."""
        init = init or InitScheme()
        model = cls(layer_sizes, constraint, **kwargs)
        model.net.initialize(init.kind, spawn_rngs(init.seed, 1)[0])
        return model

    @property
    def net(self) -> MLP:
        return self.subnets[0]

    @property
    def dim(self) -> int:
        return self.layer_sizes[0]

    def cover_mask(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        pts, _ = self._point_array(points)
        return np.ones((len(pts), 1), dtype=bool)

    def adjacency(self) -> set[tuple[int, int]]:
        return {(0, 0)}

    def _window(self, k: int, coords: Sequence[Jet2]) -> None:
        return None

    def _local_inputs(self, k: int, coords: Sequence[Jet2]) -> list[Jet2]:
        return list(coords)

    def __repr__(self) -> str:
        """Detailed representation."""
        return f"VanillaPinnModel(layer_sizes={list(self.layer_sizes)}, n_params={self.n_params})"


def _zero_fields(n: int) -> list[NDArray[np.float64]]:
    return [np.zeros(n), np.zeros(n), np.zeros(n)]


def _accumulate(acc: list[NDArray[np.float64]], idx: NDArray[np.intp], u: Jet2) -> None:
    # idx holds unique row indices
    for field, channel in zip(acc, u.as_tuple()):
        field[idx] += channel


def _concat(parts: list[Jet2]) -> Jet2:
    if len(parts) == 1:
        return parts[0]
    return Jet2(
        np.concatenate([np.asarray(p.val) for p in parts]),
        np.concatenate([np.asarray(p.d1) for p in parts]),
        np.concatenate([np.asarray(p.d2) for p in parts]),
    )


def field_eval(model: _LocalizedPinn, x: NDArray[np.float64] | Sequence[float] | float, axis: int) -> Jet2:
    """Jet of the constrained field of ``model`` at ``x`` along ``axis``."""
    return model.field_eval(x, axis)


def residual_row(
    model: _LocalizedPinn, problem: Problem, x: NDArray[np.float64] | Sequence[float] | float
) -> ResidualRow:
    """Residual at ``x`` with its gradient over the covering subnets' parameters."""
    return model.residual_row(problem, x)


def residual_rows(model: _LocalizedPinn, problem: Problem, colloc: CollocationSet) -> list[ResidualRow]:
    """One residual row per collocation point, in collocation order."""
    return model.jacobian(problem, colloc.points).rows()


def loss(model: _LocalizedPinn, problem: Problem, colloc: CollocationSet) -> float:
    """Mean squared residual over the collocation set."""
    return float(np.mean(model.residuals(problem, colloc.points) ** 2))


def loss_gradient(model: _LocalizedPinn, problem: Problem, colloc: CollocationSet) -> NDArray[np.float64]:
    """Dense loss gradient ``(2/N) Σ_i r_i ∇r_i``."""
    return model.jacobian(problem, colloc.points).gradient()
