"""Small dense feedforward networks with flat parameter vectors.

Parameters are stored as one flat float64 vector laid out layer by layer
as ``[W(1) row-major, b(1), W(2), b(2), ...]``. Weight matrices handed out
by ``MLP.layers`` are views into that vector, so a network built on a
slice of a larger array (one subdomain of an FBPINN) trains in place.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.autodiff.jet import Jet2, tanh, tanh_jvp


class NetworkShapeError(ValueError):
    """Raised when a network is built or evaluated with inconsistent shapes.

    This includes:
    - Empty layer lists or layers of size zero
    - Parameter vectors whose length does not match the layer sizes
    - Inputs whose dimension differs from the first layer size
    - Parameter indices outside ``[0, P)``
    """

    pass


class InitKind(str, Enum):
    """Weight initialization schemes."""

    GLOROT_UNIFORM = "glorot_uniform"
    UNIFORM_WEIGHTS_ZERO_BIAS = "uniform_weights_zero_bias"


@dataclass(frozen=True)
class InitScheme:
    """
    Initialization scheme and its seed.

    Attributes:
        kind: Which distribution weights are drawn from (biases are zero)
        seed: Seed for a PCG64 generator
    """

    kind: InitKind = InitKind.UNIFORM_WEIGHTS_ZERO_BIAS
    seed: int = 0

    def __post_init__(self) -> None:
        """Validate init scheme."""
        if self.seed < 0:
            raise ValueError(f"Seed must be non-negative, got {self.seed}")
        object.__setattr__(self, "kind", InitKind(self.kind))

    def rng(self) -> np.random.Generator:
        """Generator seeded from this scheme."""
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class Layer:
    """Views of one affine layer and its offsets in the flat vector."""

    weight: NDArray[np.float64]
    bias: NDArray[np.float64]
    weight_offset: int
    bias_offset: int


def param_count(layer_sizes: Sequence[int]) -> int:
    """Closed-form parameter count ``sum(d_i * d_{i-1} + d_i)``."""
    return sum(d_out * d_in + d_out for d_in, d_out in zip(layer_sizes[:-1], layer_sizes[1:]))


def _validate_layer_sizes(layer_sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = tuple(int(d) for d in layer_sizes)
    if len(sizes) < 2:
        raise NetworkShapeError(f"An MLP needs at least 2 layer sizes, got {list(sizes)}")
    if any(d < 1 for d in sizes):
        raise NetworkShapeError(f"Layer sizes must be positive, got {list(sizes)}")
    return sizes


class MLP:
    """
    Dense feedforward network ``L(k) ∘ σ ∘ ... ∘ σ ∘ L(1)``.

    The activation is applied after every layer except the last.
    """

    ACTIVATIONS = ("tanh",)

    def __init__(
        self,
        layer_sizes: Sequence[int],
        params: NDArray[np.float64] | None = None,
        activation: str = "tanh",
    ):
        """
        Initialize network.

        Args:
            layer_sizes: Widths ``d_0, ..., d_k``
            params: Flat parameter vector (used as-is, not copied, when it is
                float64); zeros when omitted
            activation: Hidden activation name

        Raises:
            NetworkShapeError: Invalid layer sizes or parameter length
        """
        self.layer_sizes = _validate_layer_sizes(layer_sizes)
        if activation not in self.ACTIVATIONS:
            raise ValueError(f"Unsupported activation {activation!r}, expected one of {self.ACTIVATIONS}")
        self.activation = activation

        n_params = param_count(self.layer_sizes)
        if params is None:
            params = np.zeros(n_params, dtype=np.float64)
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (n_params,):
            raise NetworkShapeError(
                f"Expected {n_params} parameters for layers {list(self.layer_sizes)}, "
                f"got shape {params.shape}"
            )
        self.params = params
        self._layers = self._build_layers()

    @classmethod
    def create(
        cls,
        layer_sizes: Sequence[int],
        init: InitScheme | None = None,
        rng: np.random.Generator | None = None,
        activation: str = "tanh",
    ) -> "MLP":
        """
        Create a network with freshly initialized parameters.

        Args:
            layer_sizes: Widths ``d_0, ..., d_k``
            init: Initialization scheme (default: uniform weights, zero bias, seed 0)
            rng: Generator overriding ``init.seed`` (used for per-subnet streams)
            activation: Hidden activation name

        Returns:
            Initialized MLP
        """
        init = init or InitScheme()
        sizes = _validate_layer_sizes(layer_sizes)
        net = cls(sizes, activation=activation)
        net.initialize(init.kind, rng if rng is not None else init.rng())
        return net

    def initialize(self, kind: InitKind, rng: np.random.Generator) -> None:
        """Draw weights in place (layer by layer, row-major); biases are zero."""
        for layer in self._layers:
            d_out, d_in = layer.weight.shape
            if kind is InitKind.GLOROT_UNIFORM:
                limit = np.sqrt(6.0 / (d_in + d_out))
            else:
                limit = 1.0
            layer.weight[...] = rng.uniform(-limit, limit, size=(d_out, d_in))
            layer.bias[...] = 0.0

    def _build_layers(self) -> list[Layer]:
        layers = []
        offset = 0
        for d_in, d_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            w_size = d_out * d_in
            weight = self.params[offset : offset + w_size].reshape(d_out, d_in)
            bias = self.params[offset + w_size : offset + w_size + d_out]
            layers.append(Layer(weight, bias, offset, offset + w_size))
            offset += w_size + d_out
        return layers

    @property
    def n_params(self) -> int:
        """Total number of parameters P."""
        return int(self.params.size)

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def layers(self) -> list[Layer]:
        """Per-layer weight/bias views."""
        return self._layers

    def forward(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """
        Plain evaluation on points of shape ``(N, d_0)``.

        Returns:
            Array of shape ``(N,)`` (output dimension must be 1)
        """
        a = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if a.shape[1] != self.input_dim:
            raise NetworkShapeError(f"Expected inputs with {self.input_dim} columns, got {a.shape}")
        self._require_scalar_output()
        last = len(self._layers) - 1
        for i, layer in enumerate(self._layers):
            a = a @ layer.weight.T + layer.bias
            if i < last:
                a = np.tanh(a)
        return a[:, 0]

    def forward_jet(self, inputs: Sequence[Jet2]) -> Jet2:
        """
        Evaluate the network on jets, propagating spatial derivatives.

        Args:
            inputs: One jet per input coordinate; fields are scalars or
                arrays of shape ``(N,)``

        Returns:
            Output jet with the shape of the input fields

        Raises:
            NetworkShapeError: Wrong number of inputs or output dim != 1
        """
        a, squeeze = self._stack_inputs(inputs)
        last = len(self._layers) - 1
        for i, layer in enumerate(self._layers):
            z = self._affine(layer, a)
            a = tanh(z) if i < last else z
        return self._unstack(_first_column(a), squeeze)

    def forward_jet_with_tangents(self, inputs: Sequence[Jet2]) -> tuple[Jet2, Jet2]:
        """
        Evaluate the network and the tangents of its output in all parameters.

        The tangent channel runs alongside the spatial jet: for each parameter
        ``θ_j`` it carries ``∂/∂θ_j`` of the output's value, first and second
        spatial derivative.

        Args:
            inputs: One jet per input coordinate, fields of shape ``(N,)`` or scalars

        Returns:
            Tuple ``(output, tangents)``; tangent fields have shape ``(N, P)``
            (``(P,)`` for scalar inputs)
        """
        a, squeeze = self._stack_inputs(inputs)
        da: Jet2 | None = None
        last = len(self._layers) - 1
        for i, layer in enumerate(self._layers):
            z = self._affine(layer, a)
            dz = self._affine_tangent(layer, a, da)
            if i < last:
                da = tanh_jvp(z.expand(), dz)
                a = tanh(z)
            else:
                a, da = z, dz
        assert da is not None
        out = self._unstack(_first_column(a), squeeze)
        tangents = Jet2(da.val[:, 0, :], da.d1[:, 0, :], da.d2[:, 0, :])
        return out, self._unstack(tangents, squeeze)

    def forward_with_param_tangent(self, inputs: Sequence[Jet2], param_index: int) -> Jet2:
        """
        Tangent of the output jet with respect to the single parameter ``θ_j``.

        Args:
            inputs: One jet per input coordinate
            param_index: Index ``j`` with ``0 <= j < P``

        Returns:
            Jet of ``∂u/∂θ_j`` (value, d1, d2)

        Raises:
            NetworkShapeError: Index out of range
        """
        if not 0 <= param_index < self.n_params:
            raise NetworkShapeError(
                f"Parameter index {param_index} out of range for P={self.n_params}"
            )
        _, tangents = self.forward_jet_with_tangents(inputs)
        return tangents.column(param_index)

    def _require_scalar_output(self) -> None:
        if self.layer_sizes[-1] != 1:
            raise NetworkShapeError(
                f"Output dimension must be 1, got {self.layer_sizes[-1]}"
            )

    def _stack_inputs(self, inputs: Sequence[Jet2]) -> tuple[Jet2, bool]:
        if len(inputs) != self.input_dim:
            raise NetworkShapeError(
                f"Expected {self.input_dim} input jets, got {len(inputs)}"
            )
        self._require_scalar_output()
        squeeze = all(np.ndim(u.val) == 0 for u in inputs)
        n = max((np.size(u.val) for u in inputs), default=1)

        def stack(channel: int) -> NDArray[np.float64]:
            cols = [np.broadcast_to(np.asarray(u.as_tuple()[channel], dtype=np.float64), (n,)) for u in inputs]
            return np.stack(cols, axis=1)

        return Jet2(stack(0), stack(1), stack(2)), squeeze

    @staticmethod
    def _unstack(u: Jet2, squeeze: bool) -> Jet2:
        return u.take(0) if squeeze else u

    @staticmethod
    def _affine(layer: Layer, a: Jet2) -> Jet2:
        w_t = layer.weight.T
        return Jet2(a.val @ w_t + layer.bias, a.d1 @ w_t, a.d2 @ w_t)

    def _affine_tangent(self, layer: Layer, a: Jet2, da: Jet2 | None) -> Jet2:
        """Tangent of ``W a + b`` in all parameters, shape ``(N, d_out, P)``."""
        d_out, d_in = layer.weight.shape
        n_points = np.shape(a.val)[0]
        rows = np.repeat(np.arange(d_out), d_in)
        cols = layer.weight_offset + np.arange(d_out * d_in)
        k_idx = np.tile(np.arange(d_in), d_out)

        channels = []
        upstream = da.as_tuple() if da is not None else (None, None, None)
        for a_c, da_c in zip(a.as_tuple(), upstream):
            if da_c is None:
                dz = np.zeros((n_points, d_out, self.n_params))
            else:
                dz = np.matmul(layer.weight, da_c)
            dz[:, rows, cols] += np.asarray(a_c)[:, k_idx]
            channels.append(dz)

        bias_rows = np.arange(d_out)
        channels[0][:, bias_rows, layer.bias_offset + bias_rows] += 1.0
        return Jet2(channels[0], channels[1], channels[2])

    def copy(self) -> "MLP":
        """Deep copy with its own parameter vector."""
        return MLP(self.layer_sizes, self.params.copy(), self.activation)

    def save_params(self, path: Path) -> None:
        """Write the flat parameter vector as text, one value per line."""
        np.savetxt(path, self.params, fmt="%.17e")

    def load_params(self, path: Path) -> None:
        """
        Load a vector written by ``save_params`` into this network in place.

        Raises:
            NetworkShapeError: File holds the wrong number of values
        """
        values = np.atleast_1d(np.loadtxt(path, dtype=np.float64))
        if values.shape != self.params.shape:
            raise NetworkShapeError(
                f"Expected {self.n_params} parameters in {path}, got {values.size}"
            )
        self.params[...] = values

    def __repr__(self) -> str:
        """Detailed representation."""
        return f"MLP(layer_sizes={list(self.layer_sizes)}, n_params={self.n_params}, activation={self.activation!r})"


def _first_column(a: Jet2) -> Jet2:
    return Jet2(np.asarray(a.val)[:, 0], np.asarray(a.d1)[:, 0], np.asarray(a.d2)[:, 0])
