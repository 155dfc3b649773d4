"""Adam with bias correction on flat parameter vectors."""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray


@dataclass(frozen=True)
class AdamConfig:
    """
    Adam hyperparameters.

    Attributes:
        lr: Learning rate
        beta1: First-moment decay
        beta2: Second-moment decay
        eps: Denominator offset
    """

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        """Validate hyperparameters."""
        if self.lr <= 0:
            raise ValueError(f"Learning rate must be positive, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f"Betas must lie in [0, 1), got ({self.beta1}, {self.beta2})")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    def init_state(self, n_params: int) -> "AdamState":
        """Fresh state for ``n_params`` parameters."""
        return AdamState(
            m=np.zeros(n_params),
            v=np.zeros(n_params),
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
        )


@dataclass
class AdamState:
    """
    Moment estimates and step counter.

    Attributes:
        m: First-moment estimate
        v: Second-moment estimate (componentwise non-negative)
        t: Number of steps taken
    """

    m: NDArray[np.float64]
    v: NDArray[np.float64]
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    last_step: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        """Validate state shapes."""
        if self.m.shape != self.v.shape:
            raise ValueError(f"Moment shapes differ: {self.m.shape} vs {self.v.shape}")


def adam_step(
    state: AdamState,
    params: NDArray[np.float64],
    grad: NDArray[np.float64],
) -> NDArray[np.float64]:
    """
    One Adam update.

    ``state`` is advanced in place; the returned vector is new.

    Args:
        state: Optimizer state
        params: Current parameters
        grad: Loss gradient at ``params``

    Returns:
        Updated parameters
    """
    g = np.asarray(grad, dtype=np.float64)
    if g.shape != state.m.shape or np.shape(params) != state.m.shape:
        raise ValueError(
            f"Shape mismatch: params {np.shape(params)}, grad {g.shape}, state {state.m.shape}"
        )
    state.t += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * g
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * g * g
    m_hat = state.m / (1.0 - state.beta1**state.t)
    v_hat = state.v / (1.0 - state.beta2**state.t)
    state.last_step = -state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return np.asarray(params, dtype=np.float64) + state.last_step
