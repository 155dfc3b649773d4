"""Full-batch training loop shared by Adam and Gauss–Newton."""

import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.lib.logger import get_structured_logger
from fbpinn_gn.models.protocols import PinnModel
from fbpinn_gn.optim.adam import AdamConfig, adam_step
from fbpinn_gn.optim.gauss_newton import GnConfig, gn_update
from fbpinn_gn.problems.base import Problem
from fbpinn_gn.problems.collocation import CollocationSet

logger = get_structured_logger(__name__, log_file="training.log")


@dataclass(frozen=True)
class StoppingCriteria:
    """
    When to stop training.

    Attributes:
        max_iters: Maximum number of parameter updates
        loss_tol: Stop as soon as the loss drops below this value
    """

    max_iters: int
    loss_tol: float = 0.0

    def __post_init__(self) -> None:
        """Validate criteria."""
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be non-negative, got {self.max_iters}")
        if self.loss_tol < 0:
            raise ValueError(f"loss_tol must be non-negative, got {self.loss_tol}")


@dataclass(frozen=True)
class IterationRecord:
    """One evaluated iterate and the update that produced it."""

    iteration: int
    loss: float
    grad_norm: float
    step_norm: float
    cg_iters: int
    time_s: float


HISTORY_COLUMNS = ("iter", "loss", "grad_norm", "step_norm", "cg_iters")


@dataclass
class TrainingTrace:
    """
    History of a training run.

    Attributes:
        method: ``adam`` or ``gn``
        records: One record per evaluated iterate, the initial one included
        final_params: Parameters at the last recorded iterate
        reached_tol: Whether the loss dropped below ``loss_tol``
        unconverged_solves: Number of CG solves that hit their iteration cap
    """

    method: str
    records: list[IterationRecord] = field(default_factory=list)
    final_params: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    reached_tol: bool = False
    unconverged_solves: int = 0

    @property
    def iterations(self) -> int:
        """Number of recorded iterates."""
        return len(self.records)

    @property
    def losses(self) -> NDArray[np.float64]:
        return np.array([r.loss for r in self.records])

    @property
    def final_loss(self) -> float:
        return self.records[-1].loss if self.records else float("nan")

    @property
    def wall_time_s(self) -> float:
        return self.records[-1].time_s if self.records else 0.0

    def history_rows(self) -> list[tuple[int, float, float, float, int]]:
        """Rows for the loss-history table (columns ``HISTORY_COLUMNS``)."""
        return [(r.iteration, r.loss, r.grad_norm, r.step_norm, r.cg_iters) for r in self.records]

    def timing_rows(self) -> list[tuple[int, float]]:
        return [(r.iteration, r.time_s) for r in self.records]


class NonFiniteLossError(RuntimeError):
    """Raised when the loss becomes NaN or infinite during training.

    Attributes:
        iteration: Iteration at which the loss was evaluated
        trace: Trace up to (excluding) the offending iterate
    """

    def __init__(self, iteration: int, loss: float, trace: TrainingTrace):
        super().__init__(f"Non-finite loss {loss} at iteration {iteration}")
        self.iteration = iteration
        self.loss = loss
        self.trace = trace


def iterations_to_reach(history: TrainingTrace | NDArray[np.float64], level: float) -> int | None:
    """
    First iteration whose loss is at or below ``level``.

    Args:
        history: Trace or array of per-iteration losses
        level: Loss level

    Returns:
        Iteration index, or None when the level is never reached
    """
    losses = history.losses if isinstance(history, TrainingTrace) else np.asarray(history)
    hits = np.flatnonzero(losses <= level)
    return int(hits[0]) if hits.size else None


def run_optimizer(
    model: PinnModel,
    problem: Problem,
    colloc: CollocationSet,
    method: AdamConfig | GnConfig,
    stop: StoppingCriteria,
    log_every: int = 100,
    callback: Callable[[IterationRecord], None] | None = None,
) -> TrainingTrace:
    """
    Train ``model`` with full-batch Adam or Gauss–Newton.

    Every iterate ``θ_0, θ_1, ...`` is evaluated and recorded; the loop stops
    after recording when the loss is below ``stop.loss_tol`` or after
    ``stop.max_iters`` updates. The model holds the final parameters on return.

    Args:
        model: Model to train in place
        problem: Boundary-value problem
        colloc: Collocation points
        method: ``AdamConfig`` or ``GnConfig``
        stop: Stopping criteria
        log_every: Log at INFO every this many iterations
        callback: Called with each new record

    Returns:
        TrainingTrace

    Raises:
        NonFiniteLossError: Loss became NaN or infinite
        SolverError: Gauss–Newton Cholesky factorization failed
    """
    is_gn = isinstance(method, GnConfig)
    trace = TrainingTrace(method="gn" if is_gn else "adam")
    adam_state = method.init_state(model.n_params) if isinstance(method, AdamConfig) else None
    solver = method.build_solver() if isinstance(method, GnConfig) else None

    logger.info(
        "Starting training",
        method=trace.method,
        problem=problem.name,
        n_params=model.n_params,
        n_points=colloc.n_points,
        max_iters=stop.max_iters,
        loss_tol=stop.loss_tol,
    )

    start = time.perf_counter()
    step_norm, cg_iters = 0.0, 0
    for iteration in range(stop.max_iters + 1):
        jac = model.jacobian(problem, colloc.points)
        loss = jac.loss()
        if not np.isfinite(loss):
            trace.final_params = model.params()
            logger.error("Non-finite loss, aborting", iteration=iteration, loss=str(loss))
            raise NonFiniteLossError(iteration, loss, trace)

        grad = jac.gradient()
        record = IterationRecord(
            iteration=iteration,
            loss=loss,
            grad_norm=float(np.linalg.norm(grad)),
            step_norm=step_norm,
            cg_iters=cg_iters,
            time_s=time.perf_counter() - start,
        )
        trace.records.append(record)
        logger.log_iteration(
            iteration,
            record.loss,
            record.grad_norm,
            record.step_norm,
            record.cg_iters,
            verbose=log_every > 0 and iteration % log_every == 0,
        )
        if callback is not None:
            callback(record)

        if loss < stop.loss_tol:
            trace.reached_tol = True
            break
        if iteration == stop.max_iters:
            break

        if isinstance(method, GnConfig):
            _, diagnostics, result = gn_update(model, jac, method, solver)
            step_norm, cg_iters = diagnostics.step_norm, result.iterations
            if solver is not None and result.iterations:
                logger.log_solver(solver.name, result.iterations, result.residual, result.converged)
            if not result.converged:
                trace.unconverged_solves += 1
        else:
            assert adam_state is not None
            theta = adam_step(adam_state, model.params(), grad)
            model.set_params(theta)
            step_norm, cg_iters = float(np.linalg.norm(adam_state.last_step)), 0

    trace.final_params = model.params()
    logger.info(
        "Training finished",
        method=trace.method,
        iterations=trace.iterations,
        final_loss=trace.final_loss,
        reached_tol=trace.reached_tol,
    )
    return trace
