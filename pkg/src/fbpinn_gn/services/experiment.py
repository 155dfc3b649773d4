"""Experiment runner: config in, trained model, metrics and artifacts out."""

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.domain.decomposition import Decomposition, Decomposition1D, Decomposition2D
from fbpinn_gn.lib.config import storage_config
from fbpinn_gn.lib.config.run_config import RunConfig
from fbpinn_gn.lib.logger import get_structured_logger
from fbpinn_gn.lib.utils import Timer
from fbpinn_gn.models.fbpinn import FbpinnModel, VanillaPinnModel
from fbpinn_gn.models.mlp import InitKind, InitScheme
from fbpinn_gn.models.protocols import PinnModel
from fbpinn_gn.optim.adam import AdamConfig
from fbpinn_gn.optim.gauss_newton import GnConfig, gram_matrix
from fbpinn_gn.optim.trainer import NonFiniteLossError, StoppingCriteria, TrainingTrace, run_optimizer
from fbpinn_gn.problems.base import Problem
from fbpinn_gn.problems.collocation import (
    CollocationSet,
    SamplingScheme,
    collocation_random,
    collocation_uniform,
)
from fbpinn_gn.problems.registry import get_problem
from fbpinn_gn.services.metrics import relative_l2_error, summarize_errors
from fbpinn_gn.storage.artifacts import RunDirectory

logger = get_structured_logger(__name__, log_file="experiments.log")

# Spawn key of the collocation stream; subnet streams use keys 0..K-1
COLLOCATION_STREAM = 1_000_000

WINDOW_SAMPLES = {1: [1001], 2: [101, 101]}


@dataclass
class RunReport:
    """
    Outcome of one training run.

    Attributes:
        problem: Problem name
        method: ``adam`` or ``gn``
        model_kind: ``fbpinn`` or ``vanilla``
        seed: Master seed
        final_loss: Loss at the last recorded iterate
        relative_error: Relative l2 error on the test grid
        iterations: Number of recorded iterates (equals the loss-history length)
        reached_tol: Whether the loss dropped below the stopping tolerance
        wall_time_s: Training wall time
        n_params: Global parameter count
        unconverged_solves: CG solves that hit their iteration cap
        history: Per-iteration losses
        run_dir: Directory the artifacts were written to
        files: Artifact file names
    """

    problem: str
    method: str
    model_kind: str
    seed: int
    final_loss: float
    relative_error: float
    iterations: int
    reached_tol: bool
    wall_time_s: float
    n_params: int
    unconverged_solves: int = 0
    history: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0), repr=False)
    run_dir: Path | None = None
    files: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary (without the loss history)."""
        return {
            "problem": self.problem,
            "method": self.method,
            "model_kind": self.model_kind,
            "seed": self.seed,
            "final_loss": float(self.final_loss),
            "relative_error": float(self.relative_error),
            "iterations": self.iterations,
            "reached_tol": self.reached_tol,
            "wall_time_s": round(float(self.wall_time_s), 3),
            "n_params": self.n_params,
            "unconverged_solves": self.unconverged_solves,
        }


@dataclass
class SweepSummary:
    """Multi-seed statistics."""

    reports: list[RunReport]

    @property
    def seeds(self) -> list[int]:
        return [r.seed for r in self.reports]

    @property
    def errors(self) -> list[float]:
        return [r.relative_error for r in self.reports]

    @property
    def n_reached_tol(self) -> int:
        return sum(r.reached_tol for r in self.reports)

    @property
    def median_error(self) -> float:
        return summarize_errors(self.errors)["median"]

    def rows(self) -> list[dict[str, Any]]:
        return [
            {
                "seed": r.seed,
                "final_loss": r.final_loss,
                "relative_error": r.relative_error,
                "iterations": r.iterations,
                "reached_tol": int(r.reached_tol),
            }
            for r in self.reports
        ]

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        stats = summarize_errors(self.errors)
        return {
            "seeds": self.seeds,
            "relative_error": stats,
            "n_runs": len(self.reports),
            "n_reached_tol": self.n_reached_tol,
        }


def build_decomposition(config: RunConfig) -> Decomposition:
    """Decomposition described by the ``model`` section."""
    counts = config.per_axis(config.model.subdomains, "model.subdomains")
    overlaps = config.per_axis(config.model.overlap, "model.overlap")
    if config.dim == 1:
        return Decomposition1D(int(counts[0]), float(overlaps[0]))
    return Decomposition2D.from_counts(int(counts[0]), int(counts[1]), float(overlaps[0]), float(overlaps[1]))


def build_problem(config: RunConfig) -> Problem:
    return get_problem(config.problem.name, kappa=config.constraint.kappa)


def build_model(config: RunConfig, problem: Problem) -> PinnModel:
    """
    Freshly initialized model for ``config``.

    Subnet ``k`` draws its weights from child ``k`` of the master seed's
    ``SeedSequence``.
    """
    init = InitScheme(InitKind(config.init.scheme), config.init.seed)
    if config.model.kind == "vanilla":
        return VanillaPinnModel.create(config.model.layer_sizes, problem.constraint, init)
    return FbpinnModel.create(build_decomposition(config), config.model.layer_sizes, problem.constraint, init)


def collocation_rng(seed: int) -> np.random.Generator:
    """Generator for random collocation, independent of every subnet stream."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(COLLOCATION_STREAM,)))


def build_collocation(config: RunConfig) -> CollocationSet:
    counts = [int(c) for c in config.per_axis(config.collocation.counts, "collocation.counts")]
    if config.collocation.sampling == SamplingScheme.RANDOM.value:
        return collocation_random(config.dim, int(np.prod(counts)), collocation_rng(config.init.seed))
    return collocation_uniform(config.dim, counts)


def build_method(config: RunConfig) -> AdamConfig | GnConfig:
    opt = config.optimizer
    if opt.method == "adam":
        return AdamConfig(lr=opt.lr)
    return GnConfig(eta=opt.eta, mu=opt.mu, solver=opt.solver, cg_tol=opt.cg_tol, cg_max_iter=opt.cg_max_iter)


def export_gram_pattern(
    model: PinnModel,
    problem: Problem,
    colloc: CollocationSet,
    path: Path | str,
) -> tuple[Path, Path]:
    """
    Assemble the Gram matrix at the model's current parameters and write its pattern.

    Args:
        model: Model whose Jacobian is used
        problem: Boundary-value problem
        colloc: Collocation points
        path: Output directory

    Returns:
        Paths of ``gram_pattern.txt`` and ``gram_blocks.txt``
    """
    gram = gram_matrix(model, model.jacobian(problem, colloc.points))
    return RunDirectory(path).write_gram_pattern(gram, set(gram.stored_pairs()))


class ExperimentRunner:
    """
    Orchestrates one configured experiment.

    Builds the problem, model, collocation set and optimizer from a
    ``RunConfig``, trains, evaluates on the test grid and writes artifacts.
    """

    def __init__(
        self,
        config: RunConfig,
        out_dir: Path | str | None = None,
        config_text: str | None = None,
    ):
        """
        Initialize runner.

        Args:
            config: Validated run configuration
            out_dir: Run directory (default: ``output.directory``, then a name
                under ``storage_config.runs_dir``)
            config_text: Original config file contents, echoed verbatim into the run
        """
        self.config = config
        self.config_text = config_text if config_text is not None else config.to_yaml()
        self.out_dir = Path(out_dir) if out_dir is not None else self._default_dir()
        self.problem = build_problem(config)

    def _default_dir(self) -> Path:
        if self.config.output.directory:
            return Path(self.config.output.directory)
        name = f"{self.config.problem.name}_{self.config.model.kind}_{self.config.optimizer.method}_seed{self.config.init.seed}"
        return storage_config.run_dir(name)

    def run(self) -> RunReport:
        """
        Train and evaluate.

        Returns:
            RunReport

        Raises:
            NonFiniteLossError: Training diverged (the partial history is written first)
        """
        cfg = self.config
        logger.set_context(problem=cfg.problem.name, method=cfg.optimizer.method, seed=cfg.init.seed)
        run_dir = RunDirectory(self.out_dir)
        run_dir.write_config(self.config_text)

        model = build_model(cfg, self.problem)
        colloc = build_collocation(cfg)
        method = build_method(cfg)
        stop = StoppingCriteria(cfg.stopping.max_iters, cfg.stopping.loss_tol)
        logger.info(f"Run directory: {run_dir.path}", model=repr(model))

        try:
            with Timer("training") as timer:
                trace = run_optimizer(
                    model, self.problem, colloc, method, stop, log_every=cfg.output.log_every
                )
        except NonFiniteLossError as e:
            run_dir.write_history(e.trace)
            logger.error("Training aborted", iteration=e.iteration)
            logger.clear_context()
            raise

        test_points = collocation_uniform(cfg.dim, cfg.test_counts).points
        pred = model.field_values(test_points)
        exact = self.problem.exact(test_points)
        error = relative_l2_error(pred, exact)

        run_dir.write_history(trace)
        run_dir.write_solution(test_points, pred, exact)
        run_dir.write_params(trace.final_params)
        if isinstance(model, FbpinnModel):
            self._write_decomposition(run_dir, model.decomposition)
        if cfg.optimizer.method == "gn":
            gram = gram_matrix(model, model.jacobian(self.problem, colloc.points))
            run_dir.write_gram_pattern(gram, set(gram.stored_pairs()))

        report = self._report(trace, error, timer.elapsed or 0.0, model.n_params, run_dir)
        run_dir.write_report(report.to_dict())
        report.files = list(run_dir.manifest)

        logger.log_run_summary(report.final_loss, report.relative_error, report.iterations, report.wall_time_s)
        logger.clear_context()
        return report

    def _report(
        self,
        trace: TrainingTrace,
        error: float,
        wall_time: float,
        n_params: int,
        run_dir: RunDirectory,
    ) -> RunReport:
        cfg = self.config
        return RunReport(
            problem=cfg.problem.name,
            method=trace.method,
            model_kind=cfg.model.kind,
            seed=cfg.init.seed,
            final_loss=trace.final_loss,
            relative_error=error,
            iterations=trace.iterations,
            reached_tol=trace.reached_tol,
            wall_time_s=wall_time,
            n_params=n_params,
            unconverged_solves=trace.unconverged_solves,
            history=trace.losses,
            run_dir=run_dir.path,
        )

    @staticmethod
    def _write_decomposition(run_dir: RunDirectory, decomposition: Decomposition) -> None:
        samples = collocation_uniform(decomposition.dim, WINDOW_SAMPLES[decomposition.dim]).points
        if isinstance(decomposition, Decomposition1D):
            values = decomposition.window_values(samples[:, 0])
        else:
            assert isinstance(decomposition, Decomposition2D)
            values = decomposition.window_values(samples)
        run_dir.write_windows(samples, values)
        run_dir.write_decomposition(decomposition.bounds_table())

    def export_decomposition(self) -> RunDirectory:
        """Write ``windows.csv`` and ``decomposition.csv`` without training."""
        if self.config.model.kind != "fbpinn":
            raise ValueError("Only FBPINN configurations have a decomposition")
        run_dir = RunDirectory(self.out_dir)
        self._write_decomposition(run_dir, build_decomposition(self.config))
        return run_dir

    def export_gram_pattern(self) -> tuple[Path, Path]:
        """Write the Gram pattern of the freshly initialized model."""
        model = build_model(self.config, self.problem)
        return export_gram_pattern(model, self.problem, build_collocation(self.config), self.out_dir)

    def sweep(self, seeds: int | Sequence[int]) -> SweepSummary:
        """
        Repeat the run over several master seeds.

        Args:
            seeds: Explicit seeds, or a count ``n`` meaning ``seed, seed+1, ..., seed+n-1``

        Returns:
            SweepSummary (also written to ``sweep.csv`` and ``sweep.yaml``)
        """
        if isinstance(seeds, int):
            if seeds < 1:
                raise ValueError(f"Seed count must be positive, got {seeds}")
            seeds = [self.config.init.seed + i for i in range(seeds)]

        reports = []
        for seed in seeds:
            logger.info(f"Sweep run {len(reports) + 1}/{len(seeds)}", seed=seed)
            runner = ExperimentRunner(self.config.with_seed(seed), self.out_dir / f"seed_{seed}")
            reports.append(runner.run())

        summary = SweepSummary(reports)
        RunDirectory(self.out_dir).write_sweep(summary.rows(), summary.to_dict())
        logger.info(
            "Sweep finished",
            n_runs=len(reports),
            median_error=summary.median_error,
            n_reached_tol=summary.n_reached_tol,
        )
        return summary


def run_experiment(config: RunConfig, out_dir: Path | str | None = None) -> RunReport:
    """Run the experiment described by ``config`` and return its report."""
    return ExperimentRunner(config, out_dir).run()
