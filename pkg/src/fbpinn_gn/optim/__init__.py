"""Optimizers: Adam and block-sparse regularized Gauss–Newton."""

from fbpinn_gn.optim.adam import AdamConfig, AdamState, adam_step
from fbpinn_gn.optim.gauss_newton import (
    GnConfig,
    GnDiagnostics,
    gauss_newton_direction,
    gn_step,
    gn_update,
    gram_matrix,
)
from fbpinn_gn.optim.gram import BlockSymMatrix, GramAssemblyError, assemble_gram
from fbpinn_gn.optim.solvers import (
    BlockCGSolver,
    DenseCholeskySolver,
    LinearSolver,
    SolveResult,
    SolverError,
    SolverKind,
    make_solver,
)
from fbpinn_gn.optim.trainer import (
    HISTORY_COLUMNS,
    IterationRecord,
    NonFiniteLossError,
    StoppingCriteria,
    TrainingTrace,
    iterations_to_reach,
    run_optimizer,
)

__all__ = [
    "AdamConfig",
    "AdamState",
    "BlockCGSolver",
    "BlockSymMatrix",
    "DenseCholeskySolver",
    "GnConfig",
    "GnDiagnostics",
    "GramAssemblyError",
    "HISTORY_COLUMNS",
    "IterationRecord",
    "LinearSolver",
    "NonFiniteLossError",
    "SolveResult",
    "SolverError",
    "SolverKind",
    "StoppingCriteria",
    "TrainingTrace",
    "adam_step",
    "assemble_gram",
    "gauss_newton_direction",
    "gn_step",
    "gn_update",
    "gram_matrix",
    "iterations_to_reach",
    "make_solver",
    "run_optimizer",
]
