"""Boundary-value problems and collocation sets."""

from fbpinn_gn.problems.base import Problem, seed_coordinates
from fbpinn_gn.problems.collocation import (
    CollocationSet,
    SamplingScheme,
    collocation_random,
    collocation_uniform,
)
from fbpinn_gn.problems.helmholtz import HelmholtzProblem, helmholtz_problem
from fbpinn_gn.problems.ode import OdeProblem, ode_problem
from fbpinn_gn.problems.registry import PROBLEM_NAMES, get_problem

__all__ = [
    "CollocationSet",
    "HelmholtzProblem",
    "OdeProblem",
    "PROBLEM_NAMES",
    "Problem",
    "SamplingScheme",
    "collocation_random",
    "collocation_uniform",
    "get_problem",
    "helmholtz_problem",
    "ode_problem",
    "seed_coordinates",
]
