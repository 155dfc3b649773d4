"""Problem lookup by run-config name."""

from fbpinn_gn.problems.base import Problem
from fbpinn_gn.problems.helmholtz import HelmholtzProblem
from fbpinn_gn.problems.ode import OdeProblem

# Classes, so ``PROBLEMS[name].dim`` is available without building a problem
PROBLEMS: dict[str, type[Problem]] = {
    "ode1d_hf": OdeProblem,
    "helmholtz2d": HelmholtzProblem,
}

PROBLEM_NAMES = tuple(PROBLEMS)


def get_problem(name: str, kappa: float | None = None) -> Problem:
    """
    Build a problem by name with its published parameters.

    Args:
        name: One of ``PROBLEM_NAMES``
        kappa: Constraint multiplier override (1D problem only)

    Raises:
        KeyError: Unknown name
    """
    if name not in PROBLEMS:
        raise KeyError(f"Unknown problem {name!r}, expected one of {list(PROBLEM_NAMES)}")
    if name == "ode1d_hf":
        return OdeProblem(frequency=16.0, kappa=kappa)
    return PROBLEMS[name]()
