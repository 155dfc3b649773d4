"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add src directory to Python path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from fbpinn_gn.domain.decomposition import Decomposition1D, Decomposition2D  # noqa: E402
from fbpinn_gn.lib.config.run_config import RunConfig  # noqa: E402
from fbpinn_gn.models.fbpinn import FbpinnModel  # noqa: E402
from fbpinn_gn.models.mlp import InitScheme  # noqa: E402
from fbpinn_gn.problems.collocation import collocation_uniform  # noqa: E402
from fbpinn_gn.problems.helmholtz import helmholtz_problem  # noqa: E402
from fbpinn_gn.problems.ode import OdeProblem, ode_problem  # noqa: E402


@pytest.fixture
def ode():
    """High-frequency 1D ODE (frequency 16)."""
    return ode_problem()


@pytest.fixture
def mild_ode():
    """Low-frequency variant of the 1D ODE, for finite-difference checks."""
    return OdeProblem(frequency=2.0)


@pytest.fixture
def helmholtz():
    """2D Helmholtz problem with k = 1."""
    return helmholtz_problem()


@pytest.fixture
def decomposition_1d():
    """Four overlapping subdomains of [-1, 1]."""
    return Decomposition1D(4, 0.5)


@pytest.fixture
def decomposition_2d():
    """2x2 tensor decomposition of [-1, 1]^2."""
    return Decomposition2D.from_counts(2, 2, 0.5, 0.5)


@pytest.fixture
def model_1d(decomposition_1d, mild_ode):
    """Small randomly initialized 1D FBPINN (K=4, [1, 5, 1])."""
    return FbpinnModel.create(decomposition_1d, [1, 5, 1], mild_ode.constraint, InitScheme(seed=7))


@pytest.fixture
def model_2d(decomposition_2d, helmholtz):
    """Small randomly initialized 2D FBPINN ((2, 2), [2, 4, 1])."""
    return FbpinnModel.create(decomposition_2d, [2, 4, 1], helmholtz.constraint, InitScheme(seed=3))


@pytest.fixture
def colloc_1d():
    """50-point uniform 1D grid."""
    return collocation_uniform(1, 50)


@pytest.fixture
def colloc_2d():
    """7x7 uniform 2D grid."""
    return collocation_uniform(2, [7, 7])


@pytest.fixture
def small_run_config():
    """Fast 1D Gauss-Newton run configuration."""
    return RunConfig.from_dict(
        {
            "problem": {"name": "ode1d_hf"},
            "model": {"kind": "fbpinn", "layer_sizes": [1, 5, 1], "subdomains": 4, "overlap": 0.5},
            "constraint": {"kappa": 2.0},
            "init": {"seed": 0},
            "optimizer": {"method": "gn", "eta": 1e-2, "mu": 1.0},
            "collocation": {"counts": 40},
            "stopping": {"max_iters": 3, "loss_tol": 0.0},
            "test_grid": {"counts": 101},
            "output": {"log_every": 1},
        }
    )


@pytest.fixture
def small_run_dict():
    """Fast 1D run configuration as it would appear in a YAML file."""
    return {
        "problem": {"name": "ode1d_hf"},
        "model": {"kind": "fbpinn", "layer_sizes": [1, 5, 1], "subdomains": 4, "overlap": 0.5},
        "init": {"seed": 0},
        "optimizer": {"method": "gn", "eta": "1e-2", "mu": 1.0},
        "collocation": {"counts": 30},
        "stopping": {"max_iters": 2, "loss_tol": 0.0},
        "test_grid": {"counts": 51},
    }


def breakpoints_1d(decomposition: Decomposition1D) -> list[float]:
    """Ramp/plateau breakpoints and support ends of a 1D decomposition."""
    points = []
    for k in range(decomposition.n_subdomains):
        a, b, r = decomposition.lower(k), decomposition.upper(k), decomposition.ramp
        points.extend([a, a + r, b - r, b])
    return points


def away_from_breakpoints(x, decomposition: Decomposition1D, margin: float):
    """Keep the entries of ``x`` farther than ``margin`` from every breakpoint."""
    x = np.asarray(x, dtype=np.float64)
    dist = np.min(np.abs(x[:, None] - np.array(breakpoints_1d(decomposition))[None, :]), axis=1)
    return x[dist > margin]


@pytest.fixture
def smooth_points():
    """Factory for random 1D points that stay off window breakpoints."""

    def factory(decomposition: Decomposition1D, n: int = 100, margin: float = 1e-3, seed: int = 0):
        rng = np.random.default_rng(seed)
        return away_from_breakpoints(rng.uniform(-0.99, 0.99, size=n), decomposition, margin)

    return factory


# Configure pytest markers
def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests (fast, no training)"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests (short training runs, files on disk)"
    )
    config.addinivalue_line(
        "markers", "performance: marks tests as performance benchmarks and accuracy reproductions"
    )
    config.addinivalue_line(
        "markers", "slow: marks tests as slow running"
    )
