"""Convergence acceptance runs for the published configurations.

Each preset is swept over five seeds; these runs take minutes to hours and
are deselected unless ``-m slow`` is given.
"""

import pytest

from fbpinn_gn.lib.config.run_config import RunConfig
from fbpinn_gn.optim.trainer import iterations_to_reach
from fbpinn_gn.services.experiment import ExperimentRunner, SweepSummary

N_SEEDS = 5


def sweep_preset(name: str, out_dir) -> SweepSummary:
    """Sweep a preset over seeds 0..N_SEEDS-1."""
    return ExperimentRunner(RunConfig.preset(name), out_dir / name).sweep(N_SEEDS)


@pytest.fixture(scope="module")
def sweeps_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def table1_gn(sweeps_dir):
    return sweep_preset("table1_gn", sweeps_dir)


@pytest.fixture(scope="module")
def table1_adam(sweeps_dir):
    return sweep_preset("table1_adam", sweeps_dir)


@pytest.fixture(scope="module")
def table2_gn(sweeps_dir):
    return sweep_preset("table2_gn", sweeps_dir)


@pytest.fixture(scope="module")
def table2_adam(sweeps_dir):
    return sweep_preset("table2_adam", sweeps_dir)


@pytest.mark.performance
@pytest.mark.slow
class TestHighFrequencyOde:
    """Test the 24-subdomain ODE runs."""

    def test_gauss_newton_accuracy(self, table1_gn):
        """Test the Gauss-Newton median error."""
        assert table1_gn.median_error <= 5e-3

    def test_adam_accuracy(self, table1_adam, table1_gn):
        """Test Adam is accurate but behind Gauss-Newton."""
        assert table1_adam.median_error <= 5e-2
        assert table1_adam.median_error > table1_gn.median_error

    def test_single_network_fails(self, sweeps_dir):
        """Test the undecomposed network does not resolve the high frequency."""
        summary = sweep_preset("baseline_pinn", sweeps_dir)

        assert summary.median_error >= 0.5

    def test_gauss_newton_iteration_advantage(self, table1_gn, table1_adam):
        """Test Gauss-Newton reaches Adam's final loss in a tenth of the iterations."""
        for gn, adam in zip(table1_gn.reports, table1_adam.reports):
            adam_iterations = len(adam.history) - 1
            reached = iterations_to_reach(gn.history, adam.final_loss)

            assert reached is not None
            assert reached <= adam_iterations / 10


@pytest.mark.performance
@pytest.mark.slow
class TestHelmholtz:
    """Test the 2x2 Helmholtz runs."""

    def test_gauss_newton_accuracy(self, table2_gn):
        """Test the Gauss-Newton median error and tolerance hits."""
        assert table2_gn.median_error <= 1e-3
        assert table2_gn.n_reached_tol >= 3

    def test_adam_accuracy(self, table2_adam):
        """Test the Adam median error."""
        assert table2_adam.median_error <= 2e-3
