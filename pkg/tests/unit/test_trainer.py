"""Unit tests for the training loop."""

import numpy as np
import pytest

from fbpinn_gn.optim.adam import AdamConfig
from fbpinn_gn.optim.gauss_newton import GnConfig
from fbpinn_gn.optim.trainer import (
    HISTORY_COLUMNS,
    NonFiniteLossError,
    StoppingCriteria,
    TrainingTrace,
    iterations_to_reach,
    run_optimizer,
)


@pytest.mark.unit
class TestStoppingCriteria:
    """Test stopping criteria validation."""

    @pytest.mark.parametrize("kwargs", [{"max_iters": -1}, {"max_iters": 5, "loss_tol": -1.0}])
    def test_invalid(self, kwargs):
        """Test negative limits are rejected."""
        with pytest.raises(ValueError):
            StoppingCriteria(**kwargs)


@pytest.mark.unit
class TestRunOptimizer:
    """Test the shared full-batch loop."""

    def test_records_every_iterate(self, model_1d, mild_ode, colloc_1d):
        """Test max_iters updates give max_iters + 1 records starting at 0."""
        trace = run_optimizer(model_1d, mild_ode, colloc_1d, GnConfig(), StoppingCriteria(max_iters=3))

        assert trace.method == "gn"
        assert [r.iteration for r in trace.records] == [0, 1, 2, 3]
        assert trace.records[0].step_norm == 0.0
        assert trace.records[1].step_norm > 0.0
        assert not trace.reached_tol
        np.testing.assert_array_equal(trace.final_params, model_1d.params())

    def test_zero_iterations(self, model_1d, mild_ode, colloc_1d):
        """Test max_iters = 0 evaluates the initial iterate only."""
        before = model_1d.params()
        trace = run_optimizer(model_1d, mild_ode, colloc_1d, AdamConfig(), StoppingCriteria(max_iters=0))

        assert trace.iterations == 1
        np.testing.assert_array_equal(model_1d.params(), before)

    def test_stops_below_tolerance(self, model_1d, mild_ode, colloc_1d):
        """Test that the loop stops as soon as the loss is below loss_tol."""
        trace = run_optimizer(
            model_1d, mild_ode, colloc_1d, GnConfig(), StoppingCriteria(max_iters=50, loss_tol=1e12)
        )

        assert trace.reached_tol
        assert trace.iterations == 1

    def test_adam_lowers_loss(self, model_1d, mild_ode, colloc_1d):
        """Test Adam reduces the loss over a short run."""
        trace = run_optimizer(
            model_1d, mild_ode, colloc_1d, AdamConfig(lr=1e-2), StoppingCriteria(max_iters=50)
        )

        assert trace.method == "adam"
        assert trace.final_loss < trace.losses[0]
        assert all(r.cg_iters == 0 for r in trace.records)

    def test_cg_iteration_counts_recorded(self, model_1d, mild_ode, colloc_1d):
        """Test CG iterations and capped solves appear in the trace."""
        method = GnConfig(solver="block_cg", cg_tol=1e-14, cg_max_iter=1)
        trace = run_optimizer(model_1d, mild_ode, colloc_1d, method, StoppingCriteria(max_iters=2))

        assert [r.cg_iters for r in trace.records] == [0, 1, 1]
        assert trace.unconverged_solves == 2

    def test_callback_receives_records(self, model_1d, mild_ode, colloc_1d, mocker):
        """Test the callback is invoked once per record."""
        callback = mocker.Mock()

        trace = run_optimizer(
            model_1d, mild_ode, colloc_1d, GnConfig(), StoppingCriteria(max_iters=2), callback=callback
        )

        assert callback.call_count == 3
        assert callback.call_args_list[-1].args[0] is trace.records[-1]

    def test_non_finite_loss(self, model_1d, mild_ode, colloc_1d):
        """Test NaN parameters abort with the partial trace attached."""
        model_1d.set_params(np.full(model_1d.n_params, np.nan))

        with pytest.raises(NonFiniteLossError) as exc_info:
            run_optimizer(model_1d, mild_ode, colloc_1d, GnConfig(), StoppingCriteria(max_iters=3))

        assert exc_info.value.iteration == 0
        assert exc_info.value.trace.iterations == 0

    def test_deterministic_history(self, decomposition_1d, mild_ode, colloc_1d):
        """Test identical inputs give identical loss histories."""
        from fbpinn_gn.models.fbpinn import FbpinnModel
        from fbpinn_gn.models.mlp import InitScheme

        histories = []
        for _ in range(2):
            model = FbpinnModel.create(decomposition_1d, [1, 5, 1], mild_ode.constraint, InitScheme(seed=1))
            trace = run_optimizer(model, mild_ode, colloc_1d, GnConfig(), StoppingCriteria(max_iters=3))
            histories.append(trace.history_rows())

        assert histories[0] == histories[1]
        assert len(histories[0][0]) == len(HISTORY_COLUMNS)


@pytest.mark.unit
class TestIterationsToReach:
    """Test the first-hit helper."""

    def test_first_hit(self):
        """Test the first index at or below the level."""
        assert iterations_to_reach(np.array([5.0, 3.0, 1.0, 0.5, 1.0]), 1.0) == 2

    def test_never_reached(self):
        """Test None when the level is never reached."""
        assert iterations_to_reach(np.array([5.0, 3.0]), 1.0) is None

    def test_empty_trace(self):
        """Test an empty trace never reaches anything."""
        trace = TrainingTrace(method="gn")

        assert iterations_to_reach(trace, 1.0) is None
        assert np.isnan(trace.final_loss)
