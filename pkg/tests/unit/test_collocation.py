"""Unit tests for collocation point sets."""

import numpy as np
import pytest

from fbpinn_gn.problems.collocation import (
    CollocationSet,
    SamplingScheme,
    collocation_random,
    collocation_uniform,
)


@pytest.mark.unit
class TestUniformGrid:
    """Test equispaced grids."""

    def test_three_points(self):
        """Test N=3 gives -1, 0, 1."""
        np.testing.assert_array_equal(collocation_uniform(1, 3).points[:, 0], [-1.0, 0.0, 1.0])

    def test_thousand_points_include_endpoints(self):
        """Test N=1000 spans the closed interval with spacing 2/(N-1)."""
        colloc = collocation_uniform(1, 1000)

        assert colloc.n_points == 1000
        assert colloc.points[0, 0] == -1.0
        assert colloc.points[-1, 0] == 1.0
        np.testing.assert_allclose(np.diff(colloc.points[:, 0]), 2.0 / 999.0)

    def test_tensor_grid(self):
        """Test a 100x100 grid has 10^4 lexicographically sorted points."""
        colloc = collocation_uniform(2, [100, 100])
        order = np.lexsort(colloc.points.T[::-1])

        assert colloc.n_points == 10_000
        assert colloc.dim == 2
        np.testing.assert_array_equal(order, np.arange(10_000))

    def test_scalar_count_applies_per_axis(self):
        """Test that a single count applies to every axis."""
        assert len(collocation_uniform(2, 5)) == 25

    @pytest.mark.parametrize("dim,counts", [(1, 1), (2, [3, 1]), (2, [3]), (3, 4)])
    def test_invalid_counts(self, dim, counts):
        """Test counts below 2, wrong per-axis lengths and unsupported dimensions."""
        with pytest.raises(ValueError):
            collocation_uniform(dim, counts)

    def test_deterministic(self):
        """Test that grids do not depend on any state."""
        np.testing.assert_array_equal(collocation_uniform(2, 9).points, collocation_uniform(2, 9).points)


@pytest.mark.unit
class TestRandomPoints:
    """Test uniform random collocation."""

    def test_sorted_in_domain_and_seeded(self):
        """Test random points are in the domain, sorted and reproducible."""
        a = collocation_random(2, 200, np.random.default_rng(9))
        b = collocation_random(2, 200, np.random.default_rng(9))

        assert a.scheme is SamplingScheme.RANDOM
        assert np.all(np.abs(a.points) <= 1.0)
        np.testing.assert_array_equal(a.points, b.points)
        np.testing.assert_array_equal(np.lexsort(a.points.T[::-1]), np.arange(200))

    def test_non_positive_count(self):
        """Test that at least one point is required."""
        with pytest.raises(ValueError, match="positive"):
            collocation_random(1, 0, np.random.default_rng(0))


@pytest.mark.unit
class TestCollocationSet:
    """Test collocation set validation."""

    def test_points_outside_domain_rejected(self):
        """Test points outside [-1, 1]^dim are rejected."""
        with pytest.raises(ValueError, match="lie in"):
            CollocationSet(np.array([[0.0], [1.5]]))

    def test_non_finite_points_rejected(self):
        """Test NaN points are rejected."""
        with pytest.raises(ValueError, match="finite"):
            CollocationSet(np.array([[np.nan]]))

    def test_empty_set_rejected(self):
        """Test an empty set is rejected."""
        with pytest.raises(ValueError, match="non-empty"):
            CollocationSet(np.zeros((0, 1)))

    def test_permuted_keeps_points(self):
        """Test that permutation only reorders."""
        colloc = collocation_uniform(1, 11)
        shuffled = colloc.permuted(np.random.default_rng(0))

        np.testing.assert_array_equal(np.sort(shuffled.points[:, 0]), colloc.points[:, 0])
