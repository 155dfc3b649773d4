"""Unit tests for utility functions."""

import numpy as np
import pytest

from fbpinn_gn.lib.utils import Timer, chunk_slices, ensure_directory, spawn_rngs


class TestChunkSlices:
    """Test chunk_slices function."""

    def test_chunk_slices_evenly_divisible(self):
        """Test chunking with evenly divisible items."""
        assert chunk_slices(6, 2) == [slice(0, 2), slice(2, 4), slice(4, 6)]

    def test_chunk_slices_with_remainder(self):
        """Test chunking with remainder items."""
        assert chunk_slices(5, 2) == [slice(0, 2), slice(2, 4), slice(4, 5)]

    def test_chunk_slices_larger_chunk_size(self):
        """Test chunk size larger than the range."""
        assert chunk_slices(3, 10) == [slice(0, 3)]

    def test_chunk_slices_empty(self):
        """Test chunking an empty range."""
        assert chunk_slices(0, 5) == []

    def test_chunk_slices_invalid_size(self):
        """Test that the chunk size must be positive."""
        with pytest.raises(ValueError, match="positive"):
            chunk_slices(5, 0)


class TestSpawnRngs:
    """Test spawn_rngs function."""

    def test_spawn_rngs_reproducible(self):
        """Test that the same master seed gives the same streams."""
        a = [rng.random(3) for rng in spawn_rngs(7, 3)]
        b = [rng.random(3) for rng in spawn_rngs(7, 3)]

        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_spawn_rngs_independent_streams(self):
        """Test that children draw different values."""
        first, second = spawn_rngs(7, 2)

        assert not np.array_equal(first.random(5), second.random(5))

    def test_spawn_rngs_prefix_stable(self):
        """Test that adding children keeps the existing streams."""
        short = spawn_rngs(3, 2)[1].random(4)
        long = spawn_rngs(3, 5)[1].random(4)

        np.testing.assert_array_equal(short, long)

    def test_spawn_rngs_negative_seed(self):
        """Test that seeds must be non-negative."""
        with pytest.raises(ValueError, match="non-negative"):
            spawn_rngs(-1, 2)


class TestTimer:
    """Test Timer context manager."""

    def test_timer_measures_time(self):
        """Test that the timer records a non-negative duration."""
        with Timer("test") as timer:
            sum(range(1000))

        assert timer.elapsed is not None
        assert timer.elapsed >= 0.0
        assert timer.elapsed_ms == pytest.approx(timer.elapsed * 1000)

    def test_timer_before_use(self):
        """Test that an unused timer reports zero milliseconds."""
        assert Timer().elapsed_ms == 0.0


class TestEnsureDirectory:
    """Test ensure_directory function."""

    def test_creates_nested_directories(self, tmp_path):
        """Test that parents are created and the path is returned."""
        target = tmp_path / "a" / "b" / "c"

        assert ensure_directory(target) == target
        assert target.is_dir()

    def test_existing_directory(self, tmp_path):
        """Test that existing directories are left alone."""
        assert ensure_directory(tmp_path) == tmp_path
