"""Utility functions for FBPINN-GN."""

import time
from pathlib import Path
from typing import Any

import numpy as np

from fbpinn_gn.lib.logger import get_logger

logger = get_logger(__name__)


def chunk_slices(n: int, chunk_size: int) -> list[slice]:
    """
    Split ``range(n)`` into contiguous slices of at most ``chunk_size``.

    Example:
        >>> chunk_slices(5, 2)
        [slice(0, 2, None), slice(2, 4, None), slice(4, 5, None)]
    """
    if chunk_size <= 0:
        raise ValueError("Chunk size must be positive")
    return [slice(i, min(i + chunk_size, n)) for i in range(0, n, chunk_size)]


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """
    Fan a master seed out to ``count`` independent generators.

    Uses ``SeedSequence.spawn`` so that adding subdomains never correlates
    the streams of existing ones; each child drives a PCG64 generator.

    Args:
        seed: Master seed (non-negative)
        count: Number of child generators

    Returns:
        List of numpy Generators
    """
    if seed < 0:
        raise ValueError(f"Seed must be non-negative, got {seed}")
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


class Timer:
    """Simple context manager for timing operations."""

    def __init__(self, name: str = "Operation"):
        """
        Initialize timer.

        Args:
            name: Name of the operation being timed
        """
        self.name = name
        self.start_time: float | None = None
        self.end_time: float | None = None
        self.elapsed: float | None = None

    def __enter__(self) -> "Timer":
        """Start the timer."""
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, *args: Any) -> None:
        """Stop the timer and log the duration."""
        self.end_time = time.perf_counter()
        if self.start_time is not None:
            self.elapsed = self.end_time - self.start_time
            logger.debug(f"{self.name} took {self.elapsed:.2f} seconds")

    @property
    def elapsed_ms(self) -> float:
        """Get elapsed time in milliseconds."""
        if self.elapsed is not None:
            return self.elapsed * 1000
        return 0.0


def ensure_directory(dir_path: Path) -> Path:
    """
    Create a directory (and parents) if it does not exist.

    Args:
        dir_path: Directory to create

    Returns:
        The same path, for chaining
    """
    dir_path.mkdir(parents=True, exist_ok=True)
    return dir_path
