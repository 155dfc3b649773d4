"""Error metrics and seed-sweep statistics."""

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray


def relative_l2_error(pred: NDArray[np.float64] | Sequence[float], exact: NDArray[np.float64] | Sequence[float]) -> float:
    """
    Discrete relative error ``‖pred - exact‖₂ / ‖exact‖₂``.

    Raises:
        ValueError: Length mismatch, or ``exact`` is identically zero
    """
    p = np.asarray(pred, dtype=np.float64).reshape(-1)
    e = np.asarray(exact, dtype=np.float64).reshape(-1)
    if p.shape != e.shape:
        raise ValueError(f"Prediction and exact values differ in length: {p.size} vs {e.size}")
    denom = float(np.linalg.norm(e))
    if denom == 0.0:
        raise ValueError("Relative error is undefined for an all-zero exact solution")
    return float(np.linalg.norm(p - e)) / denom


def summarize_errors(errors: Sequence[float]) -> dict[str, float]:
    """Median, best and worst of per-seed relative errors."""
    values = np.asarray(errors, dtype=np.float64)
    if values.size == 0:
        raise ValueError("No errors to summarize")
    return {
        "median": float(np.median(values)),
        "best": float(values.min()),
        "worst": float(values.max()),
    }
