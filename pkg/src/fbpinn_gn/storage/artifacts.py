"""Run directory layout and artifact writers.

A run directory holds everything needed to regenerate the figures of a run
without retraining:

- ``config.yaml``: the run configuration as given
- ``loss_history.csv``: ``iter,loss,grad_norm,step_norm,cg_iters``
- ``timing.csv``: ``iter,time_s`` (wall clock, kept apart so the history is reproducible)
- ``solution.csv``: test-grid coordinates, ``u_pred``, ``u_exact``, ``abs_error``
- ``params.txt``: final flat parameter vector
- ``report.yaml``: run summary and file manifest
- ``gram_pattern.txt`` / ``gram_blocks.txt``: Gram sparsity (Gauss–Newton runs and ``gram``)
- ``windows.csv`` / ``decomposition.csv``: window samples and subdomain bounds

Seed sweeps add ``sweep.csv`` and ``sweep.yaml`` next to the per-seed run
directories.
"""

from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from numpy.typing import NDArray

from fbpinn_gn.lib.logger import get_logger
from fbpinn_gn.lib.utils import ensure_directory
from fbpinn_gn.optim.gram import BlockSymMatrix
from fbpinn_gn.optim.trainer import HISTORY_COLUMNS, TrainingTrace

logger = get_logger(__name__)

CONFIG_FILE = "config.yaml"
HISTORY_FILE = "loss_history.csv"
TIMING_FILE = "timing.csv"
SOLUTION_FILE = "solution.csv"
PARAMS_FILE = "params.txt"
REPORT_FILE = "report.yaml"
GRAM_PATTERN_FILE = "gram_pattern.txt"
GRAM_BLOCKS_FILE = "gram_blocks.txt"
WINDOWS_FILE = "windows.csv"
DECOMPOSITION_FILE = "decomposition.csv"
SWEEP_TABLE_FILE = "sweep.csv"
SWEEP_SUMMARY_FILE = "sweep.yaml"

SWEEP_COLUMNS = ("seed", "final_loss", "relative_error", "iterations", "reached_tol")

COORD_NAMES = ("x", "y")


class RunDirectory:
    """
    Writer for one run's artifacts.

    Every write records the file name in ``manifest`` so the report can list
    what the run produced.
    """

    def __init__(self, path: Path | str):
        """
        Initialize run directory (created if missing).

        Args:
            path: Directory for this run
        """
        self.path = ensure_directory(Path(path))
        self.manifest: list[str] = []

    def _target(self, name: str) -> Path:
        if name not in self.manifest:
            self.manifest.append(name)
        return self.path / name

    def write_config(self, config_text: str) -> Path:
        """Echo the configuration verbatim."""
        target = self._target(CONFIG_FILE)
        target.write_text(config_text, encoding="utf-8")
        return target

    def write_history(self, trace: TrainingTrace) -> Path:
        """Write the per-iteration loss history and the separate timing table."""
        target = self._target(HISTORY_FILE)
        rows = np.array(trace.history_rows(), dtype=np.float64).reshape(-1, len(HISTORY_COLUMNS))
        np.savetxt(
            target,
            rows,
            fmt=["%d", "%.17e", "%.17e", "%.17e", "%d"],
            delimiter=",",
            header=",".join(HISTORY_COLUMNS),
            comments="",
        )
        timing = np.array(trace.timing_rows(), dtype=np.float64).reshape(-1, 2)
        np.savetxt(
            self._target(TIMING_FILE),
            timing,
            fmt=["%d", "%.6f"],
            delimiter=",",
            header="iter,time_s",
            comments="",
        )
        return target

    def write_solution(
        self,
        points: NDArray[np.float64],
        pred: NDArray[np.float64],
        exact: NDArray[np.float64],
    ) -> Path:
        """Write prediction, exact solution and pointwise error on the test grid."""
        target = self._target(SOLUTION_FILE)
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        columns = [*COORD_NAMES[: pts.shape[1]], "u_pred", "u_exact", "abs_error"]
        table = np.column_stack([pts, pred, exact, np.abs(np.asarray(pred) - np.asarray(exact))])
        np.savetxt(target, table, fmt="%.17e", delimiter=",", header=",".join(columns), comments="")
        return target

    def write_params(self, params: NDArray[np.float64]) -> Path:
        target = self._target(PARAMS_FILE)
        np.savetxt(target, np.asarray(params, dtype=np.float64), fmt="%.17e")
        return target

    def write_report(self, report: dict[str, Any]) -> Path:
        """Write the run summary with the manifest of files written so far."""
        target = self._target(REPORT_FILE)
        payload = {**report, "files": list(self.manifest)}
        with open(target, "w", encoding="utf-8") as f:
            yaml.safe_dump(payload, f, sort_keys=False)
        return target

    def write_gram_pattern(
        self,
        gram: BlockSymMatrix,
        adjacency: set[tuple[int, int]],
        threshold: float = 1e-14,
    ) -> tuple[Path, Path]:
        """
        Write the Gram sparsity pattern.

        ``gram_pattern.txt`` starts with ``# n <P>`` and ``# nnz <count>``
        followed by one ``i j`` line per entry with ``|G_ij| > threshold``.
        ``gram_blocks.txt`` lists the stored block pairs ``k l`` (``k <= l``).
        """
        entries = gram.nonzero_entries(threshold)
        pattern = self._target(GRAM_PATTERN_FILE)
        np.savetxt(
            pattern,
            entries.reshape(-1, 2),
            fmt="%d",
            delimiter=" ",
            header=f"n {gram.n}\nnnz {len(entries)}",
        )

        blocks = self._target(GRAM_BLOCKS_FILE)
        pairs = np.array(sorted(adjacency), dtype=np.int64).reshape(-1, 2)
        np.savetxt(
            blocks,
            pairs,
            fmt="%d",
            delimiter=" ",
            header=f"n_blocks {gram.layout.n_blocks}\nblock_size {max(gram.layout.sizes)}",
        )
        logger.info(f"Wrote Gram pattern ({len(entries)} nonzeros, {len(pairs)} blocks) to {self.path}")
        return pattern, blocks

    def write_windows(self, points: NDArray[np.float64], values: NDArray[np.float64]) -> Path:
        """Write sampled window values, one column ``w_k`` per subdomain."""
        target = self._target(WINDOWS_FILE)
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        columns = [*COORD_NAMES[: pts.shape[1]], *(f"w_{k}" for k in range(values.shape[1]))]
        np.savetxt(
            target,
            np.column_stack([pts, values]),
            fmt="%.17e",
            delimiter=",",
            header=",".join(columns),
            comments="",
        )
        return target

    def write_decomposition(self, bounds: Sequence[dict[str, Any]]) -> Path:
        """Write the subdomain bounds table."""
        target = self._target(DECOMPOSITION_FILE)
        columns = list(bounds[0])
        table = np.array([[row[c] for c in columns] for row in bounds], dtype=np.float64)
        fmt = ["%d" if c in ("k", "i", "j") else "%.17e" for c in columns]
        np.savetxt(target, table, fmt=fmt, delimiter=",", header=",".join(columns), comments="")
        return target

    def write_sweep(self, rows: Sequence[dict[str, Any]], summary: dict[str, Any]) -> tuple[Path, Path]:
        """Write per-seed rows to ``sweep.csv`` and the statistics to ``sweep.yaml``."""
        table = self._target(SWEEP_TABLE_FILE)
        columns = list(SWEEP_COLUMNS)
        values = np.array([[float(row[c]) for c in columns] for row in rows], dtype=np.float64)
        np.savetxt(
            table,
            values.reshape(-1, len(columns)),
            fmt=["%d", "%.17e", "%.17e", "%d", "%d"],
            delimiter=",",
            header=",".join(columns),
            comments="",
        )
        stats = self._target(SWEEP_SUMMARY_FILE)
        with open(stats, "w", encoding="utf-8") as f:
            yaml.safe_dump(summary, f, sort_keys=False)
        return table, stats


def read_history(path: Path | str) -> NDArray[np.float64]:
    """Load a ``loss_history.csv`` as an ``(iterations, 5)`` array."""
    return np.atleast_2d(np.loadtxt(path, delimiter=",", skiprows=1))


def read_pattern(path: Path | str) -> tuple[int, NDArray[np.intp]]:
    """
    Load a ``gram_pattern.txt``.

    Returns:
        Tuple ``(n, entries)`` with ``entries`` of shape ``(nnz, 2)``
    """
    with open(path, encoding="utf-8") as f:
        header = f.readline().lstrip("#").split()
    n = int(header[1])
    entries = np.loadtxt(path, dtype=np.intp, comments="#", ndmin=2)
    return n, entries.reshape(-1, 2)
