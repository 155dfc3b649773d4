"""Storage and file path configuration."""

import os
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class StorageConfig:
    """Configuration for file storage."""

    # Base directory
    home_dir: Path

    # Subdirectories (derived from home_dir)
    log_dir: Path

    # Default parent of run directories
    runs_dir: Path

    @classmethod
    def from_env(cls) -> "StorageConfig":
        """Create config from environment variables."""
        home_dir_str = os.getenv("FBPINN_HOME")
        home_dir = Path(home_dir_str) if home_dir_str else Path.home() / ".fbpinn_gn"

        return cls(
            home_dir=home_dir,
            log_dir=home_dir / "logs",
            runs_dir=Path(os.getenv("FBPINN_RUNS_DIR", "runs")),
        )

    def ensure_directories(self) -> None:
        """Create the home and log directories."""
        from fbpinn_gn.lib.utils import ensure_directory

        ensure_directory(self.home_dir)
        ensure_directory(self.log_dir)

    def validate(self) -> None:
        """Validate configuration."""
        if not str(self.runs_dir).strip():
            raise ValueError("Runs directory cannot be empty")

    def run_dir(self, name: str) -> Path:
        """Get the default directory for a named run."""
        return self.runs_dir / name
