"""Configuration management for FBPINN-GN."""

from dotenv import load_dotenv

from fbpinn_gn.lib.config.app_config import AppConfig
from fbpinn_gn.lib.config.storage_config import StorageConfig

# Load environment variables from .env file
load_dotenv()

# Load and validate process-level configs
app_config = AppConfig.from_env()
storage_config = StorageConfig.from_env()

app_config.validate()
storage_config.validate()

# Ensure directories
storage_config.ensure_directories()

__all__ = [
    "app_config",
    "storage_config",
    "AppConfig",
    "StorageConfig",
]
