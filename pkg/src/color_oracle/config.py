"""Configuration management for color-oracle."""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from color_oracle.exceptions import ConfigurationError
from color_oracle.path_exact import Mode

VARIANTS = ("static", "dyn-fastquery", "dyn-fastupdate")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters for one CLI command."""

    command: str
    input_path: Optional[Path] = None
    k: int = 3
    seed: int = 0
    variant: str = "static"
    distortion: float = 384.0
    base: int = 4
    mode: Mode = Mode.EXACT
    window: int = 3
    output_path: Optional[Path] = None
    workload_path: Optional[Path] = None
    cover_attempts: int = 32
    sample_attempts: int = 10_000

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k}")
        if self.distortion < 1:
            raise ConfigurationError(f"distortion must be >= 1, got {self.distortion}")
        if self.base < 2:
            raise ConfigurationError(f"base must be >= 2, got {self.base}")
        if self.window < 0:
            raise ConfigurationError(f"window must be >= 0, got {self.window}")
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"variant must be one of {VARIANTS}, got {self.variant}")
        if self.cover_attempts < 1 or self.sample_attempts < 1:
            raise ConfigurationError("attempt budgets must be positive")


class Config:
    """Configuration loader and manager."""

    def __init__(self, config_path: Optional[Path] = None):
        """
        Initialize configuration.

        Args:
            config_path: Path to a YAML file. If None, uses ./color-oracle.yaml when
                present; packaged defaults always apply underneath.
        """
        self.config_path = config_path or self._find_config()
        self.data = self._load_defaults()
        if self.config_path is not None:
            self.data.update(self._load_config(self.config_path))

    def _find_config(self) -> Optional[Path]:
        """Find color-oracle.yaml in the current directory."""
        candidate = Path("color-oracle.yaml")
        return candidate if candidate.exists() else None

    def _load_defaults(self) -> Dict[str, Any]:
        return self._load_config(Path(__file__).parent / "defaults.yml")

    def _load_config(self, path: Path) -> Dict[str, Any]:
        """Load YAML config file."""
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f)
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"Failed to load config from {path}: {e}") from e
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config {path} must be a mapping")
        return data

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value."""
        return self.data.get(key, default)

    def distortion_for(self, k: int) -> float:
        """D = 8(1+epsilon)k when epsilon is set, else distortion_factor * k."""
        epsilon = self.get("epsilon")
        if epsilon is not None:
            return 8 * (1 + float(epsilon)) * k
        return float(self.get("distortion_factor", 128)) * k

    def run_config(self, command: str, **overrides: Any) -> RunConfig:
        """
        Merge config values with command-line flags; flags that are None fall back.

        Raises:
            ConfigurationError: a merged value is out of range
        """
        values = {key: value for key, value in overrides.items() if value is not None}
        k = int(values.pop("k", self.get("k", 3)))
        distortion = values.pop("distortion", None)
        try:
            return RunConfig(
                command=command,
                k=k,
                seed=int(values.pop("seed", self.get("seed", 0))),
                variant=values.pop("variant", self.get("variant", "static")),
                distortion=float(distortion) if distortion is not None else self.distortion_for(k),
                base=int(values.pop("base", self.get("base", 4))),
                mode=Mode(values.pop("mode", self.get("mode", "exact"))),
                window=int(values.pop("window", self.get("window", 3))),
                cover_attempts=int(self.get("cover_attempts", 32)),
                sample_attempts=int(self.get("sample_attempts", 10_000)),
                **values,
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"invalid run parameter: {e}") from e

    def __repr__(self) -> str:
        return f"Config(config_path={self.config_path})"


def load_config(config_path: Optional[Path] = None) -> Config:
    """
    Load configuration.

    Args:
        config_path: Optional path to a YAML config

    Returns:
        Config object
    """
    return Config(config_path)
