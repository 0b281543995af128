"""
Configuration loader for the galine engine
"""
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv


def _coerce(raw: str, like: Any) -> Any:
    """Cast an environment string to the type of the YAML value it overrides"""
    if isinstance(like, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(like, int):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    return raw


class Config:
    """Configuration manager"""

    def __init__(self, config_path: str = "config.yaml"):
        """
        Load configuration from YAML file and environment variables

        Args:
            config_path: Path to config.yaml file
        """
        self.config_path = Path(config_path)
        load_dotenv()

        if not self.config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")

        with open(self.config_path, "r", encoding="utf-8") as f:
            self._config = yaml.safe_load(f) or {}

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value with dot notation support

        Args:
            key: Configuration key (e.g., 'integrator.dt')
            default: Default value if key not found

        Returns:
            Configuration value; an environment variable such as
            INTEGRATOR_DT takes precedence
        """
        value: Any = self._config
        for k in key.split("."):
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    break
            else:
                value = None
                break
        if value is None:
            value = default

        env_value = os.getenv(key.upper().replace(".", "_"))
        if env_value is not None:
            return _coerce(env_value, value)
        return value

    def get_section(self, section: str) -> Dict[str, Any]:
        return self._config.get(section, {})

    @property
    def all(self) -> Dict[str, Any]:
        return self._config


# Singleton instance
_config: Optional[Config] = None


def get_config(config_path: str = "config.yaml") -> Config:
    """Get or create the configuration instance"""
    global _config
    if _config is None:
        _config = Config(config_path)
    return _config


def reset_config() -> None:
    global _config
    _config = None
