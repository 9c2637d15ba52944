"""Configuration management for dynamap."""
import os
from typing import Mapping

import yaml
from dotenv import load_dotenv

load_dotenv()

CONFIG_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config.yaml")

_TOLERANCE_ENV = {
    'eq': 'DYNAMAP_TOL_EQ',
}


class Config:
    """Configuration class to load and access settings."""

    def __init__(self, config_path: str = CONFIG_PATH):
        """Load configuration from YAML file and apply environment overrides."""
        with open(config_path, 'r') as f:
            self._config = yaml.safe_load(f)

        for key, env_name in _TOLERANCE_ENV.items():
            value = os.getenv(env_name)
            if value:
                self._config['tolerances'][key] = float(value)

        level = os.getenv('DYNAMAP_LOG_LEVEL')
        if level:
            self._config['logging']['level'] = level.upper()

    @property
    def tolerances(self) -> dict:
        """Get tolerance configuration."""
        return self._config['tolerances']

    @property
    def sampling(self) -> dict:
        """Get state sampling configuration."""
        return self._config['sampling']

    @property
    def sweep(self) -> dict:
        """Get time sweep configuration."""
        return self._config['sweep']

    @property
    def demo(self) -> dict:
        """Get bundled demo scenario parameters."""
        return self._config['demo']

    @property
    def output(self) -> dict:
        """Get report output configuration."""
        return self._config['output']

    @property
    def logging(self) -> dict:
        """Get logging configuration."""
        return self._config['logging']

    @property
    def tol_herm(self) -> float:
        return float(self.tolerances['herm'])

    @property
    def tol_eq(self) -> float:
        return float(self.tolerances['eq'])

    @property
    def tol_psd(self) -> float:
        return float(self.tolerances['psd'])

    def override_tolerances(self, overrides: Mapping[str, float]):
        """
        Replace tolerance values.

        Args:
            overrides: Mapping with keys among 'herm', 'eq', 'psd'

        Raises:
            KeyError: On an unknown tolerance name
        """
        for key, value in overrides.items():
            if key not in self._config['tolerances']:
                raise KeyError(f"Unknown tolerance '{key}' (expected one of "
                               f"{', '.join(sorted(self._config['tolerances']))})")
            self._config['tolerances'][key] = float(value)


# Global config instance
config = Config()
