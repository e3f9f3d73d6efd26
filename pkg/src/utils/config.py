"""
Runtime settings
Numerical tolerances, search defaults and the sweep thread cap
"""
import os
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from src.utils.exceptions import ConfigurationError


THREADS_ENV_VAR = "FOCKHERALD_THREADS"


@dataclass(frozen=True)
class Settings:
    """Tunable constants for the validator, the searches and the sweeps"""
    tolerance: float            = 1e-12
    search_starts: int          = 8
    search_tolerance: float     = 1e-6
    search_max_sweeps: int      = 6
    seed: int                   = 1234
    threads: int                = 1

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """
        Build settings, honouring FOCKHERALD_THREADS

        Args:
            environ: Mapping to read instead of os.environ

        Returns:
            Settings instance

        Raises:
            ConfigurationError: If the thread cap is not a positive integer
        """
        environ = os.environ if environ is None else environ
        raw     = environ.get(THREADS_ENV_VAR)

        if raw is None or raw.strip() == "":
            return cls(threads=default_thread_count())

        try:
            threads = int(raw)
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV_VAR} must be an integer, got '{raw}'")

        if threads < 1:
            raise ConfigurationError(f"{THREADS_ENV_VAR} must be positive, got {threads}")

        return cls(threads=threads)

    def with_seed(self, seed: int) -> "Settings":
        return replace(self, seed=seed)


def default_thread_count() -> int:
    return max(1, min(8, os.cpu_count() or 1))


DEFAULT_SETTINGS = Settings()
