import pytest

from src.utils.config import THREADS_ENV_VAR, Settings, default_thread_count
from src.utils.exceptions import ConfigurationError


def test_default_threads():
    """Test the thread cap falls back to the CPU count"""
    settings = Settings.from_env({})

    assert settings.threads == default_thread_count()
    assert 1 <= settings.threads <= 8


def test_threads_from_environment():
    """Test FOCKHERALD_THREADS overrides the thread cap"""
    assert Settings.from_env({THREADS_ENV_VAR: "3"}).threads == 3
    assert Settings.from_env({THREADS_ENV_VAR: " "}).threads == default_thread_count()


def test_invalid_threads():
    """Test malformed thread caps"""
    with pytest.raises(ConfigurationError):
        Settings.from_env({THREADS_ENV_VAR: "many"})
    with pytest.raises(ConfigurationError):
        Settings.from_env({THREADS_ENV_VAR: "0"})


def test_with_seed():
    """Test overriding the seed keeps other settings"""
    settings = Settings(threads=2).with_seed(99)

    assert settings.seed == 99
    assert settings.threads == 2


def test_settings_fields():
    """Test settings carry only values read outside their own module"""
    assert set(Settings.__dataclass_fields__) == {
        'tolerance', 'search_starts', 'search_tolerance', 'search_max_sweeps', 'seed', 'threads'
    }
