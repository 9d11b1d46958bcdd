"""
Settings - configuration for searches, workers, cache and logging
Read with configparser; CLI flags and environment override the file
"""

import configparser
import os
from dataclasses import dataclass, replace
from typing import Optional

from services.errors import InvalidInputError
from services.logger import Logger

try:
    import psutil
    HAS_PSUTIL = True
except ImportError as e:
    HAS_PSUTIL = False
    Logger.debug(f"psutil not available: {e}. Falling back to os.cpu_count()")


CONFIG_ENV = "DAVENPORT_CONFIG"
CACHE_ENV = "DAVENPORT_CACHE"
DEFAULT_CONFIG_FILE = "davenport.ini"
DEFAULT_CACHE_FILE = "davenport_cache.jsonl"


def default_jobs() -> int:
    """Physical core count, or the logical count when psutil cannot tell"""
    count = None
    if HAS_PSUTIL:
        try:
            count = psutil.cpu_count(logical=False)
        except Exception as e:
            Logger.debug(f"psutil.cpu_count failed: {e}")
    if not count:
        count = os.cpu_count() or 1
    return max(1, int(count))


@dataclass(frozen=True)
class Settings:
    max_nodes: int = 5_000_000
    max_seconds: float = 600.0
    jobs: int = 1
    stratify_cap: int = 64
    e_constant_max_n: int = 21
    cache_path: str = DEFAULT_CACHE_FILE
    log_level: str = "WARNING"

    def with_overrides(self, **overrides) -> "Settings":
        """Copy with every non-None override applied"""
        clean = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **clean)


def _resolve_config_path(path: Optional[str]) -> Optional[str]:
    if path:
        return path
    env_path = os.environ.get(CONFIG_ENV)
    if env_path:
        return env_path
    if os.path.exists(DEFAULT_CONFIG_FILE):
        return DEFAULT_CONFIG_FILE
    return None


def load_settings(path: Optional[str] = None) -> Settings:
    """Load settings from an ini file; a missing default file means defaults"""
    defaults = Settings(jobs=default_jobs())
    config_path = _resolve_config_path(path)

    parser = configparser.ConfigParser()
    if config_path:
        if not os.path.exists(config_path):
            raise InvalidInputError(f"Config file not found: {config_path}", {'path': config_path})
        parser.read(config_path, encoding="utf-8")
        Logger.info(f"Loaded settings from {config_path}")

    try:
        settings = Settings(
            max_nodes=parser.getint("search", "max_nodes", fallback=defaults.max_nodes),
            max_seconds=parser.getfloat("search", "max_seconds", fallback=defaults.max_seconds),
            jobs=parser.getint("search", "jobs", fallback=defaults.jobs),
            stratify_cap=parser.getint("search", "stratify_cap", fallback=defaults.stratify_cap),
            e_constant_max_n=parser.getint("search", "e_constant_max_n", fallback=defaults.e_constant_max_n),
            cache_path=parser.get("cache", "path", fallback=defaults.cache_path),
            log_level=parser.get("logging", "level", fallback=defaults.log_level),
        )
    except ValueError as e:
        raise InvalidInputError(f"Bad value in {config_path}: {e}", {'path': config_path})

    env_cache = os.environ.get(CACHE_ENV)
    if env_cache:
        settings = settings.with_overrides(cache_path=env_cache)

    if settings.jobs < 1 or settings.max_nodes < 1 or settings.max_seconds <= 0:
        raise InvalidInputError("jobs, max_nodes and max_seconds must be positive")
    return settings
