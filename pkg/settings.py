#!/usr/bin/env python3
"""
Runtime settings and logging setup for the ORE toolkit

Settings are read from the environment once; command-line flags override them.
"""

import os
import sys
import logging
from dataclasses import dataclass, replace
from functools import lru_cache

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass(frozen=True)
class Settings:
    parallelism: int = 4
    timeout: int = 30
    max_retries: int = 3
    max_redirects: int = 5
    user_agent: str = 'ore-toolkit/1.0 (+resource map harvester)'
    resourcemap_rel: str = 'resourcemap'
    tag_year: str = '2008'
    log_level: str = 'INFO'

    def with_overrides(self, **changes):
        """Return a copy with the non-None overrides applied"""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _int_env(name, default):
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        logging.getLogger(__name__).warning(f"Ignoring non-integer {name}={raw!r}")
        return default
    return max(1, value)


@lru_cache(maxsize=1)
def get_settings():
    """Settings from ORE_* environment variables"""
    defaults = Settings()
    return Settings(
        parallelism=_int_env('ORE_PARALLELISM', defaults.parallelism),
        timeout=_int_env('ORE_TIMEOUT', defaults.timeout),
        max_retries=_int_env('ORE_MAX_RETRIES', defaults.max_retries),
        user_agent=os.environ.get('ORE_USER_AGENT', defaults.user_agent),
        resourcemap_rel=os.environ.get('ORE_RESOURCEMAP_REL', defaults.resourcemap_rel).strip().lower(),
        tag_year=os.environ.get('ORE_TAG_YEAR', defaults.tag_year).strip(),
        log_level=os.environ.get('ORE_LOG_LEVEL', defaults.log_level).upper(),
    )


def setup_logging(level=None, log_file=None):
    """Configure root logging; stdout stays reserved for command output"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=level or get_settings().log_level,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
