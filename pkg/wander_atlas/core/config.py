"""
This module reads the run configuration from built-in defaults, a `.env` \
file and the process environment, in increasing order of priority.
"""

import os
from typing import Any, Union
from dotenv import dotenv_values

DEFAULTS = {
    "WANDER_ATLAS_THREADS": os.cpu_count() or 1,
    "WANDER_ATLAS_LOG_LEVEL": "WARNING",
    "WANDER_ATLAS_GRID": 2048,
    "WANDER_ATLAS_ESCAPE_RADIUS": 1e6,
    "WANDER_ATLAS_GREEN_TOL": 1e-10,
    "WANDER_ATLAS_MAX_ITER": 200,
}


def _coerce(key: str, value: Any) -> Any:
    kind = type(DEFAULTS[key])
    try:
        return kind(value)
    except (TypeError, ValueError):
        return DEFAULTS[key]


def get_config(env_file: Union[str, None] = ".env") -> dict:
    """
    Returns the merged configuration.

    Args:
        env_file (str, optional): Path of the dotenv file, or None to skip it. \
            Defaults to ".env".

    Returns:
        dict: Every key of DEFAULTS, coerced to the type of its default.
    """
    config = dict(DEFAULTS)
    sources = [dotenv_values(env_file) if env_file else {}, os.environ]
    for source in sources:
        for key in DEFAULTS:
            if source.get(key) not in (None, ""):
                config[key] = _coerce(key, source[key])
    return config


def thread_cap(override: Union[int, None] = None) -> int:
    """
    Returns the number of worker threads to use.

    Args:
        override (int, optional): Explicit cap, e.g. from --threads.

    Returns:
        int: A positive thread count.
    """
    if override is not None:
        return max(1, int(override))
    return max(1, get_config()["WANDER_ATLAS_THREADS"])
