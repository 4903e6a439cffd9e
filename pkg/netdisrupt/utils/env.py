"""Environment settings: .env loading, worker count and log level."""

from __future__ import annotations

import logging
import os

from dotenv import load_dotenv

from netdisrupt.errors import ConfigError

THREADS_VAR = "NETDISRUPT_THREADS"
LOG_LEVEL_VAR = "NETDISRUPT_LOG_LEVEL"

_loaded = False


def load_environment() -> None:
    """Load a .env file from the working directory once; real environment variables win."""
    global _loaded
    if not _loaded:
        load_dotenv(override=False)
        _loaded = True


def thread_count(override: int | None = None) -> int | None:
    """Worker count for parallel sections; None lets the executor pick."""
    if override is not None:
        if override < 1:
            raise ConfigError(f"thread count must be a positive integer, got {override!r}")
        return override
    load_environment()
    raw = os.getenv(THREADS_VAR)
    if not raw:
        return None
    try:
        threads = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_VAR} must be a positive integer, got {raw!r}") from exc
    if threads < 1:
        raise ConfigError(f"{THREADS_VAR} must be a positive integer, got {raw!r}")
    return threads


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Set up the root handler; flags beat NETDISRUPT_LOG_LEVEL, which beats INFO."""
    load_environment()
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        level = logging.getLevelName(os.getenv(LOG_LEVEL_VAR, "INFO").upper())
        if not isinstance(level, int):
            level = logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
