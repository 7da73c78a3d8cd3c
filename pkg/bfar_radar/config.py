"""
Plain-text ``key=value`` configuration and seed resolution.

File format::

    # detector
    a = 1.0
    b = 20
    window = 40
    seed = 7

Blank lines and lines starting with ``#`` are ignored; keys are lower-cased
and ``-`` becomes ``_`` so they match CLI option names. Command-line flags
always win over the file, and the file over built-in defaults.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path

from bfar_radar.errors import ConfigError

logger = logging.getLogger(__name__)

#: Seed used when neither a flag, the config file, nor ``BFAR_SEED`` sets one.
DEFAULT_SEED = 42

#: Environment variable consulted when no seed is given explicitly.
SEED_ENV_VAR = "BFAR_SEED"


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def load_config(path: str | Path) -> dict[str, str]:
    """Parse a ``key=value`` file.

    Raises
    ------
    FileNotFoundError
        If *path* does not exist.
    ConfigError
        On a line without ``=``, an empty key, or a repeated key.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = normalize_key(key)
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value.strip()

    logger.debug(f"Loaded {len(values)} setting(s) from {path}")
    return values


def resolve_seed(seed: int | None) -> int:
    """Explicit *seed*, else ``$BFAR_SEED``, else :data:`DEFAULT_SEED`.

    Raises
    ------
    ConfigError
        If ``BFAR_SEED`` is set but not a non-negative integer, or *seed*
        is negative.
    """
    if seed is not None:
        if seed < 0:
            raise ConfigError(f"seed must be >= 0, got {seed}")
        return seed
    raw = os.environ.get(SEED_ENV_VAR, "").strip()
    if not raw:
        return DEFAULT_SEED
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ConfigError(f"{SEED_ENV_VAR} must be >= 0, got {value}")
    return value
