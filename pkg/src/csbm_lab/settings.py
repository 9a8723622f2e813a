from __future__ import annotations

import logging
import os
import tomllib
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from csbm_lab.constants import (
    DEFAULT_EXACT_CAP,
    DEFAULT_MAX_ROUNDS,
    DEFAULT_SETTINGS_PATH,
    THREADS_ENV_VAR,
)

logger = logging.getLogger(__name__)


@dataclass
class LabSettings:
    """Result of loading .csbm/config.toml."""

    threads: int | None = None
    exact_cap: int = DEFAULT_EXACT_CAP
    journal: bool = False
    log_level: str | None = None
    max_rounds: int = DEFAULT_MAX_ROUNDS
    raw: dict[str, Any] = field(default_factory=dict)


def _typed(section: Mapping[str, Any], key: str, kind: type, path: str) -> Any:
    value = section.get(key)
    if value is None:
        return None
    # bool is an int subclass; keep the two apart
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        logger.warning("Ignoring %s in %s: expected %s, got %r", key, path, kind.__name__, value)
        return None
    return value


def load_settings(path: str = DEFAULT_SETTINGS_PATH) -> LabSettings:
    """Load lab settings from a TOML file.

    - Missing file: return defaults.
    - Unreadable or malformed TOML: log warning, return defaults.
    - Keys of the wrong type: log warning, keep the default for that key.

    Never raises an exception.
    """
    settings_path = Path(path)
    if not settings_path.exists():
        return LabSettings()

    try:
        content = settings_path.read_bytes()
    except OSError as e:
        logger.warning("Failed to read settings file %s: %s", path, e)
        return LabSettings()

    if not content:
        return LabSettings()

    try:
        raw = tomllib.loads(content.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
        logger.warning("Malformed TOML in %s: %s", path, e)
        return LabSettings()

    settings = LabSettings(raw=raw)
    lab = raw.get("lab")
    if isinstance(lab, dict):
        threads = _typed(lab, "threads", int, path)
        if threads is not None and threads >= 1:
            settings.threads = threads
        elif threads is not None:
            logger.warning("Ignoring threads=%d in %s: must be at least 1", threads, path)
        exact_cap = _typed(lab, "exact_cap", int, path)
        if exact_cap is not None:
            settings.exact_cap = exact_cap
        journal = _typed(lab, "journal", bool, path)
        if journal is not None:
            settings.journal = journal
        settings.log_level = _typed(lab, "log_level", str, path)
    sweep = raw.get("sweep")
    if isinstance(sweep, dict):
        max_rounds = _typed(sweep, "max_rounds", int, path)
        if max_rounds is not None:
            settings.max_rounds = max_rounds
    return settings


def resolve_threads(settings: LabSettings, environ: Mapping[str, str] | None = None) -> int:
    """Worker count: CSBM_THREADS, then settings, then the CPU count."""
    env = os.environ if environ is None else environ
    raw = env.get(THREADS_ENV_VAR)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            logger.warning("Ignoring %s=%r: not an integer", THREADS_ENV_VAR, raw)
        else:
            if value >= 1:
                return value
            logger.warning("Ignoring %s=%d: must be at least 1", THREADS_ENV_VAR, value)
    if settings.threads is not None:
        return settings.threads
    return os.cpu_count() or 1
