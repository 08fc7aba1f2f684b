"""Flat ``key = value`` run configuration files.

The format is deliberately minimal: one assignment per line, ``#`` starts
a comment, keys are ``[A-Za-z0-9_]`` words, values are bare strings.
Lists are comma-separated.  Every command documents its accepted keys; unknown
keys are an error so that typos cannot silently change a run.
"""

from __future__ import annotations

import hashlib
import re
from pathlib import Path

__all__ = ["ConfigError", "ExperimentConfig", "config_hash", "parse_config"]

_LINE = re.compile(r"^([A-Za-z0-9_]+)\s*=\s*(.*)$")
_REQUIRED = object()


class ConfigError(ValueError):
    """Malformed configuration text or invalid field value."""


def parse_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines into an ordered string mapping."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = m.group(1), m.group(2).strip()
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def config_hash(fields: dict[str, str]) -> str:
    """SHA-256 of the canonical ``key=value`` serialization, sorted by key."""
    canon = "".join(f"{k}={v}\n" for k, v in sorted(fields.items()))
    return hashlib.sha256(canon.encode()).hexdigest()


def _split(raw: str) -> list[str]:
    parts = [part.strip() for part in raw.split(",")]
    return [part for part in parts if part]


class ExperimentConfig:
    """Typed, validated access to parsed configuration fields.

    Numeric getters reject non-positive values unless ``positive=False``;
    passing ``default=None`` (the default) makes a key optional, while
    the ``require`` helper makes it mandatory.
    """

    def __init__(self, fields: dict[str, str]):
        self.fields = dict(fields)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        return cls(parse_config(Path(path).read_text()))

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        return cls(parse_config(text))

    @property
    def hash(self) -> str:
        return config_hash(self.fields)

    def check_keys(self, allowed: set[str]) -> None:
        unknown = set(self.fields) - set(allowed)
        if unknown:
            raise ConfigError(
                f"unknown config keys {sorted(unknown)}; allowed: {sorted(allowed)}"
            )

    def _fetch(self, key: str, default):
        if key in self.fields:
            return True, self.fields[key]
        if default is _REQUIRED:
            raise ConfigError(f"missing required config key {key!r}")
        return False, default

    def get_str(self, key, default=None, choices: tuple[str, ...] | None = None):
        present, value = self._fetch(key, default)
        if not present:
            return default
        if choices is not None and value not in choices:
            raise ConfigError(f"{key!r} must be one of {choices}, got {value!r}")
        return value

    def get_int(self, key, default=None, positive: bool = True):
        present, raw = self._fetch(key, default)
        if not present:
            return default
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{key!r} must be an integer, got {raw!r}") from exc
        if positive and value <= 0:
            raise ConfigError(f"{key!r} must be positive, got {value}")
        return value

    def get_float(self, key, default=None, positive: bool = True):
        present, raw = self._fetch(key, default)
        if not present:
            return default
        try:
            value = float(raw)
        except ValueError as exc:
            raise ConfigError(f"{key!r} must be a number, got {raw!r}") from exc
        if positive and not value > 0:
            raise ConfigError(f"{key!r} must be positive, got {value}")
        return value

    def get_ints(self, key, default=None, positive: bool = True):
        present, raw = self._fetch(key, default)
        if not present:
            return default
        try:
            values = [int(part) for part in _split(raw)]
        except ValueError as exc:
            raise ConfigError(f"{key!r} must be comma-separated integers") from exc
        if not values:
            raise ConfigError(f"{key!r} must not be empty")
        if positive and any(v <= 0 for v in values):
            raise ConfigError(f"{key!r} entries must be positive")
        return values

    def get_floats(self, key, default=None, positive: bool = True):
        present, raw = self._fetch(key, default)
        if not present:
            return default
        try:
            values = [float(part) for part in _split(raw)]
        except ValueError as exc:
            raise ConfigError(f"{key!r} must be comma-separated numbers") from exc
        if not values:
            raise ConfigError(f"{key!r} must not be empty")
        if positive and any(not v > 0 for v in values):
            raise ConfigError(f"{key!r} entries must be positive")
        return values

    def require(self, key: str, kind: str = "str", **kwargs):
        """Fetch a mandatory key with the given getter kind."""
        getter = getattr(self, f"get_{kind}")
        return getter(key, default=_REQUIRED, **kwargs)
