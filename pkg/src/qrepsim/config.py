"""Flat key-value config format shared by the CLI and parameter round-trips.

Grammar (one entry per line):

    key = value
    section.key = value      # dotted keys express nesting
    # comment lines and blank lines are ignored

Keys are dotted identifiers. Values are kept as raw strings by the parser;
callers coerce them with the helpers below. Lists are comma separated
("0.698,0.496,0.311"). Booleans accept true/false (case-insensitive).
"""

from __future__ import annotations

import re

_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")


class ConfigError(ValueError):
    """Malformed config text or a value that fails coercion."""


def parse_config_text(text: str) -> dict[str, str]:
    """Parse config text into a flat {dotted-key: raw-value} mapping."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"line {lineno}: bad key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def format_config_text(entries: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in entries.items())


def as_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected integer, got {value!r}") from None


def as_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected number, got {value!r}") from None


def as_bool(key: str, value: str) -> bool:
    low = value.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {value!r}")


def as_float_list(key: str, value: str) -> list[float]:
    if not value.strip():
        return []
    return [as_float(key, part.strip()) for part in value.split(",")]


def as_int_list(key: str, value: str) -> list[int]:
    if not value.strip():
        return []
    return [as_int(key, part.strip()) for part in value.split(",")]


def fmt_float(x: float) -> str:
    """Locale-independent float formatting that round-trips exactly."""
    return repr(float(x))
