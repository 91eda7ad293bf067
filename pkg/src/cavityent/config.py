"""Flat ``key = value`` configuration files, mirrored one-to-one by CLI flags."""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigError

#: Recognised keys and their value types.  Flag ``--grid-nt`` maps to ``grid_nt``.
KEYS = {
    "g_a": float,
    "g_b": float,
    "kappa": float,
    "gamma": float,
    "n_t": float,
    "cutoff": int,
    "t_max": float,
    "dt": float,
    "grid_nt": int,
    "grid_kappa": int,
    "grid_t": int,
    "nt_min": float,
    "nt_max": float,
    "kappa_min": float,
    "kappa_max": float,
    "log_base": float,
    "jobs": int,
    "out": str,
}


def normalise_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_").lower()


def coerce(key: str, raw) -> object:
    key = normalise_key(key)
    if key not in KEYS:
        raise ConfigError(f"unknown configuration key {key!r}")
    kind = KEYS[key]
    try:
        return kind(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot interpret {raw!r} as {kind.__name__}") from None


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are ignored."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        out[normalise_key(key)] = coerce(key, value)
    return out


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def merge(file_values: dict, flag_values: dict) -> dict:
    """Flags override file values; ``None`` flags are treated as absent."""
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    return merged
