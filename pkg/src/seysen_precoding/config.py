"""Flat ``key=value`` experiment configuration files.

Lines starting with ``#`` are comments, lists are comma-separated::

    # LRA-ZF sweep
    schemes = ZF, LRA-ZF-SA, LRA-ZF-LLL
    snr_grid_db = 10, 12, 14
    n_channels = 2000
    seed = 7
"""

from __future__ import annotations

import os

from .errors import ConfigError
from .precoding import SchemeId
from .simulator import SimConfig

_INT_KEYS = ("n_t", "n_r", "n_channels", "frames_per_channel", "min_errors", "min_channels",
             "seed", "workers")
_STR_KEYS = ("sigma_mode", "sa_variant")


def _split_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def parse_config(text: str) -> SimConfig:
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        if key in fields:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                fields[key] = int(value)
            elif key in _STR_KEYS:
                fields[key] = value
            elif key == "snr_grid_db":
                fields[key] = tuple(float(v) for v in _split_list(value))
            elif key == "schemes":
                fields[key] = tuple(SchemeId(v) for v in _split_list(value))
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    try:
        return SimConfig(**fields)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path: str | os.PathLike) -> SimConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def format_config(cfg: SimConfig) -> str:
    """Inverse of :func:`parse_config`."""
    lines = [f"{k} = {getattr(cfg, k)}" for k in _INT_KEYS]
    lines += [f"{k} = {getattr(cfg, k)}" for k in _STR_KEYS]
    lines.append("snr_grid_db = " + ", ".join(repr(s) for s in cfg.snr_grid_db))
    lines.append("schemes = " + ", ".join(str(s) for s in cfg.schemes))
    return "\n".join(lines) + "\n"
