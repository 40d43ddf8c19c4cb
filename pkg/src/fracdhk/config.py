"""Run configuration: flat ``key = value`` files, environment default, flag overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .core import TOL_EXACT, TOL_GRID
from .primitives import Interval

ENV_VAR = "FRAC_DHK_CONFIG"
MIN_RESOLUTION = 65


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    a: float = 0.0
    b: float = 1.0
    resolution: int = 129
    tol_exact: float = TOL_EXACT
    tol_grid: float = TOL_GRID
    battery: int = 8
    output_dir: str = "."
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if not self.a < self.b:
            raise ConfigError("need a < b")
        if self.resolution < MIN_RESOLUTION:
            raise ConfigError(f"resolution must be at least {MIN_RESOLUTION}")
        if not (self.tol_exact > 0 and self.tol_grid > 0):
            raise ConfigError("tolerances must be positive")
        if self.battery < 1:
            raise ConfigError("battery size must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")

    @property
    def interval(self) -> Interval:
        return Interval(self.a, self.b)

    def tol_for(self, exact: bool) -> float:
        return self.tol_exact if exact else self.tol_grid

    def updated(self, **overrides) -> "RunConfig":
        """Copy with the non-``None`` overrides applied."""
        given = {k: v for k, v in overrides.items() if v is not None}
        try:
            return replace(self, **given)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "str": str}


def parse_config(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected key = value")
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _CASTS[_TYPES[key]](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def load_config(path: str | Path | None = None, **overrides) -> RunConfig:
    """Defaults, then the file (``path`` or ``$FRAC_DHK_CONFIG``), then non-``None`` overrides."""
    path = path or os.environ.get(ENV_VAR)
    values = {}
    if path:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        values = parse_config(text)
    try:
        base = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return base.updated(**overrides)
