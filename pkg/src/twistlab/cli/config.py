"""Run configuration: defaults, an INI file, then command-line flags."""

from __future__ import annotations

import configparser
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path


def _default_cache_dir() -> str:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return os.path.join(base, "twistlab")


@dataclass
class Config:
    table_cap: int = 512
    closure_cap: int = 20_000
    aut_cap: int = 512
    enum_cap: int = 10_000
    triple_tensor_cap: int = 125
    seed: int = 0
    conductor_multiplier: int = 1
    cache_dir: str = ""

    def __post_init__(self):
        if not self.cache_dir:
            self.cache_dir = _default_cache_dir()

    def caps(self) -> dict:
        return {"table_cap": self.table_cap, "closure_cap": self.closure_cap}

    def snapshot(self) -> dict:
        """What goes into reports: everything that can change a result."""
        d = asdict(self)
        d.pop("cache_dir")
        return d


KEYS = tuple(f.name for f in fields(Config))


class ConfigError(ValueError):
    pass


def load_config(path: str | None = None, overrides: dict | None = None) -> Config:
    values: dict = {}
    if path is not None:
        p = Path(path)
        parser = configparser.ConfigParser()
        try:
            with p.open(encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"{p}: cannot read config: {exc.strerror}") from None
        except configparser.Error as exc:
            raise ConfigError(f"{p}: {exc}") from None
        section = parser["twistlab"] if parser.has_section("twistlab") else parser.defaults()
        for k, v in section.items():
            if k not in KEYS:
                raise ConfigError(f"{p}: unknown config key {k!r}")
            values[k] = v
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    out = {}
    for f in fields(Config):
        if f.name in values:
            v = values[f.name]
            if f.name == "cache_dir":
                out[f.name] = str(v)
                continue
            try:
                out[f.name] = int(v)
            except (TypeError, ValueError):
                raise ConfigError(f"config key {f.name} must be an integer, got {v!r}") from None
            if f.name != "seed" and out[f.name] < 1:
                raise ConfigError(f"config key {f.name} must be positive")
    return Config(**out)
