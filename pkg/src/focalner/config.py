"""Pipeline configuration read from ``key = value`` files."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .chunker import default_patterns, load_patterns
from .corpus import default_schema, load_schema
from .features import ContextWindow
from .lexicon import load_lexicons
from .resources import data_path

_PATH_KEYS = ("morph", "gazetteer", "clusters", "verbs", "schema", "patterns", "rules")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    morph: str | None = None
    gazetteer: str | None = None
    clusters: str | None = None
    verbs: str | None = None
    schema: str | None = None
    patterns: str | None = None
    rules: str | None = None
    radius: int = 5
    sentence_bounded: bool = True
    alpha: float = 0.05
    min_support: int = 3
    max_order: int = 2
    min_dp: float = 0.6
    seed: int = 0
    workers: int = 0

    def __post_init__(self):
        if self.radius < 1:
            raise ConfigError("radius must be >= 1")
        if not 0.0 <= self.alpha <= 1.0 or not 0.0 <= self.min_dp <= 1.0:
            raise ConfigError("alpha and min_dp must lie in [0, 1]")
        if self.min_support < 1 or self.max_order < 1:
            raise ConfigError("min_support and max_order must be >= 1")
        if self.workers < 0:
            raise ConfigError("workers must be >= 0")

    @property
    def window(self) -> ContextWindow:
        return ContextWindow(self.radius, self.sentence_bounded)

    @property
    def n_workers(self) -> int:
        return self.workers or os.cpu_count() or 1

    @property
    def induction_params(self) -> dict:
        return dict(alpha=self.alpha, min_support=self.min_support,
                    max_order=self.max_order, min_dp=self.min_dp)

    def load_lexicons(self):
        return load_lexicons(self.morph or data_path("morph.tsv"),
                             self.gazetteer or data_path("gazetteer.tsv"),
                             self.clusters or data_path("clusters.tsv"),
                             self.verbs or data_path("verbs.tsv"))

    def load_schema(self):
        return load_schema(self.schema) if self.schema else default_schema()

    def load_patterns(self):
        return load_patterns(self.patterns) if self.patterns else default_patterns()

    def echo(self) -> dict:
        """Settings recorded in rules-file headers (paths excluded)."""
        return {k: v for k, v in asdict(self).items() if k not in _PATH_KEYS and k != "workers"}


def _convert(name: str, raw: str, kind):
    if kind is bool:
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from None


def parse_config(text: str, base: Path | None = None) -> Config:
    kinds = {"radius": int, "sentence_bounded": bool, "alpha": float, "min_support": int,
             "max_order": int, "min_dp": float, "seed": int, "workers": int}
    known = {f.name for f in fields(Config)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in known:
            raise ConfigError(f"line {lineno}: cannot use {line!r}")
        if key in _PATH_KEYS:
            p = Path(value)
            values[key] = str(p if p.is_absolute() or base is None else base / p)
        else:
            values[key] = _convert(key, value, kinds[key])
    return Config(**values)


def load_config(path) -> Config:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), path.parent)
