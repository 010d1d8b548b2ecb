"""Layered ``key=value`` configuration for resolver runs.

Recognised keys: ``heuristic`` (h1, h2, h3, h4:<X>), ``quota``,
``indefinite_creates_new`` and every flat salience parameter name
(``initial_activation``, ``sentence_decay``, ``type_boost.<type>``,
``function_boost.<func>``). Later layers override earlier ones.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Mapping

from .errors import ConfigError
from .resolver import Heuristic, ResolverConfig, SalienceParams


def parse_pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        pairs[key.strip()] = value.strip()
    return pairs


def _bool(value: str, key: str) -> bool:
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _float(value: str, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None


def apply_pairs(cfg: ResolverConfig, pairs: Mapping[str, str]) -> ResolverConfig:
    salience = cfg.salience
    changes: dict = {}
    for key, value in pairs.items():
        if key == "heuristic":
            changes["heuristic"] = Heuristic.parse(value)
        elif key == "quota":
            try:
                changes["quota"] = int(value)
            except ValueError:
                raise ConfigError(f"quota: expected an integer, got {value!r}") from None
        elif key == "indefinite_creates_new":
            changes["indefinite_creates_new"] = _bool(value, key)
        else:
            salience = salience.with_value(key, _float(value, key))
    return replace(cfg, salience=salience, **changes)


def build_config(layers: Iterable[Mapping[str, str]], base: ResolverConfig | None = None) -> ResolverConfig:
    cfg = base or ResolverConfig()
    for layer in layers:
        cfg = apply_pairs(cfg, layer)
    return cfg


def load_config(text: str) -> ResolverConfig:
    return build_config([parse_pairs(text)])


def dump_config(cfg: ResolverConfig) -> str:
    lines = [
        f"heuristic={cfg.heuristic}",
        f"quota={cfg.quota}",
        f"indefinite_creates_new={'true' if cfg.indefinite_creates_new else 'false'}",
    ]
    params: SalienceParams = cfg.salience
    lines += [f"{name}={params.get(name)!r}" for name in params.names()]
    return "\n".join(lines) + "\n"
