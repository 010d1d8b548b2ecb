"""Coordinate-wise local search over salience parameters.

The objective (MUC recall + precision) is piecewise constant in the
parameters, so the search probes finite steps around the current point and
only moves on a strict improvement.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field, replace

from .config import parse_pairs
from .corpus import Document, KeyPartition
from .errors import ConfigError
from .lexicon import Lexicon
from .resolver import ResolverConfig, SalienceParams, resolve_document
from .scorer import Partition, muc_score

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParamRange:
    name: str
    lower: float
    upper: float
    step: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ConfigError(f"{self.name}: lower bound {self.lower} > upper bound {self.upper}")
        if not self.step > 0:
            raise ConfigError(f"{self.name}: step must be > 0, got {self.step}")

    def clamp(self, value: float) -> float:
        return min(self.upper, max(self.lower, round(value, 12)))

    def grid(self) -> list[float]:
        n = int(round((self.upper - self.lower) / self.step + 1e-9))
        values = [self.clamp(self.lower + i * self.step) for i in range(n + 1)]
        if values[-1] < self.upper:
            values.append(self.upper)
        return values


@dataclass(frozen=True)
class TuningSpec:
    parameters: tuple[ParamRange, ...]
    max_sweeps: int = 10

    def __post_init__(self):
        if self.max_sweeps < 0:
            raise ConfigError("max_sweeps must be >= 0")
        names = [p.name for p in self.parameters]
        if len(set(names)) != len(names):
            raise ConfigError("a parameter is declared twice")


def load_tuning_spec(text: str) -> TuningSpec:
    """Read ``max_sweeps=<n>`` and ``param.<name>=<lower>,<upper>,<step>`` lines."""
    params = []
    max_sweeps = 10
    for key, value in parse_pairs(text).items():
        if key == "max_sweeps":
            try:
                max_sweeps = int(value)
            except ValueError:
                raise ConfigError(f"max_sweeps: expected an integer, got {value!r}") from None
        elif key.startswith("param."):
            bits = value.split(",")
            if len(bits) != 3:
                raise ConfigError(f"{key}: expected <lower>,<upper>,<step>")
            try:
                lower, upper, step = (float(b) for b in bits)
            except ValueError:
                raise ConfigError(f"{key}: non-numeric bound in {value!r}") from None
            params.append(ParamRange(key[len("param."):], lower, upper, step))
        else:
            raise ConfigError(f"unknown tuning key {key!r}")
    return TuningSpec(tuple(params), max_sweeps)


def dump_tuning_spec(spec: TuningSpec) -> str:
    lines = [f"max_sweeps={spec.max_sweeps}"]
    lines += [f"param.{p.name}={p.lower!r},{p.upper!r},{p.step!r}" for p in spec.parameters]
    return "\n".join(lines) + "\n"


@dataclass
class TuningTrace:
    # (sweep, parameter name or None for the start point, parameter vector, objective)
    iterations: list[tuple[int, str | None, tuple[float, ...], float]] = field(default_factory=list)
    evaluated: list[tuple[tuple[float, ...], float]] = field(default_factory=list)

    @property
    def improvement(self) -> float:
        if not self.iterations:
            return 0.0
        return self.iterations[-1][3] - self.iterations[0][3]

    @property
    def objectives(self) -> list[float]:
        return [it[3] for it in self.iterations]

    def to_csv(self, spec: TuningSpec) -> str:
        index = {p.name: i for i, p in enumerate(spec.parameters)}
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("sweep", "param", "value", "objective"))
        for sweep, name, vector, obj in self.iterations:
            value = "-" if name is None else repr(vector[index[name]])
            writer.writerow((sweep, name or "-", value, repr(obj)))
        return buf.getvalue()


def objective(doc: Document, key: KeyPartition, cfg: ResolverConfig, lex: Lexicon) -> float:
    """MUC recall + precision of one resolver run, in [0, 2]."""
    resolution = resolve_document(doc, cfg, lex)
    universe = [r.id for r in doc.res]
    key_part = Partition.from_assignment(key.assignment).extended(universe)
    report = muc_score(key_part, Partition.of(resolution.partition()))
    return report.recall + report.precision


def _apply(params: SalienceParams, spec: TuningSpec, vector: tuple[float, ...]) -> SalienceParams:
    for p, v in zip(spec.parameters, vector):
        params = params.with_value(p.name, v)
    return params


def tune_params(
    doc: Document,
    key: KeyPartition,
    cfg: ResolverConfig,
    lex: Lexicon,
    spec: TuningSpec,
) -> tuple[SalienceParams, TuningTrace]:
    start = []
    for p in spec.parameters:
        value = cfg.salience.get(p.name)  # raises ConfigError on unknown names
        if not p.lower <= value <= p.upper:
            raise ConfigError(f"{p.name}={value} lies outside [{p.lower}, {p.upper}]")
        start.append(value)

    trace = TuningTrace()
    cache: dict[tuple[float, ...], float] = {}

    def evaluate(vector: tuple[float, ...]) -> float:
        if vector not in cache:
            params = _apply(cfg.salience, spec, vector)
            cache[vector] = objective(doc, key, replace(cfg, salience=params), lex)
            trace.evaluated.append((vector, cache[vector]))
        return cache[vector]

    current = tuple(start)
    best = evaluate(current)
    trace.iterations.append((0, None, current, best))
    for sweep in range(1, spec.max_sweeps + 1):
        improved = False
        for i, p in enumerate(spec.parameters):
            chosen = None
            for candidate in (p.clamp(current[i] - p.step), p.clamp(current[i] + p.step)):
                if candidate == current[i]:
                    continue
                vector = current[:i] + (candidate,) + current[i + 1:]
                value = evaluate(vector)
                if value > best and (chosen is None or value > chosen[1]):
                    chosen = (vector, value)
            if chosen is not None:
                current, best = chosen
                improved = True
                trace.iterations.append((sweep, p.name, current, best))
                log.debug("sweep %d: %s -> %r (objective %.4f)", sweep, p.name, current[i], best)
        if not improved:
            break
    return _apply(cfg.salience, spec, current), trace
