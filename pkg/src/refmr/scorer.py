"""Link-based (MUC) scoring of a response partition against a key partition."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping

from .corpus import parse_key_lines
from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class Partition:
    cells: frozenset[frozenset]

    @classmethod
    def of(cls, cells: Iterable[Iterable[Hashable]]) -> "Partition":
        frozen = [frozenset(c) for c in cells]
        seen: set = set()
        for c in frozen:
            if not c:
                raise ValidationError("partition cells must be non-empty")
            if seen & c:
                raise ValidationError(f"overlapping partition cells on {sorted(map(str, seen & c))}")
            seen |= c
        return cls(frozenset(frozen))

    @classmethod
    def from_assignment(cls, assignment: Mapping[Hashable, Hashable]) -> "Partition":
        cells: dict = {}
        for item, label in assignment.items():
            cells.setdefault(label, set()).add(item)
        return cls.of(cells.values())

    @property
    def universe(self) -> frozenset:
        return frozenset().union(*self.cells) if self.cells else frozenset()

    def extended(self, universe: Iterable[Hashable]) -> "Partition":
        """Add every missing element as a singleton."""
        missing = set(universe) - self.universe
        return Partition(self.cells | {frozenset([m]) for m in missing})


@dataclass(frozen=True)
class ScoreReport:
    recall: float
    precision: float
    f1: float
    key_links: int
    response_links: int
    missing_links: int
    wrong_links: int


def _links_lost(source: Partition, other: Partition) -> tuple[int, int]:
    """(links in ``source``, links of ``source`` missing from ``other``).

    A cell S needs |S| - 1 links; split by ``other`` into |p(S)| pieces it
    keeps |S| - |p(S)| of them.
    """
    owner = {}
    for i, cell in enumerate(other.cells):
        for item in cell:
            owner[item] = i
    total = missing = 0
    for cell in source.cells:
        pieces = {owner[item] for item in cell}
        total += len(cell) - 1
        missing += len(pieces) - 1
    return total, missing


def _ratio(num: int, den: int) -> float:
    return 1.0 if den == 0 else num / den


def f_measure(recall: float, precision: float) -> float:
    if recall + precision == 0:
        return 0.0
    return 2 * recall * precision / (recall + precision)


def muc_score(key: Partition, response: Partition) -> ScoreReport:
    universe = key.universe | response.universe
    key, response = key.extended(universe), response.extended(universe)
    key_links, missing = _links_lost(key, response)
    response_links, wrong = _links_lost(response, key)
    recall = _ratio(key_links - missing, key_links)
    precision = _ratio(response_links - wrong, response_links)
    return ScoreReport(
        recall=recall,
        precision=precision,
        f1=f_measure(recall, precision),
        key_links=key_links,
        response_links=response_links,
        missing_links=missing,
        wrong_links=wrong,
    )


METRICS: dict[str, Callable[[Partition, Partition], ScoreReport]] = {"muc": muc_score}


def score(key: Partition, response: Partition, metric: str = "muc") -> ScoreReport:
    try:
        fn = METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; known: {sorted(METRICS)}") from None
    return fn(key, response)


def read_partition(text: str) -> Partition:
    """Partition from ``KEY label: id,...`` lines; other records are ignored."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("KEY"):
            lines.append((lineno, line))
    cells = parse_key_lines(lines)
    return Partition.of(cells.values())


CSV_FIELDS = ("recall", "precision", "f1")


def report_csv(reports: Iterable[tuple[str, ScoreReport]], label_header: str = "label") -> str:
    reports = list(reports)
    labels = [label for label, _ in reports]
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate report labels")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((label_header,) + CSV_FIELDS)
    for label, r in reports:
        writer.writerow((label, f"{r.recall:.2f}", f"{r.precision:.2f}", f"{r.f1:.2f}"))
    return buf.getvalue()


def read_report_csv(text: str, label_header: str = "label") -> list[tuple[str, tuple[float, ...]]]:
    """Strict reader for :func:`report_csv` output."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != (label_header,) + CSV_FIELDS:
        raise ParseError(f"bad report header {rows[0] if rows else None}")
    out = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise ParseError(f"expected 4 columns, got {len(row)}", i)
        try:
            values = tuple(float(v) for v in row[1:])
        except ValueError:
            raise ParseError(f"non-numeric score in {row}", i) from None
        out.append((row[0], values))
    return out
