"""Hand-written lexicon: synonym classes, hyperonyms and collective nouns.

File format, one record per line (``#`` starts a comment)::

    SYN car,automobile
    HYP car vehicle
    COL team player 11
    GEN voiture f
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .corpus import Gender
from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class Lexicon:
    synonym_classes: tuple[frozenset[str], ...] = ()
    hyperonym_edges: tuple[tuple[str, str], ...] = ()
    collectives: dict[str, tuple[str, int | None]] = field(default_factory=dict)
    genders: dict[str, Gender] = field(default_factory=dict)

    # derived lookup tables, filled in __post_init__
    _rep: dict[str, str] = field(init=False, repr=False, compare=False)
    _ancestors: dict[str, frozenset[str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rep: dict[str, str] = {}
        for cls in self.synonym_classes:
            r = min(cls)
            for lemma in cls:
                if lemma in rep:
                    raise ValidationError(f"lemma {lemma!r} is in two synonym classes")
                rep[lemma] = r
        object.__setattr__(self, "_rep", rep)

        graph: dict[str, set[str]] = {}
        for child, parent in self.hyperonym_edges:
            c, p = self.representative(child), self.representative(parent)
            if c == p:
                raise ValidationError(f"{child!r} would be its own hyperonym")
            graph.setdefault(c, set()).add(p)
        object.__setattr__(self, "_ancestors", _transitive_closure(graph))

    def representative(self, lemma: str) -> str:
        return self._rep.get(lemma, lemma)

    def ancestors(self, lemma: str) -> frozenset[str]:
        """Class representatives of every (transitive) hyperonym of ``lemma``."""
        return self._ancestors.get(self.representative(lemma), frozenset())

    def default_gender(self, lemma: str) -> Gender:
        return self.genders.get(lemma, Gender.UNKNOWN)

    def with_edge(self, child: str, parent: str) -> "Lexicon":
        return Lexicon(
            self.synonym_classes,
            self.hyperonym_edges + ((child, parent),),
            dict(self.collectives),
            dict(self.genders),
        )


def _transitive_closure(graph: dict[str, set[str]]) -> dict[str, frozenset[str]]:
    """Ancestor sets for a DAG; raises on cycles."""
    done: dict[str, frozenset[str]] = {}
    visiting: set[str] = set()

    def visit(node: str) -> frozenset[str]:
        if node in done:
            return done[node]
        if node in visiting:
            raise ValidationError(f"cycle in hyperonym edges through {node!r}")
        visiting.add(node)
        acc: set[str] = set()
        for parent in graph.get(node, ()):
            acc.add(parent)
            acc |= visit(parent)
        visiting.discard(node)
        done[node] = frozenset(acc)
        return done[node]

    for node in sorted(graph):
        visit(node)
    return done


def load_lexicon(text: str) -> Lexicon:
    classes: list[frozenset[str]] = []
    edges: list[tuple[str, str]] = []
    collectives: dict[str, tuple[str, int | None]] = {}
    genders: dict[str, Gender] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *args = line.split()
        if kind == "SYN":
            if len(args) != 1:
                raise ParseError("SYN takes one comma-separated lemma list", lineno)
            lemmas = [l for l in args[0].split(",") if l]
            if len(lemmas) != len(set(lemmas)):
                raise ValidationError("repeated lemma in SYN record", lineno)
            classes.append(frozenset(lemmas))
        elif kind == "HYP":
            if len(args) != 2:
                raise ParseError("HYP takes <child> <parent>", lineno)
            edges.append((args[0], args[1]))
        elif kind == "COL":
            if len(args) != 3:
                raise ParseError("COL takes <collective> <member> <count|u>", lineno)
            if args[2] == "u":
                count = None
            else:
                try:
                    count = int(args[2])
                except ValueError:
                    raise ParseError(f"bad collective count {args[2]!r}", lineno) from None
                if count < 1:
                    raise ValidationError("collective count must be positive", lineno)
            collectives[args[0]] = (args[1], count)
        elif kind == "GEN":
            if len(args) != 2 or args[1] not in ("m", "f", "n"):
                raise ParseError("GEN takes <lemma> m|f|n", lineno)
            genders[args[0]] = Gender(args[1])
        else:
            raise ParseError(f"unknown lexicon record {kind!r}", lineno)
    return Lexicon(tuple(classes), tuple(edges), collectives, genders)


def dump_lexicon(lex: Lexicon) -> str:
    lines = [f"SYN {','.join(sorted(c))}" for c in lex.synonym_classes]
    lines += [f"HYP {c} {p}" for c, p in lex.hyperonym_edges]
    lines += [
        f"COL {name} {member} {'u' if n is None else n}"
        for name, (member, n) in lex.collectives.items()
    ]
    lines += [f"GEN {lemma} {g.value}" for lemma, g in lex.genders.items()]
    return "\n".join(lines) + ("\n" if lines else "")


def semantically_compatible(lex: Lexicon, lemma_a: str, lemma_b: str) -> bool:
    if lemma_a == lemma_b:
        return True
    ra, rb = lex.representative(lemma_a), lex.representative(lemma_b)
    if ra == rb:
        return True
    return rb in lex.ancestors(ra) or ra in lex.ancestors(rb)


def collective_members(lex: Lexicon, lemma: str) -> tuple[str, int | None] | None:
    return lex.collectives.get(lemma)


def synonym_lexicon(groups: Iterable[Iterable[str]]) -> Lexicon:
    """Lexicon whose only content is the given synonym groups.

    Overlapping groups are merged, so the result is always valid.
    """
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for group in groups:
        members = [g for g in group if g]
        for m in members:
            find(m)
        for m in members[1:]:
            parent[find(m)] = find(members[0])
    classes: dict[str, set[str]] = {}
    for lemma in parent:
        classes.setdefault(find(lemma), set()).add(lemma)
    return Lexicon(tuple(frozenset(c) for c in sorted(classes.values(), key=min) if len(c) > 1))
