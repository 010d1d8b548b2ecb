"""Independent reference computations and random instance generators for tests."""

import random
from fractions import Fraction
from itertools import combinations

from refmr.corpus import Gender, GramFunction, Number, Position, RefExpr, ReType
from refmr.lexicon import Lexicon
from refmr.resolver import MentalRep


def _components(nodes, edges):
    adjacency = {n: set() for n in nodes}
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen, count = set(), 0
    for start in nodes:
        if start in seen:
            continue
        count += 1
        stack = [start]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(adjacency[n] - seen)
    return count


def _links(cells):
    return {frozenset(pair) for cell in cells for pair in combinations(sorted(cell, key=str), 2)}


def _spanning_recall(key_cells, response_cells):
    """Minimum-spanning-link recall: each key cell needs |S|-1 links; the
    response supplies as many as its correct pairwise links can span."""
    response_links = _links(response_cells)
    needed = found = 0
    for cell in key_cells:
        if len(cell) < 2:
            continue
        correct = [tuple(l) for l in _links([cell]) if l in response_links]
        needed += len(cell) - 1
        found += len(cell) - _components(list(cell), correct)
    return Fraction(found, needed) if needed else Fraction(1)


def brute_force_muc(key_cells, response_cells):
    """(recall, precision) as Fractions by pairwise link enumeration."""
    universe = set().union(*key_cells, *response_cells) if (key_cells or response_cells) else set()
    key = [set(c) for c in key_cells] + [
        {x} for x in universe - set().union(set(), *key_cells)
    ]
    response = [set(c) for c in response_cells] + [
        {x} for x in universe - set().union(set(), *response_cells)
    ]
    return _spanning_recall(key, response), _spanning_recall(response, key)


def random_partition(rng: random.Random, universe, max_cells=None):
    items = list(universe)
    n_cells = rng.randint(1, max_cells or max(1, len(items)))
    cells = {}
    for item in items:
        cells.setdefault(rng.randrange(n_cells), set()).add(item)
    return [frozenset(c) for c in cells.values()]


LEMMAS = [f"l{i}" for i in range(8)]


def random_lexicon(rng: random.Random) -> Lexicon:
    pool = LEMMAS[:]
    rng.shuffle(pool)
    classes, i = [], 0
    while i < len(pool):
        size = rng.choice([1, 1, 2, 3])
        classes.append(pool[i:i + size])
        i += size
    edges = []
    for lo in range(len(classes)):
        for hi in range(lo + 1, len(classes)):
            if rng.random() < 0.25:
                edges.append((rng.choice(classes[lo]), rng.choice(classes[hi])))
    return Lexicon(
        synonym_classes=tuple(frozenset(c) for c in classes if len(c) > 1),
        hyperonym_edges=tuple(edges),
    )


def random_nominal(rng: random.Random, ordinal: int, re_id: str | None = None) -> RefExpr:
    return RefExpr(
        id=re_id or f"x{ordinal}",
        position=Position(0, ordinal, 0, 0, ordinal),
        surface="np",
        head_lemma=rng.choice(LEMMAS),
        gender=rng.choice([Gender.MASCULINE, Gender.FEMININE, Gender.UNKNOWN, Gender.UNKNOWN]),
        number=rng.choice([Number.SINGULAR, Number.UNKNOWN, Number.UNKNOWN, Number.PLURAL]),
        re_type=rng.choice([ReType.PROPER, ReType.DEFINITE, ReType.DEMONSTRATIVE]),
        gram_function=rng.choice(list(GramFunction)),
        descriptors=frozenset(rng.sample(LEMMAS, rng.choice([0, 0, 1, 2]))),
    )


def random_instance(rng: random.Random):
    """(mr, re, lexicon) with at least one non-pronoun RE in the MR."""
    lex = random_lexicon(rng)
    refs = [random_nominal(rng, i) for i in range(rng.randint(1, 6))]
    if rng.random() < 0.3:
        pron = RefExpr(
            id="p0",
            position=Position(0, 99, 0, 0, 99),
            surface="it",
            head_lemma="it",
            re_type=ReType.PRONOUN,
        )
        refs.insert(rng.randrange(len(refs) + 1), pron)
    mr = MentalRep(id=1, refs=refs, activation=10.0)
    return mr, random_nominal(rng, 100, "query"), lex


def random_tuning_case(rng: random.Random):
    """(doc, key, cfg, lex, spec) with a random parameter subset whose bounds contain the start point."""
    from refmr.resolver import Heuristic, ResolverConfig, SalienceParams
    from refmr.synth import entity_corpus
    from refmr.tuner import ParamRange, TuningSpec

    doc, key, lex = entity_corpus(rng.randint(3, 10), rng.randint(10, 45), seed=rng.randrange(10**6))
    params = SalienceParams(sentence_decay=rng.choice([0.3, 0.5, 0.8]))
    cfg = ResolverConfig(
        heuristic=Heuristic.parse(rng.choice(["h1", "h2", "h3", "h4:50"])),
        quota=rng.randint(1, 6),
        salience=params,
    )
    ranges = []
    for name in rng.sample(params.names(), rng.randint(1, 3)):
        value = params.get(name)
        if name == "sentence_decay":
            ranges.append(ParamRange(name, 0.1, 1.0, rng.choice([0.1, 0.2])))
        else:
            ranges.append(ParamRange(name, max(0.0, value - 60), value + 60, rng.choice([10.0, 25.0, 40.0])))
    return doc, key, cfg, lex, TuningSpec(tuple(ranges), max_sweeps=rng.randint(1, 4))
