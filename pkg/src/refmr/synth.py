"""Seeded synthetic corpora for experiments and tests.

``entity_corpus`` imitates a narrative text: a few salient characters and
many minor ones, shared role nouns that make naming ambiguous, pronouns for
recently mentioned entities and a small share of unparsed REs.
``decay_episode_corpus`` builds isolated two-candidate episodes whose
outcome depends only on the sentence decay factor.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import Document, Gender, GramFunction, KeyPartition, Number, Position, RefExpr, ReType
from .lexicon import Lexicon

HUMAN_ROLES = {
    Gender.MASCULINE: ["man", "lawyer", "priest", "servant", "duke", "soldier", "brother"],
    Gender.FEMININE: ["woman", "widow", "servant", "duchess", "sister", "lady", "cook"],
}
OBJECT_NOUNS = ["house", "letter", "garden", "carriage", "palace", "church", "room", "sword"]
SYNONYMS = [("man", "gentleman"), ("lawyer", "advocate"), ("house", "dwelling"), ("woman", "dame")]
PRONOUNS = {
    (Gender.MASCULINE, Number.SINGULAR): "he",
    (Gender.FEMININE, Number.SINGULAR): "she",
    (Gender.NEUTER, Number.SINGULAR): "it",
}
FUNCTIONS = [GramFunction.OBJECT, GramFunction.OBLIQUE, GramFunction.OTHER]


@dataclass
class _Entity:
    label: str
    gender: Gender
    number: Number
    name: str | None
    nouns: list[str]
    adjective: str | None


def _entities(rng: random.Random, n: int) -> list[_Entity]:
    out = []
    for i in range(n):
        roll = rng.random()
        if roll < 0.7:
            gender = Gender.MASCULINE if rng.random() < 0.5 else Gender.FEMININE
            roles = HUMAN_ROLES[gender]
            nouns = rng.sample(roles, 2)
            name = f"name{i:03d}" if rng.random() < 0.6 else None
        else:
            gender = Gender.NEUTER
            nouns = [rng.choice(OBJECT_NOUNS)]
            name = None
        number = Number.PLURAL if rng.random() < 0.08 else Number.SINGULAR
        adjective = f"adj{i:03d}" if rng.random() < 0.5 else None
        out.append(_Entity(f"e{i:03d}", gender, number, name, nouns, adjective))
    return out


def _lexicon(entities: list[_Entity]) -> Lexicon:
    # a name is a hyponym of each role its bearer plays, so "Name012" matches
    # "the lawyer" and "the priest" while the two roles stay incompatible
    edges = [(e.name, noun) for e in entities if e.name for noun in e.nouns]
    for roles in HUMAN_ROLES.values():
        edges += [(r, "person") for r in roles]
    edges += [(o, "thing") for o in OBJECT_NOUNS]
    edges = list(dict.fromkeys(edges))
    return Lexicon(
        synonym_classes=tuple(frozenset(s) for s in SYNONYMS),
        hyperonym_edges=tuple(edges),
    )


def entity_corpus(
    n_entities: int,
    n_res: int,
    seed: int = 0,
    doc_id: str | None = None,
    res_per_sentence: int = 3,
    pronoun_rate: float = 0.3,
    unparsed_rate: float = 0.03,
) -> tuple[Document, KeyPartition, Lexicon]:
    rng = random.Random(seed)
    entities = _entities(rng, n_entities)
    weights = [1.0 / (rank + 1) for rank in range(n_entities)]
    last_seen: dict[str, int] = {}
    recent: list[_Entity] = []
    res: list[RefExpr] = []
    assignment: dict[str, str] = {}
    sentence = token = 0
    words = 0
    paragraph = 0

    # every entity is mentioned at least once; the rest follow salience and focus
    order = list(entities)
    rng.shuffle(order)
    forced = {id(e) for e in order}
    for i in range(n_res):
        slot = i % res_per_sentence
        if i and slot == 0:
            words += token + 1
            sentence += 1
            token = 0
            if sentence % 8 == 0:
                paragraph += 1
        remaining = n_res - i
        pending = [e for e in order if id(e) in forced]
        if pending and (remaining <= len(pending) or rng.random() < 0.3):
            ent = pending[0]
        elif recent and rng.random() < 0.5:
            ent = rng.choice(recent[-3:])
        else:
            ent = rng.choices(entities, weights)[0]
        forced.discard(id(ent))

        first = ent.label not in last_seen
        recently = not first and sentence - last_seen[ent.label] <= 1
        func = GramFunction.SUBJECT if slot == 0 else rng.choice(FUNCTIONS)
        desc: frozenset[str] = frozenset()
        pron = PRONOUNS.get((ent.gender, ent.number), "they")
        if not first and recently and rng.random() < pronoun_rate:
            re_type, head, surface = ReType.PRONOUN, pron, pron
        elif ent.name and (first or rng.random() < 0.5):
            re_type, head, surface = ReType.PROPER, ent.name, ent.name.capitalize()
        else:
            noun = rng.choice(ent.nouns)
            for a, b in SYNONYMS:
                if noun == a and rng.random() < 0.3:
                    noun = b
            if first:
                re_type = ReType.INDEFINITE
            else:
                re_type = ReType.DEMONSTRATIVE if rng.random() < 0.15 else ReType.DEFINITE
            head = noun
            if ent.adjective and rng.random() < 0.6:
                desc = frozenset([ent.adjective])
            surface = " ".join(["the" if re_type is not ReType.INDEFINITE else "a", *sorted(desc), noun])

        length = len(surface.split())
        unparsed = re_type is not ReType.PRONOUN and rng.random() < unparsed_rate
        gender, number = ent.gender, ent.number
        if unparsed:
            gender, number, func = Gender.UNKNOWN, Number.UNKNOWN, GramFunction.UNKNOWN
        re_id = f"r{i + 1}"
        res.append(
            RefExpr(
                id=re_id,
                position=Position(paragraph, sentence, token, token + length - 1, i),
                surface=surface,
                head_lemma=head,
                gender=gender,
                number=number,
                re_type=re_type,
                gram_function=func,
                descriptors=desc,
                unparsed=unparsed,
            )
        )
        token += length + 1
        assignment[re_id] = ent.label
        last_seen[ent.label] = sentence
        recent.append(ent)
        del recent[:-6]

    words += token + 1 if n_res else 0
    doc = Document(
        doc_id=doc_id or f"synth{n_entities}_{seed}",
        word_count=words,
        sentence_count=sentence + 1 if n_res else 0,
        paragraph_count=paragraph + 1 if n_res else 0,
        res=tuple(res),
    )
    return doc, KeyPartition(assignment=assignment), _lexicon(entities)


@dataclass(frozen=True)
class Episode:
    """Older candidate A, later candidate B ``gap`` sentences on, then an anaphor
    compatible with both in B's sentence. ``answer`` names the key referent."""

    a_type: ReType
    a_func: GramFunction
    b_type: ReType
    b_func: GramFunction
    gap: int
    answer: str  # "a" or "b"


def decay_episode_corpus(episodes: list[Episode], doc_id: str = "decay_episodes"):
    """Document, key and lexicon for a list of isolated episodes.

    Each episode has its own lemmas (``cand_a<i>``, ``cand_b<i>`` under
    ``person<i>``), so candidates never compete across episodes.
    """
    res: list[RefExpr] = []
    assignment: dict[str, str] = {}
    edges = []
    sentence = 0

    def add(label, sent, re_type, func, head, surface):
        ordinal = len(res)
        tok = 0 if not res or res[-1].sentence != sent else res[-1].position.end_token + 2
        res.append(
            RefExpr(
                id=f"r{ordinal + 1}",
                position=Position(0, sent, tok, tok + 1, ordinal),
                surface=surface,
                head_lemma=head,
                gender=Gender.MASCULINE,
                number=Number.SINGULAR,
                re_type=re_type,
                gram_function=func,
            )
        )
        assignment[res[-1].id] = label

    for i, ep in enumerate(episodes):
        a, b, hyper = f"cand_a{i}", f"cand_b{i}", f"person{i}"
        edges += [(a, hyper), (b, hyper)]
        add(f"a{i}", sentence, ep.a_type, ep.a_func, a, f"the {a}")
        sentence += ep.gap
        add(f"b{i}", sentence, ep.b_type, ep.b_func, b, f"the {b}")
        add(f"{ep.answer}{i}", sentence, ReType.DEFINITE, GramFunction.OTHER, hyper, f"the {hyper}")
        sentence += 1
    doc = Document(doc_id, word_count=4 * len(res), sentence_count=sentence, paragraph_count=1, res=tuple(res))
    return doc, KeyPartition(assignment=assignment), Lexicon(hyperonym_edges=tuple(edges))
