"""Incremental resolution of referring expressions into mental representations.

Each RE is either attached to the most active compatible MR of the working
memory or starts a new MR. Activation decays at sentence boundaries and is
boosted by every RE that creates or joins an MR; the working memory keeps
only a fixed quota of the most active MRs, archiving the rest.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping

from .corpus import Document, Gender, GramFunction, Number, RefExpr, ReType
from .errors import ConfigError, ContractViolation, NotApplicableError, ReplayError
from .lexicon import Lexicon, collective_members, semantically_compatible

DEFAULT_TYPE_BOOST = {
    ReType.PROPER: 80.0,
    ReType.DEFINITE: 50.0,
    ReType.DEMONSTRATIVE: 40.0,
    ReType.INDEFINITE: 30.0,
    ReType.PRONOUN: 20.0,
}
DEFAULT_FUNCTION_BOOST = {
    GramFunction.SUBJECT: 80.0,
    GramFunction.OBJECT: 50.0,
    GramFunction.OBLIQUE: 30.0,
    GramFunction.OTHER: 20.0,
    GramFunction.UNKNOWN: 0.0,
}


@dataclass(frozen=True)
class SalienceParams:
    initial_activation: float = 0.0
    sentence_decay: float = 0.5
    type_boost: Mapping[ReType, float] = field(default_factory=lambda: dict(DEFAULT_TYPE_BOOST))
    function_boost: Mapping[GramFunction, float] = field(
        default_factory=lambda: dict(DEFAULT_FUNCTION_BOOST)
    )

    def __post_init__(self):
        if not (math.isfinite(self.initial_activation) and self.initial_activation >= 0):
            raise ConfigError(f"initial_activation must be finite and >= 0, got {self.initial_activation}")
        if not (0 < self.sentence_decay <= 1):
            raise ConfigError(f"sentence_decay must be in (0, 1], got {self.sentence_decay}")
        for table, keys in ((self.type_boost, ReType), (self.function_boost, GramFunction)):
            if set(table) != set(keys):
                raise ConfigError(f"boost table must cover {[k.value for k in keys]}")
            for k, v in table.items():
                if not (math.isfinite(v) and v >= 0):
                    raise ConfigError(f"boost for {k.value} must be finite and >= 0, got {v}")

    def boost(self, re: RefExpr) -> float:
        return self.type_boost[re.re_type] + self.function_boost[re.gram_function]

    # flat parameter names used by config files and the tuner:
    # initial_activation, sentence_decay, type_boost.<type>, function_boost.<func>
    def names(self) -> list[str]:
        return (
            ["initial_activation", "sentence_decay"]
            + [f"type_boost.{t.value}" for t in ReType]
            + [f"function_boost.{f.value}" for f in GramFunction]
        )

    def get(self, name: str) -> float:
        table, _, key = name.partition(".")
        if table == "type_boost" and key:
            return self.type_boost[_enum_key(ReType, key, name)]
        if table == "function_boost" and key:
            return self.function_boost[_enum_key(GramFunction, key, name)]
        if name in ("initial_activation", "sentence_decay"):
            return getattr(self, name)
        raise ConfigError(f"unknown salience parameter {name!r}")

    def with_value(self, name: str, value: float) -> "SalienceParams":
        table, _, key = name.partition(".")
        if table == "type_boost" and key:
            boosts = dict(self.type_boost)
            boosts[_enum_key(ReType, key, name)] = float(value)
            return replace(self, type_boost=boosts)
        if table == "function_boost" and key:
            boosts = dict(self.function_boost)
            boosts[_enum_key(GramFunction, key, name)] = float(value)
            return replace(self, function_boost=boosts)
        if name in ("initial_activation", "sentence_decay"):
            return replace(self, **{name: float(value)})
        raise ConfigError(f"unknown salience parameter {name!r}")


def _enum_key(cls, key: str, name: str):
    try:
        return cls(key)
    except ValueError:
        raise ConfigError(f"unknown salience parameter {name!r}") from None


@dataclass(frozen=True)
class Heuristic:
    """Selection heuristic: h1 (first), h2 (all), h3 (one) or h4 with a percent threshold."""

    kind: str = "h3"
    percent: float | None = None

    def __post_init__(self):
        if self.kind not in ("h1", "h2", "h3", "h4"):
            raise ConfigError(f"unknown heuristic {self.kind!r}")
        if self.kind == "h4":
            if self.percent is None or not (0 <= self.percent <= 100):
                raise ConfigError(f"h4 needs a percent in [0, 100], got {self.percent}")
        elif self.percent is not None:
            raise ConfigError(f"{self.kind} takes no percent")

    @classmethod
    def parse(cls, text: str) -> "Heuristic":
        kind, _, x = text.strip().lower().partition(":")
        if kind == "h4":
            try:
                return cls("h4", float(x))
            except ValueError:
                raise ConfigError(f"bad h4 threshold in {text!r}") from None
        if x:
            raise ConfigError(f"bad heuristic {text!r}")
        return cls(kind)

    def __str__(self) -> str:
        if self.kind == "h4":
            return f"h4:{self.percent:g}"
        return self.kind


@dataclass(frozen=True)
class ResolverConfig:
    heuristic: Heuristic = field(default_factory=Heuristic)
    quota: int = 20
    salience: SalienceParams = field(default_factory=SalienceParams)
    indefinite_creates_new: bool = True

    def __post_init__(self):
        if not isinstance(self.quota, int) or self.quota < 1:
            raise ConfigError(f"quota must be a positive integer, got {self.quota!r}")


# -- mental representations --------------------------------------------------

Signature = tuple  # (head, descriptors, gender, number)


def _signature(re: RefExpr) -> Signature:
    return (re.head_lemma, re.descriptors, re.gender, re.number)


@dataclass(eq=False)
class MentalRep:
    id: int
    refs: list[RefExpr] = field(default_factory=list)
    activation: float = 0.0
    relations: list[tuple[str, int]] = field(default_factory=list)
    archived: bool = False
    number: Number = Number.UNKNOWN
    member_lemma: str | None = None
    member_index: int | None = None
    # nominal RE signatures with multiplicity; lets selection test each distinct
    # name once instead of once per RE
    _profile: Counter = field(default_factory=Counter, repr=False)

    def __post_init__(self):
        for r in self.refs:
            if r.is_nominal:
                self._profile[_signature(r)] += 1

    @property
    def re_list(self) -> list[str]:
        return [r.id for r in self.refs]

    @property
    def lemma_summary(self) -> frozenset[str]:
        return frozenset(r.head_lemma for r in self.refs if not r.is_pronoun and r.head_lemma)

    @property
    def provisional(self) -> bool:
        return not self.refs

    @property
    def nominals(self) -> list[RefExpr]:
        return [r for r in self.refs if r.is_nominal]

    def snapshot(self) -> tuple:
        return (
            self.id,
            tuple(self.re_list),
            self.activation,
            tuple(self.relations),
            self.archived,
            self.number,
            self.member_lemma,
            self.member_index,
        )

    def __eq__(self, other):
        if not isinstance(other, MentalRep):
            return NotImplemented
        return self.snapshot() == other.snapshot()

    def _add(self, re: RefExpr) -> None:
        self.refs.append(re)
        if re.is_nominal:
            self._profile[_signature(re)] += 1


# -- compatibility ----------------------------------------------------------


def _compatible_value(a, b, unknown) -> bool:
    return a is unknown or b is unknown or a is b


def agreement_compatible(re_a: RefExpr, re_b: RefExpr, lex: Lexicon | None = None) -> bool:
    """Gender and number agreement; ``unknown`` agrees with anything.

    When a lexicon is given, its lemma-level gender defaults fill in unknown
    genders first.
    """
    ga, gb = re_a.gender, re_b.gender
    if lex is not None:
        ga = _effective_gender(lex, re_a.head_lemma, ga)
        gb = _effective_gender(lex, re_b.head_lemma, gb)
    return _compatible_value(ga, gb, Gender.UNKNOWN) and _compatible_value(
        re_a.number, re_b.number, Number.UNKNOWN
    )


def _effective_gender(lex: Lexicon, head: str, gender: Gender) -> Gender:
    if gender is Gender.UNKNOWN and head:
        return lex.default_gender(head)
    return gender


def _sig_compatible(lex: Lexicon, a: Signature, b: Signature) -> bool:
    head_a, desc_a, gender_a, number_a = a
    head_b, desc_b, gender_b, number_b = b
    gender_a = _effective_gender(lex, head_a, gender_a)
    gender_b = _effective_gender(lex, head_b, gender_b)
    if not (
        _compatible_value(gender_a, gender_b, Gender.UNKNOWN)
        and _compatible_value(number_a, number_b, Number.UNKNOWN)
    ):
        return False
    if not head_a or not head_b:
        return True
    if semantically_compatible(lex, head_a, head_b):
        return True
    return any(semantically_compatible(lex, head_a, d) for d in desc_b) or any(
        semantically_compatible(lex, head_b, d) for d in desc_a
    )


def re_compatible(lex: Lexicon, re_a: RefExpr, re_b: RefExpr) -> bool:
    """Can two non-pronoun REs corefer? Agreement plus the semantic rule on heads and descriptors.

    Unparsed REs carry no usable features and are tested on agreement only.
    """
    if re_a.is_pronoun or re_b.is_pronoun:
        raise ContractViolation("pronouns are excluded from the pairwise compatibility test")
    if re_a.unparsed or re_b.unparsed:
        return agreement_compatible(re_a, re_b, lex)
    return _sig_compatible(lex, _signature(re_a), _signature(re_b))


def _agrees_with_mr(lex: Lexicon, mr: MentalRep, re: RefExpr) -> bool:
    if mr.refs:
        return agreement_compatible(mr.refs[-1], re, lex)
    return _compatible_value(mr.number, re.number, Number.UNKNOWN)


def selection_pass(cfg: ResolverConfig, lex: Lexicon, mr: MentalRep, re: RefExpr) -> bool:
    """Whether ``mr`` may be the referent of ``re`` under ``cfg.heuristic``."""
    if mr.archived:
        raise ContractViolation(f"MR {mr.id} is archived")
    if not re.is_nominal:
        return _agrees_with_mr(lex, mr, re)
    profile = mr._profile
    if not profile:
        if mr.member_lemma is not None:
            return _compatible_value(mr.number, re.number, Number.UNKNOWN) and (
                not re.head_lemma or semantically_compatible(lex, re.head_lemma, mr.member_lemma)
            )
        return _agrees_with_mr(lex, mr, re)

    sig = _signature(re)
    h = cfg.heuristic
    if h.kind == "h1":
        first = next(r for r in mr.refs if r.is_nominal)
        return _sig_compatible(lex, sig, _signature(first))
    if h.kind == "h3":
        return any(_sig_compatible(lex, sig, s) for s in profile)
    if h.kind == "h2":
        return all(_sig_compatible(lex, sig, s) for s in profile)
    total = sum(profile.values())
    hits = sum(n for s, n in profile.items() if _sig_compatible(lex, sig, s))
    if hits == 0:
        return False
    return hits * 100 >= h.percent * total


# -- trace ------------------------------------------------------------------

EVENT_KINDS = ("create", "attach", "archive", "decay", "fuse", "partition", "group")


@dataclass(frozen=True)
class TraceEvent:
    kind: str
    re: str | None = None
    mr: int | None = None
    act: float | None = None
    extra: tuple[tuple[str, str], ...] = ()

    def format(self) -> str:
        act = "-" if self.act is None else repr(self.act)
        parts = [
            "EVENT",
            self.kind,
            f"re={self.re or '-'}",
            f"mr={'-' if self.mr is None else self.mr}",
            f"act={act}",
        ]
        parts += [f"{k}={v}" for k, v in self.extra]
        return " ".join(parts)

    @classmethod
    def parse(cls, line: str) -> "TraceEvent":
        tokens = line.split()
        if len(tokens) < 5 or tokens[0] != "EVENT" or tokens[1] not in EVENT_KINDS:
            raise ReplayError(f"malformed trace line {line!r}")
        fields = dict(t.split("=", 1) for t in tokens[2:])
        re_id = fields.pop("re")
        mr = fields.pop("mr")
        act = fields.pop("act")
        return cls(
            kind=tokens[1],
            re=None if re_id == "-" else re_id,
            mr=None if mr == "-" else int(mr),
            act=None if act == "-" else float(act),
            extra=tuple(fields.items()),
        )

    def get(self, name: str) -> str:
        return dict(self.extra)[name]


def format_trace(events: Iterable[TraceEvent]) -> str:
    return "".join(e.format() + "\n" for e in events)


def parse_trace(text: str) -> list[TraceEvent]:
    return [TraceEvent.parse(line) for line in text.splitlines() if line.strip()]


# -- working memory -----------------------------------------------------------


class WorkingMemory:
    """MR store split into a quota-bounded active set and an archive.

    All MR-set operations record a trace event so that a run can be replayed.
    """

    def __init__(self, quota: int):
        if quota < 1:
            raise ConfigError(f"quota must be >= 1, got {quota}")
        self.quota = quota
        self.mrs: dict[int, MentalRep] = {}
        self.active: dict[int, None] = {}  # insertion-ordered set
        self.archive: set[int] = set()
        self.trace: list[TraceEvent] = []
        self._next_id = 1
        self._resolved: set[str] = set()

    def __len__(self) -> int:
        return len(self.mrs)

    def active_mrs(self) -> Iterator[MentalRep]:
        for mr_id in self.active:
            yield self.mrs[mr_id]

    def _new(self, **kwargs) -> MentalRep:
        mr = MentalRep(id=self._next_id, **kwargs)
        self._next_id += 1
        self.mrs[mr.id] = mr
        self.active[mr.id] = None
        return mr

    def _require_active(self, mr_id: int) -> MentalRep:
        if mr_id not in self.mrs:
            raise ContractViolation(f"unknown MR {mr_id}")
        if mr_id in self.archive:
            raise ContractViolation(f"MR {mr_id} is archived and inaccessible")
        return self.mrs[mr_id]

    def _claim(self, re: RefExpr) -> None:
        if re.id in self._resolved:
            raise ContractViolation(f"RE {re.id} is already resolved")
        self._resolved.add(re.id)

    def create_mr(self, re: RefExpr, params: SalienceParams) -> int:
        self._claim(re)
        mr = self._new(refs=[re], activation=params.initial_activation + params.boost(re))
        self.trace.append(TraceEvent("create", re.id, mr.id, mr.activation))
        return mr.id

    def attach_re(self, mr_id: int, re: RefExpr, params: SalienceParams) -> MentalRep:
        mr = self._require_active(mr_id)
        self._claim(re)
        mr._add(re)
        mr.activation += params.boost(re)
        self.trace.append(TraceEvent("attach", re.id, mr.id, mr.activation))
        return mr

    def fuse_mrs(self, a: int, b: int) -> int:
        if a == b:
            raise ContractViolation("cannot fuse an MR with itself")
        mr_a, mr_b = self._require_active(a), self._require_active(b)
        refs = sorted(mr_a.refs + mr_b.refs, key=lambda r: r.ordinal)
        fused = self._new(
            refs=refs,
            activation=max(mr_a.activation, mr_b.activation),
            number=mr_a.number if mr_a.number is mr_b.number else Number.UNKNOWN,
        )
        relations = []
        for kind, target in mr_a.relations + mr_b.relations:
            if target in (a, b):
                continue
            if (kind, target) not in relations:
                relations.append((kind, target))
        fused.relations = relations
        for mr_id in (a, b):
            del self.mrs[mr_id]
            del self.active[mr_id]
        # references held by other MRs follow the merge
        for other in self.mrs.values():
            if any(t in (a, b) for _, t in other.relations):
                rewired = []
                for kind, t in other.relations:
                    rel = (kind, fused.id if t in (a, b) else t)
                    if rel not in rewired:
                        rewired.append(rel)
                other.relations = rewired
        self.trace.append(
            TraceEvent("fuse", None, fused.id, fused.activation, (("from", f"{a},{b}"),))
        )
        return fused.id

    def partition_mr(self, a: int, lex: Lexicon, params: SalienceParams) -> list[int]:
        mr = self._require_active(a)
        entry = None
        for lemma in _collective_lemmas(mr):
            entry = collective_members(lex, lemma)
            if entry is not None:
                break
        if entry is None or entry[1] is None:
            raise NotApplicableError(f"MR {a} has no collective entry with a known count")
        member_lemma, count = entry
        members = []
        for index in range(1, count + 1):
            m = self._new(
                activation=params.initial_activation,
                relations=[("part-of", a)],
                number=Number.SINGULAR,
                member_lemma=member_lemma,
                member_index=index,
            )
            mr.relations.append(("composed-of", m.id))
            members.append(m.id)
        self.trace.append(
            TraceEvent(
                "partition", None, a, mr.activation, (("members", ",".join(map(str, members))),)
            )
        )
        return members

    def group_mrs(self, a: int, b: int, params: SalienceParams) -> int:
        if a == b:
            raise ContractViolation("cannot group an MR with itself")
        self._require_active(a)
        self._require_active(b)
        group = self._new(
            activation=params.initial_activation,
            relations=[("composed-of", a), ("composed-of", b)],
            number=Number.PLURAL,
        )
        self.trace.append(
            TraceEvent("group", None, group.id, group.activation, (("from", f"{a},{b}"),))
        )
        return group.id

    def apply_decay(self, params: SalienceParams, n_boundaries: int) -> None:
        if n_boundaries < 0:
            raise ContractViolation("negative number of sentence boundaries")
        factor = params.sentence_decay**n_boundaries
        for mr in self.active_mrs():
            mr.activation *= factor
        self.trace.append(TraceEvent("decay", extra=(("n", str(n_boundaries)),)))

    def enforce_quota(self) -> list[int]:
        excess = len(self.active) - self.quota
        if excess <= 0:
            return []
        ranked = sorted(self.active_mrs(), key=lambda m: (m.activation, m.id))
        archived = []
        for mr in ranked[:excess]:
            self._archive(mr)
            archived.append(mr.id)
        return archived

    def _archive(self, mr: MentalRep) -> None:
        mr.archived = True
        del self.active[mr.id]
        self.archive.add(mr.id)
        self.trace.append(TraceEvent("archive", None, mr.id, mr.activation))

    def response(self) -> dict[int, list[str]]:
        """RE ids per MR, in MR creation order; provisional MRs are skipped."""
        return {mr_id: mr.re_list for mr_id, mr in sorted(self.mrs.items()) if mr.refs}

    def snapshot(self) -> dict[int, tuple]:
        return {mr_id: mr.snapshot() for mr_id, mr in sorted(self.mrs.items())}


def _collective_lemmas(mr: MentalRep) -> list[str]:
    seen = []
    for r in mr.refs:
        if r.head_lemma and not r.is_pronoun and r.head_lemma not in seen:
            seen.append(r.head_lemma)
    return seen


# -- resolution loop ----------------------------------------------------------


@dataclass
class Resolution:
    mrs: dict[int, MentalRep]
    response: dict[int, list[str]]
    trace: list[TraceEvent]

    def key_lines(self) -> list[str]:
        return [f"KEY m{mr_id}: {','.join(ids)}" for mr_id, ids in self.response.items()]

    def partition(self) -> list[frozenset[str]]:
        return [frozenset(ids) for ids in self.response.values()]


def resolve_document(doc: Document, cfg: ResolverConfig, lex: Lexicon) -> Resolution:
    memory = WorkingMemory(cfg.quota)
    params = cfg.salience
    sentence = doc.res[0].sentence if doc.res else 0
    for re in doc.res:
        if re.sentence > sentence:
            memory.apply_decay(params, re.sentence - sentence)
            sentence = re.sentence
        if re.re_type is ReType.INDEFINITE and cfg.indefinite_creates_new:
            memory.create_mr(re, params)
        else:
            best = None
            for mr in memory.active_mrs():
                if best is not None and (mr.activation, mr.id) < (best.activation, best.id):
                    continue
                if selection_pass(cfg, lex, mr, re):
                    best = mr
            if best is None:
                memory.create_mr(re, params)
            else:
                memory.attach_re(best.id, re, params)
        memory.enforce_quota()
    return Resolution(mrs=memory.mrs, response=memory.response(), trace=memory.trace)


def replay_trace(
    doc: Document,
    events: Iterable[TraceEvent],
    cfg: ResolverConfig,
    lex: Lexicon | None = None,
) -> WorkingMemory:
    """Rebuild the MR store by re-applying each recorded operation.

    No selection decisions are made here; every operation is taken from the
    trace, and each recorded id and activation snapshot is checked.
    """
    res = doc.by_id()
    params = cfg.salience
    memory = WorkingMemory(cfg.quota)

    def check(event: TraceEvent, mr_id: int | None, act: float | None) -> None:
        if mr_id != event.mr or act != event.act:
            raise ReplayError(f"replay diverged at {event.format()!r}: got mr={mr_id} act={act}")

    for event in events:
        k = event.kind
        if k == "create":
            mr_id = memory.create_mr(res[event.re], params)
            check(event, mr_id, memory.mrs[mr_id].activation)
        elif k == "attach":
            mr = memory.attach_re(event.mr, res[event.re], params)
            check(event, mr.id, mr.activation)
        elif k == "decay":
            memory.apply_decay(params, int(event.get("n")))
        elif k == "archive":
            mr = memory._require_active(event.mr)
            memory._archive(mr)
            check(event, mr.id, mr.activation)
        elif k == "fuse":
            a, b = (int(x) for x in event.get("from").split(","))
            mr_id = memory.fuse_mrs(a, b)
            check(event, mr_id, memory.mrs[mr_id].activation)
        elif k == "group":
            a, b = (int(x) for x in event.get("from").split(","))
            mr_id = memory.group_mrs(a, b, params)
            check(event, mr_id, memory.mrs[mr_id].activation)
        elif k == "partition":
            if lex is None:
                raise ReplayError("partition events need the lexicon")
            members = memory.partition_mr(event.mr, lex, params)
            if ",".join(map(str, members)) != event.get("members"):
                raise ReplayError(f"partition members differ at {event.format()!r}")
        else:
            raise ReplayError(f"unknown event kind {k!r}")
    return memory
