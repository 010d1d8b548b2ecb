"""Documents, referring expressions and gold keys.

The annotation format is line oriented UTF-8 with ``#`` comments::

    DOC sample01 words=17 sentences=3 paragraphs=1
    RE id=r1 par=0 sent=0 tok=0-0 type=proper gender=f number=s func=subj head=vittoria surface="Vittoria"
    KEY m1: r1,r3
    REL m4 grouped-from m1

Records appear in DOC, RE*, KEY*, REL* order and RE records are listed in
document order; the position of an RE record is its ordinal.
"""

from __future__ import annotations

import re
import shlex
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .errors import CoverageError, ParseError, ValidationError


class Gender(str, Enum):
    MASCULINE = "m"
    FEMININE = "f"
    NEUTER = "n"
    UNKNOWN = "u"


class Number(str, Enum):
    SINGULAR = "s"
    PLURAL = "p"
    UNKNOWN = "u"


class ReType(str, Enum):
    PROPER = "proper"
    DEFINITE = "definite"
    INDEFINITE = "indefinite"
    DEMONSTRATIVE = "demonstrative"
    PRONOUN = "pronoun"


class GramFunction(str, Enum):
    SUBJECT = "subj"
    OBJECT = "obj"
    OBLIQUE = "obl"
    OTHER = "other"
    UNKNOWN = "u"


RELATION_KINDS = ("part-of", "composed-of", "grouped-from")

_NAME = re.compile(r"^[A-Za-z0-9_.:\-]+$")
_LEMMA = re.compile(r"^[^\s,=\"]+$")


@dataclass(frozen=True)
class Position:
    paragraph: int
    sentence: int
    start_token: int
    end_token: int
    ordinal: int

    def __post_init__(self):
        if min(self.paragraph, self.sentence, self.start_token, self.end_token, self.ordinal) < 0:
            raise ValueError(f"negative position field in {self}")
        if self.start_token > self.end_token:
            raise ValueError(f"start token {self.start_token} > end token {self.end_token}")


@dataclass(frozen=True)
class RefExpr:
    id: str
    position: Position
    surface: str
    head_lemma: str
    gender: Gender = Gender.UNKNOWN
    number: Number = Number.UNKNOWN
    re_type: ReType = ReType.DEFINITE
    gram_function: GramFunction = GramFunction.UNKNOWN
    descriptors: frozenset[str] = frozenset()
    unparsed: bool = False

    def __post_init__(self):
        if not self.surface:
            raise ValueError(f"RE {self.id}: empty surface")
        if not self.head_lemma and not self.is_pronoun and not self.unparsed:
            raise ValueError(f"RE {self.id}: non-pronoun RE needs a head lemma")

    @property
    def is_pronoun(self) -> bool:
        return self.re_type is ReType.PRONOUN

    @property
    def is_nominal(self) -> bool:
        """True for REs that take part in the pairwise compatibility test."""
        return not self.is_pronoun and not self.unparsed

    @property
    def sentence(self) -> int:
        return self.position.sentence

    @property
    def ordinal(self) -> int:
        return self.position.ordinal


@dataclass(frozen=True)
class Document:
    doc_id: str
    word_count: int = 0
    sentence_count: int = 0
    paragraph_count: int = 0
    res: tuple[RefExpr, ...] = ()

    def __post_init__(self):
        _validate_document(self)

    def by_id(self) -> dict[str, RefExpr]:
        return {r.id: r for r in self.res}


@dataclass(frozen=True)
class KeyPartition:
    """Gold assignment of RE ids to key MR labels.

    An empty assignment marks an unkeyed document.
    """

    assignment: Mapping[str, str] = field(default_factory=dict)
    relations: tuple[tuple[str, str, str], ...] = ()

    @property
    def labels(self) -> list[str]:
        return list(dict.fromkeys(self.assignment.values()))

    def cells(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for re_id, label in self.assignment.items():
            out.setdefault(label, []).append(re_id)
        return out

    def covers(self, doc: Document) -> bool:
        return set(self.assignment) == {r.id for r in doc.res}


@dataclass(frozen=True)
class CorpusStats:
    words: int
    res: int
    mrs_key: int
    re_per_mr: float | None
    nominal_res: int
    pronoun_res: int
    unparsed_res: int

    def rows(self) -> list[tuple[str, str]]:
        """(statistic, value) rows in display order."""
        ratio = "-" if self.re_per_mr is None else f"{self.re_per_mr:.2f}"
        return [
            ("Words", str(self.words)),
            ("REs", str(self.res)),
            ("MRs (key)", str(self.mrs_key)),
            ("RE / MR", ratio),
            ("Nominal REs", str(self.nominal_res)),
            ("Pronoun REs", str(self.pronoun_res)),
            ("Not parsed REs", str(self.unparsed_res)),
        ]


def _validate_document(doc: Document) -> None:
    seen: set[str] = set()
    prev = None
    for i, r in enumerate(doc.res):
        pos = r.position
        if r.id in seen:
            raise ValidationError(f"duplicate RE id {r.id!r}")
        seen.add(r.id)
        if pos.ordinal != i:
            raise ValidationError(f"RE {r.id}: ordinal {pos.ordinal} != {i}")
        if pos.sentence >= doc.sentence_count:
            raise ValidationError(f"RE {r.id}: sentence {pos.sentence} >= {doc.sentence_count}")
        if pos.paragraph >= doc.paragraph_count:
            raise ValidationError(f"RE {r.id}: paragraph {pos.paragraph} >= {doc.paragraph_count}")
        if prev is not None and (pos.sentence, pos.start_token) < (prev.sentence, prev.start_token):
            raise ValidationError(f"RE {r.id}: out of document order")
        if prev is not None and pos.paragraph < prev.paragraph:
            raise ValidationError(f"RE {r.id}: paragraph goes backwards")
        prev = pos


# -- parsing ---------------------------------------------------------------

_RE_KEYS = {"id", "par", "sent", "tok", "type", "gender", "number", "func", "head", "desc", "surface"}
_RE_REQUIRED = _RE_KEYS - {"desc"}


def _fields(tokens: list[str], lineno: int) -> tuple[dict[str, str], set[str]]:
    values: dict[str, str] = {}
    flags: set[str] = set()
    for tok in tokens:
        if "=" in tok:
            k, v = tok.split("=", 1)
            if k in values:
                raise ParseError(f"repeated field {k!r}", lineno)
            values[k] = v
        else:
            flags.add(tok)
    return values, flags


def _int(value: str, what: str, lineno: int) -> int:
    try:
        n = int(value)
    except ValueError:
        raise ParseError(f"{what}: expected integer, got {value!r}", lineno) from None
    if n < 0:
        raise ParseError(f"{what}: negative value {n}", lineno)
    return n


def _enum(cls, value: str, what: str, lineno: int):
    try:
        return cls(value)
    except ValueError:
        allowed = "|".join(m.value for m in cls)
        raise ParseError(f"{what}: {value!r} not in {allowed}", lineno) from None


def _parse_re(tokens: list[str], ordinal: int, lineno: int) -> RefExpr:
    values, flags = _fields(tokens, lineno)
    unknown = (set(values) - _RE_KEYS) | (flags - {"unparsed"})
    if unknown:
        raise ParseError(f"unknown RE field(s) {sorted(unknown)}", lineno)
    missing = _RE_REQUIRED - set(values)
    if missing:
        raise ParseError(f"missing RE field(s) {sorted(missing)}", lineno)
    if not _NAME.match(values["id"]):
        raise ParseError(f"bad RE id {values['id']!r}", lineno)
    span = values["tok"].split("-")
    if len(span) != 2:
        raise ParseError(f"tok: expected <a>-<b>, got {values['tok']!r}", lineno)
    start, end = (_int(s, "tok", lineno) for s in span)
    if start > end:
        raise ParseError(f"tok: start {start} > end {end}", lineno)
    head = values["head"]
    if head == "-":
        head = ""
    elif not _LEMMA.match(head):
        raise ParseError(f"bad head lemma {head!r}", lineno)
    desc: frozenset[str] = frozenset()
    if values.get("desc"):
        parts = values["desc"].split(",")
        if not all(_LEMMA.match(p) for p in parts):
            raise ParseError(f"bad descriptor list {values['desc']!r}", lineno)
        desc = frozenset(parts)
    position = Position(
        paragraph=_int(values["par"], "par", lineno),
        sentence=_int(values["sent"], "sent", lineno),
        start_token=start,
        end_token=end,
        ordinal=ordinal,
    )
    features = dict(
        gender=_enum(Gender, values["gender"], "gender", lineno),
        number=_enum(Number, values["number"], "number", lineno),
        re_type=_enum(ReType, values["type"], "type", lineno),
        gram_function=_enum(GramFunction, values["func"], "func", lineno),
    )
    try:
        return RefExpr(
            id=values["id"],
            position=position,
            surface=values["surface"],
            head_lemma=head,
            descriptors=desc,
            unparsed="unparsed" in flags,
            **features,
        )
    except ValueError as exc:
        raise ValidationError(str(exc), lineno) from None


def parse_key_lines(lines: Iterable[tuple[int, str]]) -> dict[str, list[str]]:
    """Parse ``KEY label: id,id`` records into label -> ids."""
    cells: dict[str, list[str]] = {}
    for lineno, line in lines:
        body = line[len("KEY"):].strip()
        label, sep, ids = body.partition(":")
        label = label.strip()
        if not sep or not _NAME.match(label):
            raise ParseError(f"malformed KEY record {line!r}", lineno)
        if label in cells:
            raise ValidationError(f"duplicate key label {label!r}", lineno)
        members = [i.strip() for i in ids.split(",") if i.strip()]
        if not members:
            raise ValidationError(f"key label {label!r} has no REs", lineno)
        cells[label] = members
    return cells


def _records(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_document(text: str) -> tuple[Document, KeyPartition]:
    """Read one annotated document and its key partition."""
    stage = 0  # 0: DOC, 1: RE, 2: KEY, 3: REL
    header: dict[str, str] | None = None
    doc_id = ""
    res: list[RefExpr] = []
    key_lines: list[tuple[int, str]] = []
    rel_lines: list[tuple[int, list[str]]] = []
    ids: set[str] = set()

    for lineno, line in _records(text):
        try:
            tokens = shlex.split(line, posix=True)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        kind = tokens[0]
        if kind == "DOC":
            if stage != 0:
                raise ParseError("DOC record must come first and only once", lineno)
            if len(tokens) < 2 or "=" in tokens[1]:
                raise ParseError("DOC record needs a document id", lineno)
            doc_id = tokens[1]
            header, flags = _fields(tokens[2:], lineno)
            if flags or set(header) != {"words", "sentences", "paragraphs"}:
                raise ParseError("DOC needs exactly words=, sentences=, paragraphs=", lineno)
            header = {k: _int(v, k, lineno) for k, v in header.items()}
            stage = 1
        elif kind == "RE":
            if stage != 1:
                raise ParseError("RE record out of order", lineno)
            r = _parse_re(tokens[1:], len(res), lineno)
            if r.id in ids:
                raise ValidationError(f"duplicate RE id {r.id!r}", lineno)
            ids.add(r.id)
            res.append(r)
        elif kind == "KEY":
            if stage not in (1, 2):
                raise ParseError("KEY record out of order", lineno)
            stage = 2
            key_lines.append((lineno, line))
        elif kind == "REL":
            if stage not in (1, 2, 3):
                raise ParseError("REL record out of order", lineno)
            stage = 3
            if len(tokens) != 4 or tokens[2] not in RELATION_KINDS:
                raise ParseError(f"malformed REL record {line!r}", lineno)
            rel_lines.append((lineno, tokens[1:]))
        else:
            raise ParseError(f"unknown record type {kind!r}", lineno)

    if header is None:
        if res or key_lines or rel_lines:
            raise ParseError("missing DOC record", None)
        raise ParseError("empty input: no DOC record", None)

    doc = Document(
        doc_id=doc_id,
        word_count=header["words"],
        sentence_count=header["sentences"],
        paragraph_count=header["paragraphs"],
        res=tuple(res),
    )

    cells = parse_key_lines(key_lines)
    assignment: dict[str, str] = {}
    for (lineno, _), (label, members) in zip(key_lines, cells.items()):
        for re_id in members:
            if re_id not in ids:
                raise ValidationError(f"KEY {label}: unknown RE id {re_id!r}", lineno)
            if re_id in assignment:
                raise ValidationError(f"RE {re_id!r} in two key MRs", lineno)
            assignment[re_id] = label
    if cells and len(assignment) != len(res):
        missing = [r.id for r in res if r.id not in assignment]
        raise ValidationError(f"key does not assign RE(s) {missing[:5]}")

    relations = []
    for lineno, (src, kind, dst) in rel_lines:
        for label in (src, dst):
            if label not in cells:
                raise ValidationError(f"REL references unknown key label {label!r}", lineno)
        relations.append((src, kind, dst))

    # key order follows RE order so that round trips are stable
    ordered = {r.id: assignment[r.id] for r in res if r.id in assignment}
    return doc, KeyPartition(assignment=ordered, relations=tuple(relations))


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_re(r: RefExpr) -> str:
    p = r.position
    parts = [
        "RE",
        f"id={r.id}",
        f"par={p.paragraph}",
        f"sent={p.sentence}",
        f"tok={p.start_token}-{p.end_token}",
        f"type={r.re_type.value}",
        f"gender={r.gender.value}",
        f"number={r.number.value}",
        f"func={r.gram_function.value}",
        f"head={r.head_lemma or '-'}",
    ]
    if r.descriptors:
        parts.append("desc=" + ",".join(sorted(r.descriptors)))
    if r.unparsed:
        parts.append("unparsed")
    parts.append(f"surface={_quote(r.surface)}")
    return " ".join(parts)


def format_key_lines(cells: Mapping[str, Iterable[str]]) -> list[str]:
    return [f"KEY {label}: {','.join(members)}" for label, members in cells.items()]


def serialize_document(doc: Document, key: KeyPartition | None = None) -> str:
    lines = [
        f"DOC {doc.doc_id} words={doc.word_count} sentences={doc.sentence_count} "
        f"paragraphs={doc.paragraph_count}"
    ]
    lines.extend(format_re(r) for r in doc.res)
    if key is not None:
        lines.extend(format_key_lines(key.cells()))
        lines.extend(f"REL {a} {kind} {b}" for a, kind, b in key.relations)
    return "\n".join(lines) + "\n"


def corpus_stats(doc: Document, key: KeyPartition) -> CorpusStats:
    if not key.covers(doc):
        raise CoverageError(f"key does not cover document {doc.doc_id!r}")
    counts = Counter(
        "unparsed" if r.unparsed else "pronoun" if r.is_pronoun else "nominal" for r in doc.res
    )
    n_res = len(doc.res)
    n_mrs = len(set(key.assignment.values()))
    return CorpusStats(
        words=doc.word_count,
        res=n_res,
        mrs_key=n_mrs,
        re_per_mr=round(n_res / n_mrs, 2) if n_mrs else None,
        nominal_res=counts["nominal"],
        pronoun_res=counts["pronoun"],
        unparsed_res=counts["unparsed"],
    )
