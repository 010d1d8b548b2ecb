"""Access to the corpora bundled with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .corpus import Document, KeyPartition, parse_document
from .lexicon import Lexicon, load_lexicon, synonym_lexicon


def data_path(name: str) -> Path:
    return Path(str(resources.files("refmr") / "data" / name))


def load_fixture(stem: str, lexicon: str | None = None) -> tuple[Document, KeyPartition, Lexicon]:
    """Load ``<stem>.ann`` with ``<lexicon>.lex`` (default ``<stem>.lex``, empty if absent)."""
    doc, key = parse_document(data_path(f"{stem}.ann").read_text(encoding="utf-8"))
    lex_file = data_path(f"{lexicon or stem}.lex")
    lex = load_lexicon(lex_file.read_text(encoding="utf-8")) if lex_file.exists() else Lexicon()
    return doc, key, lex


def oracle_lexicon(doc: Document, key: KeyPartition) -> Lexicon:
    """Make exactly the heads of key-coreferent nominal REs synonymous.

    Exact only when no head lemma is shared by two key MRs; shared heads
    merge their classes.
    """
    by_id = doc.by_id()
    groups = [
        {by_id[i].head_lemma for i in ids if by_id[i].is_nominal}
        for ids in key.cells().values()
    ]
    return synonym_lexicon(groups)
