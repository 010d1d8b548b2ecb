"""Regenerate the synthetic fixtures bundled in src/refmr/data/."""

from pathlib import Path

from refmr.corpus import GramFunction as F, ReType as T, serialize_document
from refmr.lexicon import dump_lexicon
from refmr.synth import Episode, decay_episode_corpus, entity_corpus
from refmr.tuner import ParamRange, TuningSpec, dump_tuning_spec

DATA = Path(__file__).resolve().parents[1] / "src" / "refmr" / "data"

# Older candidate: proper subject (activation 160 under default boosts). Each
# episode flips at sentence_decay = (b / 160) ** (1 / gap); one flip point lies
# inside every 0.1-wide grid interval, key answers "a" below 0.6 and "b" above.
EPISODES = [
    Episode(T.PROPER, F.SUBJECT, T.INDEFINITE, F.UNKNOWN, 1, "a"),  # 0.1875
    Episode(T.PROPER, F.SUBJECT, T.DEMONSTRATIVE, F.UNKNOWN, 1, "a"),  # 0.25
    Episode(T.PROPER, F.SUBJECT, T.DEMONSTRATIVE, F.OTHER, 1, "a"),  # 0.375
    Episode(T.PROPER, F.SUBJECT, T.DEFINITE, F.OTHER, 1, "a"),  # 0.4375
    Episode(T.PROPER, F.SUBJECT, T.DEFINITE, F.UNKNOWN, 2, "a"),  # 0.559
    Episode(T.PROPER, F.SUBJECT, T.INDEFINITE, F.UNKNOWN, 4, "b"),  # 0.658
    Episode(T.PROPER, F.SUBJECT, T.DEMONSTRATIVE, F.SUBJECT, 1, "b"),  # 0.75
    Episode(T.PROPER, F.SUBJECT, T.DEMONSTRATIVE, F.OTHER, 6, "b"),  # 0.849
    Episode(T.PROPER, F.SUBJECT, T.PROPER, F.OBJECT, 4, "b"),  # 0.949
]


def write(name: str, text: str) -> None:
    (DATA / name).write_text(text, encoding="utf-8")
    print("wrote", DATA / name)


def main() -> None:
    doc, key, lex = entity_corpus(30, 150, seed=7, doc_id="entities30")
    write("entities30.ann", serialize_document(doc, key))
    write("entities30.lex", dump_lexicon(lex))

    doc, key, lex = decay_episode_corpus(EPISODES)
    write("decay_episodes.ann", serialize_document(doc, key))
    write("decay_episodes.lex", dump_lexicon(lex))
    spec = TuningSpec((ParamRange("sentence_decay", 0.1, 1.0, 0.1),), max_sweeps=20)
    write("decay_episodes.tune", dump_tuning_spec(spec))


if __name__ == "__main__":
    main()
