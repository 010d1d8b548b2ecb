"""Command-line front end.

    refmr resolve --corpus doc.ann --lexicon doc.lex --out run/
    refmr score --corpus doc.ann --response run/response.key
    refmr compare-heuristics --corpus doc.ann --lexicon doc.lex --h4 25,50,75
    refmr sweep-memory --corpus doc.ann --lexicon doc.lex --quotas 2-60
    refmr stats --corpus a.ann --corpus b.ann
    refmr tune --corpus doc.ann --lexicon doc.lex --spec tune.txt --out run/
    refmr rerun run/manifest.json

Every command that writes to ``--out`` also writes ``manifest.json``;
``rerun`` replays a manifest and reproduces the same bytes.
Exit codes: 0 success, 1 scoring/logic failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import build_config, dump_config, parse_pairs
from .corpus import Document, KeyPartition, corpus_stats, parse_document
from .errors import AnnotationError, ConfigError, CoverageError, RefmrError
from .lexicon import Lexicon, load_lexicon
from .resolver import Heuristic, ResolverConfig, format_trace, resolve_document
from .scorer import Partition, ScoreReport, muc_score, read_partition, report_csv
from .tuner import load_tuning_spec, objective, tune_params

log = logging.getLogger("refmr")

EXIT_OK, EXIT_LOGIC, EXIT_INPUT = 0, 1, 2


class InputError(RefmrError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_corpus(path: str) -> tuple[Document, KeyPartition]:
    try:
        return parse_document(_read(path))
    except AnnotationError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_lexicon(path: str | None) -> Lexicon:
    if path is None:
        return Lexicon()
    try:
        return load_lexicon(_read(path))
    except AnnotationError as exc:
        raise InputError(f"{path}: {exc}") from None


def _config(args) -> ResolverConfig:
    layers = []
    if args.config:
        layers.append(parse_pairs(_read(args.config)))
    flags = {}
    if args.heuristic:
        flags["heuristic"] = args.heuristic
    if args.quota is not None:
        flags["quota"] = str(args.quota)
    layers.append(flags)
    return build_config(layers)


def _key_partition(doc: Document, key: KeyPartition) -> Partition:
    if not key.covers(doc):
        raise CoverageError(f"document {doc.doc_id!r} has no complete key")
    return Partition.from_assignment(key.assignment)


def _score_run(doc, key, cfg, lex) -> ScoreReport:
    resolution = resolve_document(doc, cfg, lex)
    return muc_score(_key_partition(doc, key), Partition.of(resolution.partition()))


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Outputs:
    """Collects output files and writes them together with the run manifest."""

    def __init__(self, args, cfg: ResolverConfig | None):
        self.args = args
        self.cfg = cfg
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def flush(self) -> None:
        out = self.args.out
        if out is None:
            return
        directory = Path(out)
        directory.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (directory / name).write_text(text, encoding="utf-8")
        (directory / "manifest.json").write_text(self.manifest(), encoding="utf-8")

    def manifest(self) -> str:
        inputs = {}
        for opt in ("corpus", "lexicon", "config", "response", "spec"):
            value = getattr(self.args, opt, None)
            for path in value if isinstance(value, list) else [value] if value else []:
                inputs[path] = _sha256(path)
        argv = {
            k: v
            for k, v in sorted(vars(self.args).items())
            if k not in ("func", "out", "verbose") and v is not None
        }
        payload = {
            "command": self.args.command,
            "arguments": argv,
            "inputs": inputs,
            "config": parse_pairs(dump_config(self.cfg)) if self.cfg else None,
            "outputs": sorted(self.files),
            "tool_version": __version__,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(outputs: Outputs, name: str, text: str) -> None:
    outputs.add(name, text)
    sys.stdout.write(text)


# -- commands -----------------------------------------------------------------


def cmd_resolve(args) -> int:
    if args.out is None:
        raise InputError("resolve needs --out")
    doc, _ = _load_corpus(args.corpus)
    lex = _load_lexicon(args.lexicon)
    cfg = _config(args)
    resolution = resolve_document(doc, cfg, lex)
    outputs = Outputs(args, cfg)
    outputs.add("response.key", "".join(line + "\n" for line in resolution.key_lines()))
    outputs.add("trace.log", format_trace(resolution.trace))
    outputs.flush()
    log.info("resolved %d REs into %d MRs", len(doc.res), len(resolution.response))
    return EXIT_OK


def cmd_score(args) -> int:
    doc, key = _load_corpus(args.corpus)
    try:
        response = read_partition(_read(args.response))
    except AnnotationError as exc:
        raise InputError(f"{args.response}: {exc}") from None
    known = {r.id for r in doc.res}
    stray = sorted(response.universe - known)
    if stray:
        log.error("response mentions REs absent from the document: %s", stray[:5])
        return EXIT_LOGIC
    report = muc_score(_key_partition(doc, key), response)
    outputs = Outputs(args, None)
    _emit(outputs, "score.csv", report_csv([("muc", report)]))
    outputs.flush()
    return EXIT_OK


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def cmd_compare_heuristics(args) -> int:
    doc, key = _load_corpus(args.corpus)
    lex = _load_lexicon(args.lexicon)
    cfg = _config(args)
    heuristics = [Heuristic("h1"), Heuristic("h2"), Heuristic("h3")]
    if args.h4:
        heuristics += [Heuristic("h4", x) for x in _parse_floats(args.h4, "--h4")]
    rows = []
    for h in heuristics:
        rows.append((str(h), _score_run(doc, key, replace(cfg, heuristic=h), lex)))
    outputs = Outputs(args, cfg)
    _emit(outputs, "heuristics.csv", report_csv(rows, label_header="heuristic"))
    outputs.flush()
    return EXIT_OK


def parse_quotas(text: str) -> list[int]:
    quotas: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            if sep:
                quotas.extend(range(int(lo), int(hi) + 1))
            else:
                quotas.append(int(part))
        except ValueError:
            raise ConfigError(f"bad quota list {text!r}") from None
    if not quotas:
        raise ConfigError("empty quota list")
    if min(quotas) < 1:
        raise ConfigError(f"quotas must be >= 1, got {min(quotas)}")
    return quotas


def cmd_sweep_memory(args) -> int:
    doc, key = _load_corpus(args.corpus)
    lex = _load_lexicon(args.lexicon)
    cfg = _config(args)
    rows = []
    for q in parse_quotas(args.quotas):
        rows.append((str(q), _score_run(doc, key, replace(cfg, quota=q), lex)))
    outputs = Outputs(args, cfg)
    _emit(outputs, "memory_sweep.csv", report_csv(rows, label_header="quota"))
    outputs.flush()
    return EXIT_OK


def stats_table(corpora: list[tuple[Document, KeyPartition]]) -> str:
    columns = [(doc.doc_id, corpus_stats(doc, key).rows()) for doc, key in corpora]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["statistic"] + [doc_id for doc_id, _ in columns])
    names = [name for name, _ in columns[0][1]] if columns else []
    for i, name in enumerate(names):
        writer.writerow([name] + [rows[i][1] for _, rows in columns])
    return buf.getvalue()


def cmd_stats(args) -> int:
    corpora = [_load_corpus(path) for path in args.corpus]
    outputs = Outputs(args, None)
    _emit(outputs, "stats.csv", stats_table(corpora))
    outputs.flush()
    return EXIT_OK


def cmd_tune(args) -> int:
    if args.out is None:
        raise InputError("tune needs --out")
    doc, key = _load_corpus(args.corpus)
    _key_partition(doc, key)
    lex = _load_lexicon(args.lexicon)
    cfg = _config(args)
    spec = load_tuning_spec(_read(args.spec))
    params, trace = tune_params(doc, key, cfg, lex, spec)
    tuned = replace(cfg, salience=params)
    initial, final = trace.objectives[0], trace.objectives[-1]
    outputs = Outputs(args, cfg)
    outputs.add("tuned.cfg", dump_config(tuned))
    outputs.add("tuning_trace.csv", trace.to_csv(spec))
    outputs.flush()
    # re-evaluation guards against the trace and the written config disagreeing
    if objective(doc, key, tuned, lex) != final:
        log.error("tuned configuration does not reproduce the final objective")
        return EXIT_LOGIC
    print(f"initial objective {initial:.4f}")
    print(f"final objective {final:.4f}")
    print(f"improvement {final - initial:+.4f}")
    return EXIT_OK


def cmd_rerun(args) -> int:
    try:
        manifest = json.loads(_read(args.manifest))
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.manifest}: {exc}") from None
    argv = [manifest["command"]]
    for name, value in manifest["arguments"].items():
        if name == "command":
            continue
        flag = "--" + name.replace("_", "-")
        for v in value if isinstance(value, list) else [value]:
            argv += [flag, str(v)]
    for path, digest in manifest["inputs"].items():
        if _sha256(path) != digest:
            log.warning("input %s changed since the manifest was written", path)
    argv += ["--out", args.out or str(Path(args.manifest).parent)]
    return main(argv)


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refmr", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"refmr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, lexicon=True, config=True):
        p.add_argument("--corpus", required=True, help="annotated document")
        if lexicon:
            p.add_argument("--lexicon", help="lexicon file (default: empty lexicon)")
        if config:
            p.add_argument("--config", help="key=value resolver configuration")
            p.add_argument("--heuristic", help="h1|h2|h3|h4:<X>")
            p.add_argument("--quota", type=int, help="working-memory size")
        p.add_argument("--out", help="output directory")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("resolve", help="resolve a document into MRs")
    common(p)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("score", help="MUC-score a response against the key")
    common(p, lexicon=False, config=False)
    p.add_argument("--response", required=True, help="response partition in KEY syntax")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("compare-heuristics", help="score H1, H2, H3 (and H4) side by side")
    common(p)
    p.add_argument("--h4", help="comma-separated H4 thresholds in percent")
    p.set_defaults(func=cmd_compare_heuristics)

    p = sub.add_parser("sweep-memory", help="score across working-memory quotas")
    common(p)
    p.add_argument("--quotas", default="2-60", help="e.g. 2-60 or 2,5,10,20")
    p.set_defaults(func=cmd_sweep_memory)

    p = sub.add_parser("stats", help="corpus statistics table")
    p.add_argument("--corpus", required=True, action="append", help="annotated document (repeatable)")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("tune", help="tune salience parameters by coordinate descent")
    common(p)
    p.add_argument("--spec", required=True, help="tuning spec (max_sweeps=, param.<name>=lo,hi,step)")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("rerun", help="re-execute a run from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="output directory (default: the manifest's directory)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_rerun)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (InputError, AnnotationError, ConfigError, CoverageError) as exc:
        print(f"refmr: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RefmrError as exc:
        print(f"refmr: failure: {exc}", file=sys.stderr)
        return EXIT_LOGIC


if __name__ == "__main__":
    sys.exit(main())
