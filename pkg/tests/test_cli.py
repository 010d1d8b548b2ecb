import json
import shutil
import subprocess
import sys

import pytest

from refmr.cli import main, parse_quotas
from refmr.config import load_config
from refmr.corpus import parse_document
from refmr.errors import ConfigError
from refmr.fixtures import data_path
from refmr.scorer import Partition, read_partition, read_report_csv

SAMPLE = str(data_path("sample01.ann"))
ORACLE = str(data_path("sample01_oracle.lex"))
ENT = str(data_path("entities30.ann"))
ENT_LEX = str(data_path("entities30.lex"))
DECAY = str(data_path("decay_episodes.ann"))
DECAY_LEX = str(data_path("decay_episodes.lex"))
DECAY_SPEC = str(data_path("decay_episodes.tune"))


def run(*argv):
    return main([str(a) for a in argv])


def csv_rows(path):
    return read_report_csv(path.read_text(), label_header=path.read_text().split(",", 1)[0])


def test_resolve_reproduces_key(tmp_path):
    assert run("resolve", "--corpus", SAMPLE, "--lexicon", ORACLE, "--heuristic", "h3", "--out", tmp_path) == 0
    _, key = parse_document(data_path("sample01.ann").read_text())
    response = read_partition((tmp_path / "response.key").read_text())
    assert response == Partition.from_assignment(key.assignment)
    trace = (tmp_path / "trace.log").read_text().splitlines()
    assert trace[0].startswith("EVENT create re=r1 mr=1 act=160.0")
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "resolve"
    assert manifest["outputs"] == ["response.key", "trace.log"]
    assert manifest["config"]["heuristic"] == "h3"


def test_score_round_trip(tmp_path, capsys):
    run("resolve", "--corpus", SAMPLE, "--lexicon", ORACLE, "--out", tmp_path / "r")
    assert run("score", "--corpus", SAMPLE, "--response", tmp_path / "r" / "response.key", "--out", tmp_path / "s") == 0
    assert capsys.readouterr().out == "label,recall,precision,f1\nmuc,1.00,1.00,1.00\n"
    assert read_report_csv((tmp_path / "s" / "score.csv").read_text()) == [("muc", (1.0, 1.0, 1.0))]


def test_score_stray_response(tmp_path):
    bad = tmp_path / "bad.key"
    bad.write_text("KEY a: r1,zz\n")
    assert run("score", "--corpus", SAMPLE, "--response", bad) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["resolve", "--corpus", "missing.ann", "--out", "x"],
        ["resolve", "--corpus", SAMPLE, "--lexicon", "missing.lex", "--out", "x"],
        ["score", "--corpus", SAMPLE, "--response", "missing.key"],
        ["stats", "--corpus", "missing.ann"],
        ["tune", "--corpus", SAMPLE, "--spec", "missing.tune", "--out", "x"],
        ["rerun", "missing/manifest.json"],
    ],
)
def test_missing_file_exit_2(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert run(*argv) == 2
    assert "refmr: error:" in capsys.readouterr().err


def test_malformed_input_exit_2(tmp_path):
    bad = tmp_path / "bad.ann"
    bad.write_text("DOC d words=1 sentences=1 paragraphs=1\nRE id=r1 tok=4-2\n")
    assert run("stats", "--corpus", bad) == 2
    assert run("compare-heuristics", "--corpus", SAMPLE, "--heuristic", "h9") == 2
    assert run("sweep-memory", "--corpus", SAMPLE, "--quotas", "0-3") == 2


def test_unkeyed_corpus_cannot_be_scored(tmp_path):
    unkeyed = tmp_path / "u.ann"
    unkeyed.write_text("".join(l + "\n" for l in data_path("sample01.ann").read_text().splitlines() if not l.startswith("KEY")))
    assert run("resolve", "--corpus", unkeyed, "--out", tmp_path / "r") == 0
    assert run("sweep-memory", "--corpus", unkeyed, "--quotas", "3") == 2


def test_compare_heuristics(tmp_path):
    assert run("compare-heuristics", "--corpus", SAMPLE, "--lexicon", ORACLE, "--h4", "0,50,100", "--out", tmp_path) == 0
    rows = dict(csv_rows(tmp_path / "heuristics.csv"))
    assert list(rows) == ["h1", "h2", "h3", "h4:0", "h4:50", "h4:100"]
    assert rows["h2"][0] <= rows["h3"][0]
    assert rows["h4:0"] == rows["h3"] and rows["h4:100"] == rows["h2"]


def test_compare_heuristics_h4_endpoints_on_entities(tmp_path):
    run("compare-heuristics", "--corpus", ENT, "--lexicon", ENT_LEX, "--h4", "0,100", "--out", tmp_path)
    rows = dict(csv_rows(tmp_path / "heuristics.csv"))
    assert rows["h4:0"] == rows["h3"] and rows["h4:100"] == rows["h2"]


def test_empty_corpus_scores_one(tmp_path):
    empty = tmp_path / "empty.ann"
    empty.write_text("DOC empty words=0 sentences=0 paragraphs=0\n")
    assert run("compare-heuristics", "--corpus", empty, "--out", tmp_path / "o") == 0
    rows = csv_rows(tmp_path / "o" / "heuristics.csv")
    assert [values for _, values in rows] == [(1.0, 1.0, 1.0)] * 3


def test_sweep_memory(tmp_path):
    assert run("sweep-memory", "--corpus", ENT, "--lexicon", ENT_LEX, "--out", tmp_path) == 0
    rows = csv_rows(tmp_path / "memory_sweep.csv")
    assert [label for label, _ in rows] == [str(q) for q in range(2, 61)]
    assert rows[-1][1][0] >= rows[0][1][0]


def test_sweep_single_quota(tmp_path):
    run("sweep-memory", "--corpus", ENT, "--lexicon", ENT_LEX, "--quotas", "20", "--out", tmp_path)
    assert len(csv_rows(tmp_path / "memory_sweep.csv")) == 1


def test_parse_quotas():
    assert parse_quotas("2-60") == list(range(2, 61))
    assert parse_quotas("1,5, 8-9") == [1, 5, 8, 9]
    for bad in ("", "0", "a-b", "x"):
        with pytest.raises(ConfigError):
            parse_quotas(bad)


def test_stats(tmp_path, capsys):
    empty = tmp_path / "empty.ann"
    empty.write_text("DOC empty words=0 sentences=0 paragraphs=0\n")
    assert run("stats", "--corpus", SAMPLE, "--corpus", empty) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "statistic,sample01,empty"
    table = {line.split(",")[0]: line.split(",")[1:] for line in lines[1:]}
    assert table["REs"] == ["7", "0"]
    assert table["MRs (key)"] == ["3", "0"]
    assert table["RE / MR"] == ["2.33", "-"]


def test_tune(tmp_path, capsys):
    cfg = tmp_path / "start.cfg"
    cfg.write_text("sentence_decay=0.2\n")
    assert run("tune", "--corpus", DECAY, "--lexicon", DECAY_LEX, "--config", cfg, "--spec", DECAY_SPEC, "--out", tmp_path / "o") == 0
    out = capsys.readouterr().out
    assert "final objective 2.0000" in out
    tuned = load_config((tmp_path / "o" / "tuned.cfg").read_text())
    assert tuned.salience.sentence_decay == 0.6
    assert (tmp_path / "o" / "tuning_trace.csv").read_text().startswith("sweep,param,value,objective\n0,-,-,")


def test_tune_zero_sweeps(tmp_path):
    spec = tmp_path / "zero.tune"
    spec.write_text("max_sweeps=0\nparam.sentence_decay=0.1,1.0,0.1\n")
    run("resolve", "--corpus", SAMPLE, "--out", tmp_path / "r")
    assert run("tune", "--corpus", SAMPLE, "--lexicon", ORACLE, "--spec", spec, "--out", tmp_path / "o") == 0
    before = json.loads((tmp_path / "r" / "manifest.json").read_text())["config"]
    after = dict(l.split("=", 1) for l in (tmp_path / "o" / "tuned.cfg").read_text().splitlines())
    assert after == before


COMMANDS = {
    "resolve": ["resolve", "--corpus", SAMPLE, "--lexicon", ORACLE],
    "score": ["score", "--corpus", SAMPLE, "--response", SAMPLE],
    "compare-heuristics": ["compare-heuristics", "--corpus", ENT, "--lexicon", ENT_LEX, "--h4", "25,75"],
    "sweep-memory": ["sweep-memory", "--corpus", ENT, "--lexicon", ENT_LEX, "--quotas", "1-8"],
    "stats": ["stats", "--corpus", SAMPLE, "--corpus", ENT],
    "tune": ["tune", "--corpus", DECAY, "--lexicon", DECAY_LEX, "--spec", DECAY_SPEC, "--quota", "5"],
}


def _snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_byte_identical_reruns(name, tmp_path):
    argv = COMMANDS[name]
    assert run(*argv, "--out", tmp_path / "a") == 0
    assert run(*argv, "--out", tmp_path / "b") == 0
    first = _snapshot(tmp_path / "a")
    assert first == _snapshot(tmp_path / "b")
    assert "manifest.json" in first
    assert run("rerun", tmp_path / "a" / "manifest.json", "--out", tmp_path / "c") == 0
    assert _snapshot(tmp_path / "c") == first


def test_rerun_in_place(tmp_path):
    out = tmp_path / "run"
    run(*COMMANDS["resolve"], "--out", out)
    before = _snapshot(out)
    for f in out.iterdir():
        if f.name != "manifest.json":
            f.unlink()
    assert run("rerun", out / "manifest.json") == 0
    assert _snapshot(out) == before


def test_console_script(tmp_path):
    exe = shutil.which("refmr")
    argv = [exe] if exe else [sys.executable, "-m", "refmr.cli"]
    proc = subprocess.run(argv + ["stats", "--corpus", SAMPLE], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("statistic,sample01\n")
    proc = subprocess.run(argv + ["stats", "--corpus", str(tmp_path / "nope.ann")], capture_output=True, text=True)
    assert proc.returncode == 2
