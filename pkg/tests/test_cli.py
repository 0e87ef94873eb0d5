from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from slgkit import FormatId, MetricsReport, RunCounts, save
from slgkit.bundled import eval_demo_paths
from slgkit.cli import main

from test_datasets import make_pair_dataset, make_scnm_dataset
from test_wire_protocol import SCRIPT


@pytest.fixture
def dataset_path(tmp_path) -> Path:
    path = tmp_path / "corpus.jsonl"
    save(make_scnm_dataset(30), path)
    return path


def run(capsys, *argv: str) -> str:
    code = main(list(argv))
    captured = capsys.readouterr()
    assert code == 0, captured.err
    return captured.out


def run_failing(capsys, *argv: str) -> str:
    code = main(list(argv))
    captured = capsys.readouterr()
    assert code != 0
    return captured.err


def test_convert_is_golden_stable(dataset_path, tmp_path, capsys):
    out_a = tmp_path / "a.jsonl"
    out_b = tmp_path / "b.jsonl"
    run(capsys, "convert", str(dataset_path), "--format", "F5", "--output", str(out_a))
    run(capsys, "convert", str(dataset_path), "--format", "F5", "--output", str(out_b))
    assert out_a.read_bytes() == out_b.read_bytes()
    assert len(out_a.read_text().splitlines()) == 30


def test_convert_writes_manifest_with_digests(dataset_path, tmp_path, capsys):
    out = tmp_path / "pairs.jsonl"
    run(capsys, "convert", str(dataset_path), "--format", "F5", "--output", str(out))
    manifest = json.loads((tmp_path / "pairs.jsonl.manifest.json").read_text())
    assert manifest["command"] == "convert"
    assert manifest["config"]["format"] == "F5"
    digest = manifest["inputs"][str(dataset_path)]
    assert len(digest) == 64 and int(digest, 16) >= 0
    assert manifest["version"]


def test_split_writes_train_test_siblings(dataset_path, capsys):
    out = run(capsys, "split", str(dataset_path), "--seed", "123123")
    train = dataset_path.with_name("corpus.train.jsonl")
    test = dataset_path.with_name("corpus.test.jsonl")
    assert train.is_file() and test.is_file()
    assert "train: 27" in out and "test: 3" in out


def test_fewshot_cli(tmp_path, capsys):
    pairs_path = tmp_path / "pairs_ds.jsonl"
    save(make_pair_dataset(per_class=8), pairs_path)
    out = tmp_path / "fewshot.jsonl"
    stdout = run(capsys, "fewshot", str(pairs_path), "--k", "5", "--seed", "9",
                 "--output", str(out))
    assert "sampled 15 records" in stdout


def test_decode_and_eval_pipeline(dataset_path, tmp_path, capsys):
    pairs = tmp_path / "pairs.jsonl"
    generated = tmp_path / "generated.txt"
    report = tmp_path / "report.json"
    run(capsys, "convert", str(dataset_path), "--format", "F5", "--output", str(pairs))
    run(capsys, "decode", str(pairs), "--backend", "table", "--output", str(generated))
    out = run(capsys, "eval", "--generated", str(generated), "--gold", str(pairs),
              "--output", str(report))
    assert "scnm 100.00" in out
    assert "format 100.00" in out
    stored = MetricsReport.from_dict(json.loads(report.read_text()))
    assert stored.scnm_acc == 1


def test_decode_without_constraint_under_noise(dataset_path, tmp_path, capsys):
    pairs = tmp_path / "pairs.jsonl"
    generated = tmp_path / "generated.txt"
    run(capsys, "convert", str(dataset_path), "--format", "F5", "--output", str(pairs))
    run(capsys, "decode", str(pairs), "--backend", "noise", "--noise-p", "1.0",
        "--no-constraint", "--output", str(generated))
    out = run(capsys, "eval", "--generated", str(generated), "--gold", str(pairs))
    assert "format 0.00" in out


def test_eval_on_bundled_fixture(capsys):
    generated, gold = eval_demo_paths()
    out = run(capsys, "eval", "--generated", str(generated), "--gold", str(gold),
              "--format", "F5")
    assert "scnm 25.00" in out
    assert "sc 50.00" in out
    assert "ner 50.00" in out
    assert "format 75.00" in out


def test_report_averages_three_runs(tmp_path, capsys):
    paths = []
    for i, k in enumerate((9188, 9023, 9018)):
        report = MetricsReport(
            format=FormatId.PAIR_SC,
            scnm_acc=Fraction(k, 10000),
            sc_acc=Fraction(k, 10000),
            ner_acc=None,
            format_acc=Fraction(1),
            counts=RunCounts(total=10000, c_text=k, c_sc=k, c_ner=None, c_format=10000),
        )
        path = tmp_path / f"run{i}.json"
        path.write_text(json.dumps(report.to_dict()), encoding="utf-8")
        paths.append(str(path))
    out = run(capsys, "report", *paths)
    assert "sc 90.76" in out


def test_errors_are_single_json_lines(tmp_path, capsys):
    err = run_failing(capsys, "convert", str(tmp_path / "missing.jsonl"),
                      "--format", "F5", "--output", str(tmp_path / "x.jsonl"))
    lines = [line for line in err.splitlines() if line]
    assert len(lines) == 1
    payload = json.loads(lines[0])
    assert "missing.jsonl" in payload["error"]


def test_eval_rejects_line_count_mismatch(tmp_path, capsys):
    generated = tmp_path / "gen.txt"
    gold = tmp_path / "gold.txt"
    generated.write_text("<A>\n<B>\n", encoding="utf-8")
    gold.write_text("<A>\n", encoding="utf-8")
    err = run_failing(capsys, "eval", "--generated", str(generated), "--gold", str(gold),
                      "--format", "SC_ONLY")
    assert "mismatch" in json.loads(err.strip())["error"]


def test_backend_check_cli(tmp_path, capsys):
    script = tmp_path / "scripted_backend.py"
    script.write_text(SCRIPT, encoding="utf-8")
    out = run(capsys, "backend-check", "--cmd", f"{sys.executable} {script} ok",
              "--probe-input", "greet")
    assert "backend name: scripted" in out
    assert "protocol conformance: ok" in out


def test_backend_check_reports_malformed_backend(tmp_path, capsys):
    script = tmp_path / "scripted_backend.py"
    script.write_text(SCRIPT, encoding="utf-8")
    err = run_failing(capsys, "backend-check", "--cmd",
                      f"{sys.executable} {script} malformed", "--probe-input", "greet")
    assert "malformed" in json.loads(err.strip())["error"]
