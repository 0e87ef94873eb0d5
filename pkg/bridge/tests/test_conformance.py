"""Conformance of the bridge against the toolkit's backend protocol."""

from __future__ import annotations

import subprocess
import sys

import pytest

from slgkit import (
    BackendError,
    BackendProtocolError,
    ConstraintSpec,
    FormatId,
    IoPair,
    StdioBackend,
    batch_decode,
    evaluate,
    probe_backend,
)

from slg_hf_bridge.server import BridgeConfig, _Session


def bridge_cmd(checkpoint, *extra: str) -> list[str]:
    return [sys.executable, "-m", "slg_hf_bridge.server", "--model", str(checkpoint), *extra]


def test_backend_check_probe(checkpoint):
    report = probe_backend(bridge_cmd(checkpoint), probe_input="aki hana")
    assert report.name.startswith("hf:")
    assert report.end_token == "</s>"
    assert report.candidates
    assert all(c.token_text for c in report.candidates)


def test_backend_check_cli_passes(checkpoint, capsys):
    from slgkit.cli import main

    code = main(
        ["backend-check", "--cmd", " ".join(bridge_cmd(checkpoint)), "--probe-input", "aki"]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "protocol conformance: ok" in out


def test_constrained_decode_of_ten_examples(checkpoint, io_pairs):
    with StdioBackend(bridge_cmd(checkpoint), top_k=5) as backend:
        results = batch_decode(backend, io_pairs, ConstraintSpec(), max_len=48)
    assert len(results) == 10
    assert all(item.error is None for item in results)
    assert all(item.generated.startswith("<") for item in results)
    report = evaluate(((r.generated, r.gold) for r in results), FormatId.F5)
    assert report.counts.total == 10
    assert report.format_acc >= 0  # evaluator consumed every line


def test_bridge_is_deterministic(checkpoint):
    def one_decode():
        pair = IoPair("aki kawa", "<x>", FormatId.F5)
        with StdioBackend(bridge_cmd(checkpoint), top_k=5) as backend:
            return batch_decode(backend, [pair], ConstraintSpec(), max_len=12)[0].generated

    assert one_decode() == one_decode()


def test_malformed_line_is_killed_and_reported(checkpoint):
    inner = " ".join(bridge_cmd(checkpoint))
    command = ["bash", "-c", f"echo 'stray diagnostic output'; exec {inner}"]
    backend = StdioBackend(command)
    with pytest.raises(BackendProtocolError, match="malformed line"):
        backend.describe()
    backend.close()


def test_per_request_error_keeps_session_alive(checkpoint):
    command = bridge_cmd(checkpoint, "--max-output-length", "4")
    with StdioBackend(command, top_k=3) as backend:
        with pytest.raises(BackendError, match="max output length"):
            backend.next("aki", ("a",) * 6)
        assert backend.next("aki", ())  # same session still serves


def test_unloadable_model_exits_nonzero_before_handshake(tmp_path):
    proc = subprocess.run(
        bridge_cmd(tmp_path / "no-such-model"),
        input='{"op": "hello"}\n',
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode != 0
    assert proc.stdout == ""
    assert "cannot load model" in proc.stderr


def test_candidate_surfaces_reconstruct_text(checkpoint):
    # In-process check of the surface-form contract: walking any candidate
    # chain and concatenating surfaces equals decoding the id sequence.
    session = _Session(BridgeConfig(model=str(checkpoint)))
    prefix: tuple[str, ...] = ()
    text = ""
    for _ in range(6):
        candidates = session.next_candidates("aki hana kawa", prefix, top_k=4)
        chosen = candidates[0]["t"]
        if chosen == session.end_token:
            break
        text += chosen
        prefix = prefix + (chosen,)
    ids = session._resolve_prefix(prefix)
    assert session._decode(ids) == text


def test_forced_token_enters_the_id_stream(checkpoint):
    session = _Session(BridgeConfig(model=str(checkpoint)))
    session.next_candidates("aki", (), top_k=3)
    ids = session._resolve_prefix(("<",))
    decoded = session._decode(ids)
    assert decoded == "<"
