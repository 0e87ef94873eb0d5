"""Command-line surface: reproducible convert / split / decode / eval runs.

Every subcommand writes a ``<output>.manifest.json`` next to its primary
output recording the full configuration, seeds, input digests and tool
version, so a run can be re-executed byte-identically. All randomness
enters through explicit ``--seed`` flags; nothing reads the clock or OS
entropy. On failure every subcommand prints a single JSON line
``{"error": ...}`` to stderr and exits nonzero.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .datasets import DatasetError, SplitSpec, load, sample_few_shot, save, split
from .decoding import (
    DEFAULT_MAX_LEN,
    BackendError,
    ConstraintSpec,
    FirstTokenNoiseBackend,
    StdioBackend,
    TableBackend,
    batch_decode,
    probe_backend,
)
from .formats import (
    ConversionError,
    FormatId,
    IoPair,
    convert_il_pair,
    convert_ner_only,
    convert_pair_sc,
    convert_sc_only,
    convert_scnm,
)
from .metrics import (
    EmptyEvaluationError,
    GoldFormatError,
    MetricsReport,
    average_runs,
    evaluate,
    percent_str,
    render_table,
)


class CliError(Exception):
    """User-facing failure; printed as the single-line error and exit 1."""


@dataclass(frozen=True)
class RunConfig:
    """Decode-run configuration captured in the manifest."""

    format: str | None
    constraint: ConstraintSpec
    max_len: int
    backend: str
    output_dir: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": self.format,
            "constraint": {
                "enabled": self.constraint.enabled,
                "forced_prefix": list(self.constraint.forced_prefix),
            },
            "max_len": self.max_len,
            "backend": self.backend,
            "output_dir": self.output_dir,
        }


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(
    output: Path,
    command: str,
    config: dict[str, Any],
    inputs: Sequence[Path],
    outputs: Sequence[Path],
    notes: dict[str, Any] | None = None,
) -> None:
    manifest = {
        "tool": "slg",
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }
    if notes:
        manifest["notes"] = notes
    path = Path(str(output) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _require_file(path: Path) -> Path:
    if not path.is_file():
        raise CliError(f"no such file: {path}")
    return path


def _load_dataset(path: Path):
    try:
        return load(_require_file(path))
    except DatasetError as exc:
        raise CliError(str(exc)) from exc


def _write_io_pairs(pairs: Sequence[IoPair], path: Path) -> None:
    lines = [
        json.dumps(p.to_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        for p in pairs
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_io_pairs(path: Path) -> list[IoPair]:
    pairs = []
    for line_no, line in enumerate(
        _require_file(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        try:
            pairs.append(IoPair.from_dict(json.loads(line)))
        except (ValueError, KeyError) as exc:
            raise CliError(f"{path}: malformed io-pair line {line_no}: {exc}") from exc
    if not pairs:
        raise CliError(f"{path}: no io-pairs")
    return pairs


# -- subcommands ----------------------------------------------------------


def _cmd_convert(args: argparse.Namespace) -> int:
    dataset = _load_dataset(Path(args.input))
    fmt = FormatId(args.format)
    try:
        if dataset.kind == "scnm":
            if fmt in (FormatId.F1, FormatId.F2, FormatId.F3, FormatId.F4, FormatId.F5):
                pairs = [
                    convert_scnm(r, fmt, dataset.sc_vocab, dataset.ner_vocab)
                    for r in dataset.records
                ]
            elif fmt is FormatId.SC_ONLY:
                pairs = [convert_sc_only(r, dataset.sc_vocab) for r in dataset.records]
            elif fmt is FormatId.NER_ONLY:
                pairs = [convert_ner_only(r, dataset.ner_vocab) for r in dataset.records]
            else:
                raise CliError(f"format {fmt.value} does not apply to scnm datasets")
        elif dataset.kind == "pair_sc":
            if fmt is not FormatId.PAIR_SC:
                raise CliError(f"format {fmt.value} does not apply to pair_sc datasets")
            pairs = [
                convert_pair_sc(r.sentence_a, r.sentence_b, r.label, dataset.labels)
                for r in dataset.records
            ]
        else:
            if fmt is not FormatId.IL_PAIR:
                raise CliError(f"format {fmt.value} does not apply to il_pair datasets")
            pairs = [convert_il_pair(r.surface, r.label) for r in dataset.records]
    except ConversionError as exc:
        raise CliError(f"record rejected: {exc}") from exc

    output = Path(args.output)
    _write_io_pairs(pairs, output)
    _write_manifest(
        output,
        "convert",
        {"input": args.input, "format": fmt.value, "output": args.output},
        [Path(args.input)],
        [output],
    )
    print(f"wrote {len(pairs)} io-pairs to {output}")
    return 0


def _parse_ratio(text: str) -> Fraction:
    try:
        ratio = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad ratio {text!r}: {exc}") from exc
    return ratio


def _cmd_split(args: argparse.Namespace) -> int:
    dataset = _load_dataset(Path(args.input))
    try:
        spec = SplitSpec(train_ratio=_parse_ratio(args.ratio), seed=args.seed)
        train, test = split(dataset, spec)
    except (ValueError, DatasetError) as exc:
        raise CliError(str(exc)) from exc
    source = Path(args.input)
    train_path = source.with_name(source.stem + ".train" + source.suffix)
    test_path = source.with_name(source.stem + ".test" + source.suffix)
    save(train, train_path)
    save(test, test_path)
    _write_manifest(
        train_path,
        "split",
        {"input": args.input, "ratio": str(spec.train_ratio), "seed": spec.seed},
        [source],
        [train_path, test_path],
    )
    print(f"train: {len(train)} records -> {train_path}")
    print(f"test: {len(test)} records -> {test_path}")
    return 0


def _cmd_fewshot(args: argparse.Namespace) -> int:
    dataset = _load_dataset(Path(args.input))
    try:
        sample = sample_few_shot(dataset, args.k, args.seed)
    except (ValueError, DatasetError) as exc:
        raise CliError(str(exc)) from exc
    output = Path(args.output)
    save(sample, output)
    _write_manifest(
        output,
        "fewshot",
        {"input": args.input, "k": args.k, "seed": args.seed, "output": args.output},
        [Path(args.input)],
        [output],
    )
    print(f"sampled {len(sample)} records ({args.k} per class) -> {output}")
    return 0


def _make_backend(args: argparse.Namespace, pairs: Sequence[IoPair]):
    if args.backend == "table":
        source = _read_io_pairs(Path(args.table)) if args.table else pairs
        return TableBackend.from_targets(source)
    if args.backend == "noise":
        source = _read_io_pairs(Path(args.table)) if args.table else pairs
        inner = TableBackend.from_targets(source)
        return FirstTokenNoiseBackend(
            inner, p=args.noise_p, seed=args.noise_seed, noise_token=args.noise_token
        )
    if args.backend == "cmd":
        if not args.cmd:
            raise CliError("--cmd is required with --backend cmd")
        return StdioBackend(args.cmd, top_k=args.top_k)
    raise CliError(f"unknown backend {args.backend!r}")


def _constraint_from_args(args: argparse.Namespace) -> ConstraintSpec:
    tokens = tuple(args.forced_token) if args.forced_token else ("<",)
    return ConstraintSpec(forced_prefix=tokens, enabled=not args.no_constraint)


def _cmd_decode(args: argparse.Namespace) -> int:
    pairs = _read_io_pairs(Path(args.pairs))
    constraint = _constraint_from_args(args)
    backend = _make_backend(args, pairs)
    try:
        results = batch_decode(backend, pairs, constraint, args.max_len)
    except BackendError as exc:
        raise CliError(f"backend handshake failed: {exc}") from exc
    finally:
        if isinstance(backend, StdioBackend):
            backend.close()

    output = Path(args.output)
    notes: dict[str, Any] = {}
    lines = []
    for i, item in enumerate(results):
        generated, error = item.generated, item.error
        if error is None and "\n" in generated:
            generated, error = "", "output contains a newline; recorded as empty"
        if error is not None:
            notes.setdefault("errors", []).append({"index": i, "error": error})
        lines.append(generated)
    output.write_text("\n".join(lines) + "\n", encoding="utf-8")

    config = RunConfig(
        format=pairs[0].format.value,
        constraint=constraint,
        max_len=args.max_len,
        backend=args.backend if args.backend != "cmd" else f"cmd:{args.cmd}",
        output_dir=str(output.parent),
    )
    inputs = [Path(args.pairs)] + ([Path(args.table)] if args.table else [])
    _write_manifest(output, "decode", config.to_dict(), inputs, [output], notes)
    failed = len(notes.get("errors", []))
    print(f"decoded {len(results)} inputs ({failed} failed) -> {output}")
    return 0


def _read_lines(path: Path) -> list[str]:
    return _require_file(path).read_text(encoding="utf-8").splitlines()


def _gold_and_format(args: argparse.Namespace) -> tuple[list[str], FormatId]:
    gold_path = Path(args.gold)
    if gold_path.suffix == ".jsonl":
        pairs = _read_io_pairs(gold_path)
        formats = {p.format for p in pairs}
        if len(formats) > 1:
            raise CliError("gold io-pairs mix formats")
        fmt = formats.pop()
        if args.format and FormatId(args.format) is not fmt:
            raise CliError(f"--format {args.format} conflicts with gold file format {fmt.value}")
        return [p.target_text for p in pairs], fmt
    if not args.format:
        raise CliError("--format is required when gold is a plain lines file")
    return _read_lines(gold_path), FormatId(args.format)


def _cmd_eval(args: argparse.Namespace) -> int:
    generated = _read_lines(Path(args.generated))
    gold, fmt = _gold_and_format(args)
    if len(generated) != len(gold):
        raise CliError(
            f"line count mismatch: {len(generated)} generated vs {len(gold)} gold"
        )
    try:
        report = evaluate(zip(generated, gold), fmt)
    except (GoldFormatError, EmptyEvaluationError) as exc:
        raise CliError(str(exc)) from exc
    print(render_table(report))
    if args.output:
        output = Path(args.output)
        output.write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        _write_manifest(
            output,
            "eval",
            {"generated": args.generated, "gold": args.gold, "format": fmt.value},
            [Path(args.generated), Path(args.gold)],
            [output],
        )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    reports = []
    for path in args.reports:
        try:
            reports.append(
                MetricsReport.from_dict(
                    json.loads(_require_file(Path(path)).read_text(encoding="utf-8"))
                )
            )
        except (ValueError, KeyError) as exc:
            raise CliError(f"{path}: not a metrics report: {exc}") from exc
    try:
        averaged = average_runs(reports)
    except (ValueError, EmptyEvaluationError) as exc:
        raise CliError(str(exc)) from exc
    print(f"runs: {len(reports)}")
    for name, value in averaged.accuracies().items():
        print(f"{name} {percent_str(value)}")
    if args.output:
        output = Path(args.output)
        output.write_text(
            json.dumps(averaged.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        _write_manifest(
            output,
            "report",
            {"reports": list(args.reports)},
            [Path(p) for p in args.reports],
            [output],
        )
    return 0


def _cmd_backend_check(args: argparse.Namespace) -> int:
    try:
        probe = probe_backend(args.cmd, probe_input=args.probe_input, top_k=args.top_k)
    except BackendError as exc:
        raise CliError(f"backend check failed: {exc}") from exc
    for line in probe.lines():
        print(line)
    print("protocol conformance: ok")
    return 0


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slg",
        description="Sentence-to-label generation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"slg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="dataset -> io-pair file for one format")
    p.add_argument("input", help="dataset file (JSONL with header line)")
    p.add_argument("--format", required=True, choices=[f.value for f in FormatId])
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("split", help="seeded shuffled train/test partition")
    p.add_argument("input")
    p.add_argument("--ratio", default="9/10", help="train fraction (default 9/10)")
    p.add_argument("--seed", type=int, default=123123)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("fewshot", help="stratified k-per-class sample")
    p.add_argument("input")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=123123)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_fewshot)

    p = sub.add_parser("decode", help="io-pairs + backend -> generated lines")
    p.add_argument("pairs", help="io-pair JSONL file")
    p.add_argument("--backend", choices=["table", "noise", "cmd"], default="table")
    p.add_argument("--table", help="io-pair JSONL replay table (defaults to the input pairs)")
    p.add_argument("--noise-p", type=float, default=1.0)
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--noise-token", default="X")
    p.add_argument("--cmd", help="external backend command line (stdio protocol)")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--max-len", type=int, default=DEFAULT_MAX_LEN)
    p.add_argument("--no-constraint", action="store_true")
    p.add_argument(
        "--forced-token",
        action="append",
        help="forced prefix token, repeatable (default: '<')",
    )
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("eval", help="generated + gold -> metrics report")
    p.add_argument("--generated", required=True, help="one generated output per line")
    p.add_argument("--gold", required=True, help="io-pair .jsonl or plain gold lines")
    p.add_argument("--format", choices=[f.value for f in FormatId])
    p.add_argument("--output", help="write the structured report here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("report", help="average repeated-run reports")
    p.add_argument("reports", nargs="+")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("backend-check", help="probe a stdio backend for conformance")
    p.add_argument("--cmd", required=True, help="backend command line")
    p.add_argument("--probe-input", default="probe")
    p.add_argument("--top-k", type=int, default=5)
    p.set_defaults(func=_cmd_backend_check)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1
    except (DatasetError, ConversionError, BackendError, ValueError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
