"""Per-example judgments and aggregate accuracy metrics.

Scoring is deliberately stringent: a generated string is fully correct only
when its parsed structure equals the gold structure exactly (class label
equal and entity sequences equal element-wise, order-sensitive, no
normalization). Four counters are kept per evaluation:

* text     - parsed structure identical to gold
* sc       - class labels equal
* ner      - entity sequences equal
* format   - string matches the target grammar (labels need not be right)

Each accuracy is the counter over the total number of examples; a
format-invalid output scores zero on every counter. All arithmetic is
exact (fractions); percentages are rounded half-up to two decimals at
presentation only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .formats import FormatId
from .parsing import ENTITY_FORMATS, LABEL_FORMATS, parse_output


class GoldFormatError(ValueError):
    """Gold target does not parse: converter/vocabulary misconfiguration."""


class EmptyEvaluationError(ValueError):
    """Aggregation over zero judgments is undefined."""


def percent(value: Fraction) -> Decimal:
    """``value`` as a percentage rounded half-up to two decimals."""
    scaled = Fraction(value) * 100
    return (Decimal(scaled.numerator) / Decimal(scaled.denominator)).quantize(
        Decimal("0.01"), rounding=ROUND_HALF_UP
    )


def percent_str(value: Fraction | None) -> str:
    return "-" if value is None else f"{percent(value)}"


@dataclass(frozen=True)
class Judgment:
    """Correctness quadruple for one generated/gold pair.

    ``sc_ok``/``ner_ok`` are ``None`` when the format has no such component
    (label-only or entity-only targets); they are therefore excluded from
    reports rather than counted.
    """

    generated: str
    gold: str
    format_ok: bool
    scnm_ok: bool
    sc_ok: bool | None
    ner_ok: bool | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "generated": self.generated,
            "gold": self.gold,
            "format_ok": self.format_ok,
            "scnm_ok": self.scnm_ok,
            "sc_ok": self.sc_ok,
            "ner_ok": self.ner_ok,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Judgment:
        return cls(
            generated=d["generated"],
            gold=d["gold"],
            format_ok=d["format_ok"],
            scnm_ok=d["scnm_ok"],
            sc_ok=d["sc_ok"],
            ner_ok=d["ner_ok"],
        )


@dataclass(frozen=True)
class RunCounts:
    """Raw counters from one evaluation run."""

    total: int
    c_text: int
    c_sc: int | None
    c_ner: int | None
    c_format: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "text": self.c_text,
            "sc": self.c_sc,
            "ner": self.c_ner,
            "format": self.c_format,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> RunCounts:
        return cls(
            total=d["total"],
            c_text=d["text"],
            c_sc=d["sc"],
            c_ner=d["ner"],
            c_format=d["format"],
        )


@dataclass(frozen=True)
class MetricsReport:
    """Aggregate accuracies, exact, with the underlying counters.

    For a single run, each accuracy is counter/total and ``counts`` is set.
    A multi-run average carries the mean accuracies, ``counts=None``, and
    the per-run counters in ``runs``.
    """

    format: FormatId
    scnm_acc: Fraction
    sc_acc: Fraction | None
    ner_acc: Fraction | None
    format_acc: Fraction
    counts: RunCounts | None = None
    judgments: tuple[Judgment, ...] = field(default=(), repr=False)
    runs: tuple[RunCounts, ...] | None = None

    def accuracies(self) -> dict[str, Fraction | None]:
        return {
            "scnm": self.scnm_acc,
            "sc": self.sc_acc,
            "ner": self.ner_acc,
            "format": self.format_acc,
        }

    def to_dict(self, include_judgments: bool = True) -> dict[str, Any]:
        d: dict[str, Any] = {
            "format": self.format.value,
            "accuracy": {
                name: None
                if value is None
                else {
                    "ratio": f"{value.numerator}/{value.denominator}",
                    "percent": str(percent(value)),
                }
                for name, value in self.accuracies().items()
            },
        }
        if self.counts is not None:
            d["counts"] = self.counts.to_dict()
        if self.runs is not None:
            d["runs"] = [r.to_dict() for r in self.runs]
        if include_judgments and self.judgments:
            d["examples"] = [j.to_dict() for j in self.judgments]
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> MetricsReport:
        def _frac(entry: dict[str, str] | None) -> Fraction | None:
            return None if entry is None else Fraction(entry["ratio"])

        acc = d["accuracy"]
        return cls(
            format=FormatId(d["format"]),
            scnm_acc=_frac(acc["scnm"]),
            sc_acc=_frac(acc["sc"]),
            ner_acc=_frac(acc["ner"]),
            format_acc=_frac(acc["format"]),
            counts=RunCounts.from_dict(d["counts"]) if "counts" in d else None,
            judgments=tuple(Judgment.from_dict(j) for j in d.get("examples", ())),
            runs=tuple(RunCounts.from_dict(r) for r in d["runs"]) if "runs" in d else None,
        )


def judge_example(generated: str, gold: str, format: FormatId) -> Judgment:
    """Score one generated string against its gold target.

    The gold string must parse (it comes from the converter); a generated
    string that fails the format check scores zero everywhere, with no
    best-effort extraction.
    """
    gold_parsed = parse_output(gold, format)
    if not gold_parsed.format_ok:
        raise GoldFormatError(
            f"gold target does not parse as {format.value}: {gold_parsed.diagnostic}"
        )
    has_sc = format in LABEL_FORMATS
    has_ner = format in ENTITY_FORMATS

    gen_parsed = parse_output(generated, format)
    if not gen_parsed.format_ok:
        return Judgment(
            generated=generated,
            gold=gold,
            format_ok=False,
            scnm_ok=False,
            sc_ok=False if has_sc else None,
            ner_ok=False if has_ner else None,
        )
    sc_ok = gen_parsed.sc_label == gold_parsed.sc_label if has_sc else None
    ner_ok = gen_parsed.entities == gold_parsed.entities if has_ner else None
    scnm_ok = all(ok for ok in (sc_ok, ner_ok) if ok is not None)
    return Judgment(
        generated=generated,
        gold=gold,
        format_ok=True,
        scnm_ok=scnm_ok,
        sc_ok=sc_ok,
        ner_ok=ner_ok,
    )


def aggregate(judgments: Sequence[Judgment], format: FormatId) -> MetricsReport:
    """Sum counters over ``judgments`` and report exact accuracies.

    The judgment list rides along in the report for per-example dumps.
    Order-insensitive; permuting the list changes nothing but the dump
    order.
    """
    judgments = tuple(judgments)
    if not judgments:
        raise EmptyEvaluationError("cannot aggregate an empty judgment list")
    has_sc = format in LABEL_FORMATS
    has_ner = format in ENTITY_FORMATS
    for j in judgments:
        if (j.sc_ok is None) == has_sc or (j.ner_ok is None) == has_ner:
            raise ValueError(f"judgment components do not match format {format.value}")

    total = len(judgments)
    c_text = sum(j.scnm_ok for j in judgments)
    c_format = sum(j.format_ok for j in judgments)
    c_sc = sum(bool(j.sc_ok) for j in judgments) if has_sc else None
    c_ner = sum(bool(j.ner_ok) for j in judgments) if has_ner else None
    return MetricsReport(
        format=format,
        scnm_acc=Fraction(c_text, total),
        sc_acc=Fraction(c_sc, total) if c_sc is not None else None,
        ner_acc=Fraction(c_ner, total) if c_ner is not None else None,
        format_acc=Fraction(c_format, total),
        counts=RunCounts(total=total, c_text=c_text, c_sc=c_sc, c_ner=c_ner, c_format=c_format),
        judgments=judgments,
    )


def evaluate(
    pairs: Iterable[tuple[str, str]], format: FormatId = FormatId.F5
) -> MetricsReport:
    """Judge and aggregate a sequence of (generated, gold) pairs."""
    judgments = [judge_example(generated, gold, format) for generated, gold in pairs]
    return aggregate(judgments, format)


def average_runs(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Arithmetic mean of each accuracy across repeated runs.

    All runs must share a format; per-run counters are preserved in the
    ``runs`` breakdown of the result.
    """
    if not reports:
        raise EmptyEvaluationError("cannot average zero reports")
    formats = {r.format for r in reports}
    if len(formats) > 1:
        raise ValueError(
            "cannot average reports of mixed formats: "
            + ", ".join(sorted(f.value for f in formats))
        )

    def _mean(values: list[Fraction | None]) -> Fraction | None:
        if any(v is None for v in values):
            if not all(v is None for v in values):
                raise ValueError("cannot average reports with mismatched components")
            return None
        return sum(values, Fraction(0)) / len(values)

    return MetricsReport(
        format=reports[0].format,
        scnm_acc=_mean([r.scnm_acc for r in reports]),
        sc_acc=_mean([r.sc_acc for r in reports]),
        ner_acc=_mean([r.ner_acc for r in reports]),
        format_acc=_mean([r.format_acc for r in reports]),
        counts=None,
        judgments=(),
        runs=tuple(r.counts for r in reports if r.counts is not None) or None,
    )


def render_table(report: MetricsReport) -> str:
    """Human-readable per-example table plus the summary lines.

    Columns mirror the judgment quadruple: 1/0 flags for text, sc, ner and
    format correctness, then the generated and gold strings.
    """

    def _flag(value: bool | None) -> str:
        return "-" if value is None else str(int(value))

    lines = []
    if report.judgments:
        header = f"{'#':>4}  {'text':>4}  {'sc':>2}  {'ner':>3}  {'format':>6}  generated / gold"
        lines.append(header)
        lines.append("-" * len(header))
        for i, j in enumerate(report.judgments, start=1):
            lines.append(
                f"{i:>4}  {_flag(j.scnm_ok):>4}  {_flag(j.sc_ok):>2}  "
                f"{_flag(j.ner_ok):>3}  {_flag(j.format_ok):>6}  {j.generated}"
            )
            lines.append(f"{'':>4}  {'':>4}  {'':>2}  {'':>3}  {'':>6}  {j.gold}")
        lines.append("")
    for name, value in report.accuracies().items():
        lines.append(f"{name} {percent_str(value)}")
    return "\n".join(lines)
