"""Serialization of records into prompt input/output text.

Five numbered single-sentence formats exist for comparison; F5 is the
canonical one and the only numbered format the parser and evaluator
understand. The remaining variants cover the single-task (SC-only,
NER-only), label-pair, and sentence-pair classification settings.

Canonical F5 rendering::

    input  = sentence <l1><l2><l3><l4><l5> sentence NER :n1; ... :n9;
    target = <sc_label> NER (:label;span)*

with no whitespace between elements; the negative case serializes as the
single pair ``:None;`` with an empty span.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Sequence

from .records import (
    NerLabelVocab,
    ScLabelVocab,
    ScnmRecord,
    check_no_reserved,
    find_reserved_char,
    validate_record,
    validate_sentence_and_entities,
    validate_sentence_and_sc,
)


class FormatId(str, enum.Enum):
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"
    F5 = "F5"
    SC_ONLY = "SC_ONLY"
    NER_ONLY = "NER_ONLY"
    IL_PAIR = "IL_PAIR"
    PAIR_SC = "PAIR_SC"


# The optimal single-sentence format; everything downstream defaults to it.
CANONICAL_FORMAT = FormatId.F5

NUMBERED_FORMATS = (FormatId.F1, FormatId.F2, FormatId.F3, FormatId.F4, FormatId.F5)


class ConversionError(ValueError):
    """Input rejected by a converter; ``violations`` lists every reason."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class IoPair:
    """One converted example: model input text and expected output text."""

    input_text: str
    target_text: str
    format: FormatId

    def to_dict(self) -> dict[str, Any]:
        return {
            "input": self.input_text,
            "target": self.target_text,
            "format": self.format.value,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> IoPair:
        return cls(
            input_text=d["input"],
            target_text=d["target"],
            format=FormatId(d["format"]),
        )


def _sc_block(sc_vocab: ScLabelVocab) -> str:
    return "".join(f"<{label}>" for label in sc_vocab)


def _ner_block(ner_vocab: NerLabelVocab) -> str:
    return "NER" + "".join(f":{label};" for label in ner_vocab)


def _colon_labels(labels) -> str:
    return "".join(f":{label}" for label in labels)


def _colon_pairs(record: ScnmRecord) -> str:
    return "".join(f":{e.label}:{e.span}" for e in record.entities)


def _f5_target(record: ScnmRecord) -> str:
    return f"<{record.sc_label}>NER" + "".join(f":{e.label};{e.span}" for e in record.entities)


def _require_valid(violations: list[str]) -> None:
    if violations:
        raise ConversionError(violations)


def convert_scnm(
    record: ScnmRecord,
    format: FormatId,
    sc_vocab: ScLabelVocab,
    ner_vocab: NerLabelVocab,
) -> IoPair:
    """Render ``record`` under one of the five numbered format variants.

    Only F5 targets round-trip through the output parser; F1-F4 exist for
    converter completeness and golden-file comparison.
    """
    if format not in NUMBERED_FORMATS:
        raise ValueError(f"convert_scnm handles F1..F5 only, got {format.value}")
    _require_valid(validate_record(record, sc_vocab, ner_vocab))
    s = record.sentence
    sc = record.sc_label
    if format is FormatId.F1:
        return IoPair(s, f":{sc}" + _colon_pairs(record), format)
    if format is FormatId.F2:
        return IoPair(f"Sentence:{s}", f"label:{sc}:NER" + _colon_pairs(record), format)
    if format is FormatId.F3:
        input_text = f"{s}category{_colon_labels(sc_vocab)}{s}NER{_colon_labels(ner_vocab)}"
        return IoPair(input_text, f"category:{sc}:NER" + _colon_pairs(record), format)
    if format is FormatId.F4:
        input_text = f"{s}{_colon_labels(sc_vocab)}{s}NER{_colon_labels(ner_vocab)}"
        return IoPair(input_text, f":{sc}:NER" + _colon_pairs(record), format)
    input_text = f"{s}{_sc_block(sc_vocab)}{s}{_ner_block(ner_vocab)}"
    return IoPair(input_text, _f5_target(record), FormatId.F5)


def convert_sc_only(record: ScnmRecord, sc_vocab: ScLabelVocab) -> IoPair:
    """SC half of the canonical format: sentence plus candidate labels in,
    single bracketed label out."""
    _require_valid(validate_sentence_and_sc(record, sc_vocab))
    return IoPair(
        record.sentence + _sc_block(sc_vocab),
        f"<{record.sc_label}>",
        FormatId.SC_ONLY,
    )


def convert_ner_only(record: ScnmRecord, ner_vocab: NerLabelVocab) -> IoPair:
    """NER half of the canonical format."""
    _require_valid(validate_sentence_and_entities(record, ner_vocab))
    target = "NER" + "".join(f":{e.label};{e.span}" for e in record.entities)
    return IoPair(record.sentence + _ner_block(ner_vocab), target, FormatId.NER_ONLY)


def convert_il_pair(surface: str, label: str) -> IoPair:
    """Bare surface-to-label pair; a plain identity-shaped transformation."""
    violations = []
    if not surface:
        violations.append("surface is empty")
    if not label:
        violations.append("label is empty")
    violations += check_no_reserved([("surface", surface), ("label", label)])
    _require_valid(violations)
    return IoPair(surface, label, FormatId.IL_PAIR)


def convert_pair_sc(
    sentence_a: str,
    sentence_b: str,
    label: str,
    label_vocab: Sequence[str],
) -> IoPair:
    """Sentence-pair classification: both sentences plus the candidate
    labels in, single bracketed label out. The vocabulary may have any
    arity of at least two."""
    violations = []
    if len(label_vocab) < 2:
        violations.append("label vocabulary must have at least 2 labels")
    if len(set(label_vocab)) != len(label_vocab):
        violations.append("label vocabulary entries must be pairwise distinct")
    for v in label_vocab:
        ch = find_reserved_char(v)
        if ch is not None:
            violations.append(f"vocabulary label {v!r} contains reserved character {ch!r}")
    violations += check_no_reserved(
        [("sentence_a", sentence_a), ("sentence_b", sentence_b), ("label", label)]
    )
    if label not in label_vocab:
        violations.append("label not in vocabulary")
    _require_valid(violations)
    candidates = "".join(f"<{v}>" for v in label_vocab)
    return IoPair(sentence_a + sentence_b + candidates, f"<{label}>", FormatId.PAIR_SC)
