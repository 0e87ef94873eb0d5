"""Domain records and label vocabularies shared by the whole toolkit.

A corpus record couples one sentence with a sentence-level class label and
the ordered list of entity label/span pairs found in it. Sentences without
entities carry a single negative entity whose label is the vocabulary's
final "None" entry, so the data model mirrors the text the model is asked
to generate.

The mark characters ``<`` ``>`` ``:`` ``;`` delimit the prompt grammar and
are never escaped, so they are banned from sentences, labels and spans.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

RESERVED_CHARS = ("<", ">", ":", ";")

NEGATIVE_LABEL = "None"

DEFAULT_SC_LABELS = (
    "social",
    "literature-and-art",
    "academic",
    "technical",
    "natural",
)

DEFAULT_NER_LABELS = (
    "person",
    "company",
    "political-org",
    "other-org",
    "location",
    "public-facility",
    "product",
    "event",
    NEGATIVE_LABEL,
)


def find_reserved_char(text: str) -> str | None:
    """First reserved mark character occurring in ``text``, if any."""
    for ch in RESERVED_CHARS:
        if ch in text:
            return ch
    return None


def check_no_reserved(texts: Iterable[tuple[str, str]]) -> list[str]:
    """Check several named strings for reserved characters at once."""
    violations = []
    for name, text in texts:
        ch = find_reserved_char(text)
        if ch is not None:
            violations.append(f"{name} contains reserved character {ch!r}")
    return violations


def _check_labels(labels: tuple[str, ...], arity: int, what: str) -> None:
    if len(labels) != arity:
        raise ValueError(f"{what} must have exactly {arity} labels, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise ValueError(f"{what} labels must be pairwise distinct")
    for label in labels:
        if not label:
            raise ValueError(f"{what} labels must be non-empty")
        ch = find_reserved_char(label)
        if ch is not None:
            raise ValueError(f"{what} label {label!r} contains reserved character {ch!r}")


@dataclass(frozen=True)
class ScLabelVocab:
    """Ordered sentence-classification label set (always five labels)."""

    labels: tuple[str, ...] = DEFAULT_SC_LABELS

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        _check_labels(self.labels, 5, "SC vocabulary")

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def __iter__(self):
        return iter(self.labels)


@dataclass(frozen=True)
class NerLabelVocab:
    """Ordered entity label set: eight positive labels plus the final "None"."""

    labels: tuple[str, ...] = DEFAULT_NER_LABELS

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        _check_labels(self.labels, 9, "NER vocabulary")
        if self.labels[-1] != NEGATIVE_LABEL:
            raise ValueError(
                f"last NER label must be the negative-case label {NEGATIVE_LABEL!r}, "
                f"got {self.labels[-1]!r}"
            )

    @property
    def negative_label(self) -> str:
        return self.labels[-1]

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def __iter__(self):
        return iter(self.labels)


@dataclass(frozen=True)
class Entity:
    """One entity occurrence: label plus the surface span it covers.

    The negative case is ``Entity("None", "")``.
    """

    label: str
    span: str

    def to_dict(self) -> dict[str, str]:
        return {"label": self.label, "span": self.span}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Entity:
        return cls(label=d["label"], span=d["span"])


def negative_entity() -> Entity:
    return Entity(NEGATIVE_LABEL, "")


@dataclass(frozen=True)
class ScnmRecord:
    """One annotated sentence: text, class label, ordered entity list."""

    id: str
    sentence: str
    sc_label: str
    entities: tuple[Entity, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "entities", tuple(self.entities))

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "sentence": self.sentence,
            "sc_label": self.sc_label,
            "entities": [e.to_dict() for e in self.entities],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ScnmRecord:
        return cls(
            id=d["id"],
            sentence=d["sentence"],
            sc_label=d["sc_label"],
            entities=tuple(Entity.from_dict(e) for e in d["entities"]),
        )


def _validate_sentence(record: ScnmRecord) -> list[str]:
    ch = find_reserved_char(record.sentence)
    if ch is not None:
        return [f"sentence contains reserved character {ch!r}"]
    return []


def _validate_sc(record: ScnmRecord, sc_vocab: ScLabelVocab) -> list[str]:
    if record.sc_label not in sc_vocab:
        return ["sc_label not in vocabulary"]
    return []


def _validate_entities(record: ScnmRecord, ner_vocab: NerLabelVocab) -> list[str]:
    violations: list[str] = []
    if not record.entities:
        violations.append("entities is empty (negative case must be the single None entity)")
    for i, entity in enumerate(record.entities):
        if entity.label not in ner_vocab:
            violations.append(f"entity {i} label not in vocabulary")
        if entity.label == ner_vocab.negative_label:
            if entity.span != "":
                violations.append(f"entity {i} is the negative case but has a non-empty span")
            continue
        if entity.span == "":
            violations.append(f"entity {i} span is empty")
            continue
        ch = find_reserved_char(entity.span)
        if ch is not None:
            violations.append(f"entity {i} span contains reserved character {ch!r}")
        elif entity.span not in record.sentence:
            violations.append(f"entity {i} span not a substring of sentence")
    return violations


def validate_record(
    record: ScnmRecord,
    sc_vocab: ScLabelVocab,
    ner_vocab: NerLabelVocab,
) -> list[str]:
    """Return every invariant violation of ``record``; empty means valid.

    Violations are data, not failures: the order is deterministic (field
    order, then entity index) so callers can report them stably.
    """
    return (
        _validate_sentence(record)
        + _validate_sc(record, sc_vocab)
        + _validate_entities(record, ner_vocab)
    )


def validate_sentence_and_sc(record: ScnmRecord, sc_vocab: ScLabelVocab) -> list[str]:
    """Sentence/SC-label half of :func:`validate_record` (for SC-only use)."""
    return _validate_sentence(record) + _validate_sc(record, sc_vocab)


def validate_sentence_and_entities(record: ScnmRecord, ner_vocab: NerLabelVocab) -> list[str]:
    """Sentence/entities half of :func:`validate_record` (for NER-only use)."""
    return _validate_sentence(record) + _validate_entities(record, ner_vocab)
