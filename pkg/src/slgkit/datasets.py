"""Dataset file I/O, seeded splitting, few-shot sampling, score coarsening.

File format: UTF-8 JSON lines. The first line is a header object
describing the task kind and its label vocabulary; every following line is
one record. Serialization is canonical (sorted keys, compact separators)
so that byte-level diffs and digests are meaningful and a load/save
round-trip is the identity on canonical files.

Three task kinds exist:

* ``scnm``    - records ``{id, sentence, sc_label, entities:[{label, span}]}``
                with a 5-label SC vocabulary and a 9-label NER vocabulary.
* ``pair_sc`` - records ``{id, sentence_a, sentence_b, label}`` with a
                free-arity (>= 2) label vocabulary.
* ``il_pair`` - records ``{id, surface, label}``, unconstrained label set.

Shuffling is pinned to a portable algorithm so a seed means the same split
everywhere: a splitmix64 stream drives a Fisher-Yates shuffle (see
:func:`shuffled_indices`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .records import (
    NerLabelVocab,
    ScLabelVocab,
    ScnmRecord,
    check_no_reserved,
    validate_record,
)


class DatasetError(ValueError):
    """Malformed dataset file or record invariant violation."""


@dataclass(frozen=True)
class PairScRecord:
    """One sentence-pair classification example."""

    id: str
    sentence_a: str
    sentence_b: str
    label: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "sentence_a": self.sentence_a,
            "sentence_b": self.sentence_b,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> PairScRecord:
        return cls(
            id=d["id"],
            sentence_a=d["sentence_a"],
            sentence_b=d["sentence_b"],
            label=d["label"],
        )


@dataclass(frozen=True)
class IlPairRecord:
    """One surface/label pair for incremental-learning corpora."""

    id: str
    surface: str
    label: str

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "surface": self.surface, "label": self.label}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> IlPairRecord:
        return cls(id=d["id"], surface=d["surface"], label=d["label"])


KINDS = ("scnm", "pair_sc", "il_pair")

_RECORD_TYPES = {
    "scnm": ScnmRecord,
    "pair_sc": PairScRecord,
    "il_pair": IlPairRecord,
}


@dataclass(frozen=True)
class DatasetFile:
    """An in-memory dataset: header metadata plus validated records."""

    kind: str
    name: str
    records: tuple = ()
    sc_vocab: ScLabelVocab | None = None
    ner_vocab: NerLabelVocab | None = None
    labels: tuple[str, ...] | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        if self.kind not in KINDS:
            raise DatasetError(f"unknown task kind {self.kind!r}")
        if self.kind == "scnm" and (self.sc_vocab is None or self.ner_vocab is None):
            raise DatasetError("scnm datasets need both an SC and a NER vocabulary")
        if self.kind == "pair_sc":
            if self.labels is None or len(self.labels) < 2:
                raise DatasetError("pair_sc datasets need a label vocabulary of arity >= 2")

    def __len__(self) -> int:
        return len(self.records)

    def header(self) -> dict[str, Any]:
        h: dict[str, Any] = {"kind": self.kind, "name": self.name}
        if self.sc_vocab is not None:
            h["sc_labels"] = list(self.sc_vocab.labels)
        if self.ner_vocab is not None:
            h["ner_labels"] = list(self.ner_vocab.labels)
        if self.labels is not None:
            h["labels"] = list(self.labels)
        h.update(self.extra)
        return h

    def class_of(self, record) -> str:
        """Class label used for stratified sampling."""
        if self.kind == "scnm":
            return record.sc_label
        return record.label


def _canonical(obj: dict[str, Any]) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _validate_dataset_record(dataset: DatasetFile, record, index: int) -> list[str]:
    if dataset.kind == "scnm":
        return validate_record(record, dataset.sc_vocab, dataset.ner_vocab)
    if dataset.kind == "pair_sc":
        violations = check_no_reserved(
            [
                ("sentence_a", record.sentence_a),
                ("sentence_b", record.sentence_b),
                ("label", record.label),
            ]
        )
        if record.label not in dataset.labels:
            violations.append("label not in vocabulary")
        return violations
    violations = check_no_reserved([("surface", record.surface), ("label", record.label)])
    if not record.surface:
        violations.append("surface is empty")
    if not record.label:
        violations.append("label is empty")
    return violations


def validate_dataset(dataset: DatasetFile) -> None:
    """Reject duplicate ids and any record invariant violation."""
    seen: set[str] = set()
    bad: list[str] = []
    for i, record in enumerate(dataset.records):
        if record.id in seen:
            raise DatasetError(f"duplicate id {record.id!r}")
        seen.add(record.id)
        violations = _validate_dataset_record(dataset, record, i)
        if violations:
            bad.append(f"{record.id}: {'; '.join(violations)}")
    if bad:
        raise DatasetError("invalid records: " + " | ".join(bad))


def load(path: str | Path) -> DatasetFile:
    """Read and validate a dataset file.

    Malformed lines fail with their line number; invariant violations fail
    listing the offending record ids.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DatasetError(f"{path}: empty file, expected a header line")

    def _parse(line_no: int, line: str) -> dict[str, Any]:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{path}: malformed line {line_no}: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise DatasetError(f"{path}: malformed line {line_no}: expected an object")
        return obj

    header = _parse(1, lines[0])
    kind = header.get("kind")
    if kind not in KINDS:
        raise DatasetError(f"{path}: header line has unknown task kind {kind!r}")
    record_type = _RECORD_TYPES[kind]

    records = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            raise DatasetError(f"{path}: malformed line {line_no}: blank line")
        obj = _parse(line_no, line)
        try:
            records.append(record_type.from_dict(obj))
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"{path}: malformed line {line_no}: {exc}") from exc

    known = {"kind", "name", "sc_labels", "ner_labels", "labels"}
    try:
        dataset = DatasetFile(
            kind=kind,
            name=header.get("name", path.stem),
            records=tuple(records),
            sc_vocab=ScLabelVocab(tuple(header["sc_labels"])) if "sc_labels" in header else None,
            ner_vocab=NerLabelVocab(tuple(header["ner_labels"])) if "ner_labels" in header else None,
            labels=tuple(header["labels"]) if "labels" in header else None,
            extra={k: v for k, v in header.items() if k not in known},
        )
    except ValueError as exc:
        raise DatasetError(f"{path}: bad header: {exc}") from exc
    validate_dataset(dataset)
    return dataset


def save(dataset: DatasetFile, path: str | Path) -> None:
    """Write ``dataset`` in canonical form (validating it first)."""
    validate_dataset(dataset)
    path = Path(path)
    lines = [_canonical(dataset.header())]
    lines.extend(_canonical(r.to_dict()) for r in dataset.records)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- deterministic shuffling -------------------------------------------------

_MASK64 = (1 << 64) - 1


def _splitmix64_stream(seed: int):
    """The splitmix64 generator: a portable 64-bit stream from one seed."""
    state = seed & _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def shuffled_indices(n: int, seed: int) -> list[int]:
    """Fisher-Yates permutation of range(n) driven by splitmix64(seed).

    Pinned algorithm, not a library RNG, so identical seeds reproduce
    identical shuffles across platforms and implementations: draw one
    64-bit value per step i = n-1 .. 1 and swap position i with position
    (value mod i+1).
    """
    indices = list(range(n))
    stream = _splitmix64_stream(seed)
    for i in range(n - 1, 0, -1):
        j = next(stream) % (i + 1)
        indices[i], indices[j] = indices[j], indices[i]
    return indices


@dataclass(frozen=True)
class SplitSpec:
    """Train ratio plus shuffle seed; the defaults are the reference setup."""

    train_ratio: Fraction = Fraction(9, 10)
    seed: int = 123123

    def __post_init__(self) -> None:
        ratio = Fraction(self.train_ratio)
        object.__setattr__(self, "train_ratio", ratio)
        if not (0 < ratio < 1):
            raise ValueError(f"train_ratio must be strictly between 0 and 1, got {ratio}")


def split(dataset: DatasetFile, spec: SplitSpec = SplitSpec()) -> tuple[DatasetFile, DatasetFile]:
    """Deterministic shuffled train/test partition.

    The shuffled record sequence is cut after floor(ratio * N); the two
    parts keep the shuffled order. Same records + same spec = byte-identical
    outputs.
    """
    n = len(dataset.records)
    if n == 0:
        raise DatasetError("cannot split an empty dataset")
    order = shuffled_indices(n, spec.seed)
    n_train = int(spec.train_ratio * n)  # Fraction * int floors exactly via int()
    shuffled = [dataset.records[i] for i in order]
    train = replace(dataset, name=f"{dataset.name}.train", records=tuple(shuffled[:n_train]))
    test = replace(dataset, name=f"{dataset.name}.test", records=tuple(shuffled[n_train:]))
    return train, test


def sample_few_shot(dataset: DatasetFile, k: int, seed: int) -> DatasetFile:
    """Stratified k-shot sample: exactly k records per class label.

    The whole record list is shuffled once with the pinned generator; the
    first k occurrences of each class are kept, in shuffled order.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    order = shuffled_indices(len(dataset.records), seed)
    shuffled = [dataset.records[i] for i in order]
    # Class universe is the declared vocabulary where there is one, so a
    # label with zero records is an error, not silently absent.
    if dataset.kind == "scnm":
        universe: tuple[str, ...] = dataset.sc_vocab.labels
    elif dataset.kind == "pair_sc":
        universe = dataset.labels
    else:
        universe = tuple(dict.fromkeys(dataset.class_of(r) for r in dataset.records))
    by_class: dict[str, int] = {label: 0 for label in universe}
    for record in dataset.records:
        label = dataset.class_of(record)
        by_class[label] = by_class.get(label, 0) + 1
    short = sorted(label for label, count in by_class.items() if count < k)
    if short:
        raise DatasetError(
            f"classes with fewer than {k} records: {', '.join(repr(s) for s in short)}"
        )
    taken: dict[str, int] = {label: 0 for label in by_class}
    picked = []
    for record in shuffled:
        label = dataset.class_of(record)
        if taken[label] < k:
            taken[label] += 1
            picked.append(record)
    return replace(dataset, name=f"{dataset.name}.{k}shot", records=tuple(picked))


def coarsen_sts(score: float | str | Fraction) -> int:
    """Collapse a 0..5 similarity score on a 0.2 grid to a whole number.

    Round-half-up; over the 26 grid points the buckets come out as sizes
    3,5,5,5,5,3. Off-grid scores are rejected.
    """
    value = Fraction(str(score)) if isinstance(score, float) else Fraction(score)
    fifths = value * 5
    if fifths.denominator != 1 or not (0 <= fifths <= 25):
        raise ValueError(f"score {score!r} is not on the 0.0..5.0 grid with step 0.2")
    return (fifths.numerator + 2) // 5


def sts_grid() -> list[Fraction]:
    """The 26 admissible raw similarity scores, ascending."""
    return [Fraction(i, 5) for i in range(26)]
