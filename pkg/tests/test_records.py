from __future__ import annotations

import pytest

from slgkit import (
    DEFAULT_NER_LABELS,
    DEFAULT_SC_LABELS,
    Entity,
    NerLabelVocab,
    ScLabelVocab,
    ScnmRecord,
    negative_entity,
    validate_record,
)

from conftest import CAP_NER_LABELS, CAP_SC_LABELS


def test_default_vocabularies_are_valid():
    assert ScLabelVocab().labels == DEFAULT_SC_LABELS
    ner = NerLabelVocab()
    assert ner.labels == DEFAULT_NER_LABELS
    assert ner.negative_label == "None"


@pytest.mark.parametrize(
    "labels",
    [
        CAP_SC_LABELS[:4],  # wrong arity
        CAP_SC_LABELS + ("Extra",),
        ("Social", "Social", "Academic", "Technical", "Natural"),  # duplicate
        ("So:cial", "Literature", "Academic", "Technical", "Natural"),  # reserved char
        ("", "Literature", "Academic", "Technical", "Natural"),  # empty
    ],
)
def test_sc_vocab_rejects_bad_label_sets(labels):
    with pytest.raises(ValueError):
        ScLabelVocab(labels)


def test_ner_vocab_requires_trailing_none():
    labels = CAP_NER_LABELS[:-1] + ("Nil",)
    with pytest.raises(ValueError, match="None"):
        NerLabelVocab(labels)


def test_sample_record_is_valid(sample_record, sc_vocab, ner_vocab):
    assert validate_record(sample_record, sc_vocab, ner_vocab) == []


def test_negative_record_is_valid(negative_record, sc_vocab, ner_vocab):
    assert validate_record(negative_record, sc_vocab, ner_vocab) == []


def test_unknown_sc_label_is_reported(sample_record, sc_vocab, ner_vocab):
    record = ScnmRecord(
        id=sample_record.id,
        sentence=sample_record.sentence,
        sc_label="Sport",
        entities=sample_record.entities,
    )
    assert validate_record(record, sc_vocab, ner_vocab) == ["sc_label not in vocabulary"]


def test_span_not_in_sentence_is_reported(sample_record, sc_vocab, ner_vocab):
    record = ScnmRecord(
        id="x",
        sentence=sample_record.sentence,
        sc_label="Social",
        entities=(Entity("Location", "Mars"),),
    )
    assert validate_record(record, sc_vocab, ner_vocab) == [
        "entity 0 span not a substring of sentence"
    ]


# One mutation, one violation: each case breaks exactly one invariant.
@pytest.mark.parametrize(
    "record, fragment",
    [
        (
            ScnmRecord("a", "text with < inside", "Social", (negative_entity(),)),
            "reserved character",
        ),
        (ScnmRecord("b", "plain text", "Nope", (negative_entity(),)), "not in vocabulary"),
        (ScnmRecord("c", "plain text", "Social", ()), "entities is empty"),
        (
            ScnmRecord("d", "plain text", "Social", (Entity("Creature", "plain"),)),
            "label not in vocabulary",
        ),
        (
            ScnmRecord("e", "plain text", "Social", (Entity("None", "plain"),)),
            "negative case but has a non-empty span",
        ),
        (
            ScnmRecord("f", "plain text", "Social", (Entity("Person", ""),)),
            "span is empty",
        ),
        (
            ScnmRecord("g", "plain text", "Social", (Entity("Person", "missing"),)),
            "not a substring",
        ),
    ],
)
def test_each_violation_reported_exactly_once(record, fragment, sc_vocab, ner_vocab):
    violations = validate_record(record, sc_vocab, ner_vocab)
    assert len(violations) == 1
    assert fragment in violations[0]


def test_violation_order_is_field_then_entity_index(sc_vocab, ner_vocab):
    record = ScnmRecord(
        id="multi",
        sentence="has a ; mark",
        sc_label="Sports",
        entities=(Entity("Person", "zzz"), Entity("Creature", "has")),
    )
    violations = validate_record(record, sc_vocab, ner_vocab)
    assert violations[0].startswith("sentence")
    assert violations[1] == "sc_label not in vocabulary"
    assert "entity 0" in violations[2]
    assert "entity 1" in violations[3]


def test_duplicate_spans_are_permitted(sc_vocab, ner_vocab):
    # Overlaps and duplicates are preserved in order, never deduplicated.
    record = ScnmRecord(
        id="dup",
        sentence="Tokyo and Tokyo",
        sc_label="Social",
        entities=(Entity("Location", "Tokyo"), Entity("Location", "Tokyo")),
    )
    assert validate_record(record, sc_vocab, ner_vocab) == []


def test_records_round_trip_through_dicts(sample_record):
    assert ScnmRecord.from_dict(sample_record.to_dict()) == sample_record
