from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from slgkit import Entity, NerLabelVocab, ScLabelVocab, ScnmRecord, negative_entity


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # Expose per-phase outcomes on the item so the acceptance suite can
    # print one pass/fail line per criterion.
    outcome = yield
    report = outcome.get_result()
    setattr(item, "rep_" + report.when, report)

# Capitalized vocabularies matching the showcase sentence used throughout
# the docs and golden files.
CAP_SC_LABELS = ("Social", "Literature-and-Art", "Academic", "Technical", "Natural")
CAP_NER_LABELS = (
    "Person",
    "Company",
    "Political-Org",
    "Other-Org",
    "Location",
    "Public-Facility",
    "Product",
    "Event",
    "None",
)

SAMPLE_SENTENCE = "In 2020, Shinzo Abe resigned as Prime Minister of Japan"
SAMPLE_TARGET = "<Social>NER:Person;Shinzo Abe:Location;Japan"


@pytest.fixture
def sc_vocab() -> ScLabelVocab:
    return ScLabelVocab(CAP_SC_LABELS)


@pytest.fixture
def ner_vocab() -> NerLabelVocab:
    return NerLabelVocab(CAP_NER_LABELS)


@pytest.fixture
def sample_record() -> ScnmRecord:
    return ScnmRecord(
        id="sample-1",
        sentence=SAMPLE_SENTENCE,
        sc_label="Social",
        entities=(Entity("Person", "Shinzo Abe"), Entity("Location", "Japan")),
    )


@pytest.fixture
def negative_record() -> ScnmRecord:
    return ScnmRecord(
        id="neg-1",
        sentence="A sentence mentioning nothing in particular",
        sc_label="Academic",
        entities=(negative_entity(),),
    )


# Sentence characters: anything except the reserved marks, surrogates, and
# newlines (records live one-per-line in dataset files).
sentence_chars = st.characters(
    blacklist_characters="<>:;\n\r", blacklist_categories=("Cs",)
)
sentence_texts = st.text(alphabet=sentence_chars, min_size=1, max_size=40)


@st.composite
def valid_records(draw, sc_vocab: ScLabelVocab, ner_vocab: NerLabelVocab):
    """Random records satisfying every domain invariant."""
    sentence = draw(sentence_texts)
    sc_label = draw(st.sampled_from(sc_vocab.labels))
    if draw(st.integers(0, 9)) == 0:
        entities = (negative_entity(),)
    else:
        count = draw(st.integers(1, 4))
        entities = []
        for _ in range(count):
            start = draw(st.integers(0, len(sentence) - 1))
            end = draw(st.integers(start + 1, len(sentence)))
            label = draw(st.sampled_from(ner_vocab.labels[:-1]))
            entities.append(Entity(label, sentence[start:end]))
        entities = tuple(entities)
    rid = f"r{draw(st.integers(0, 10**6))}"
    return ScnmRecord(id=rid, sentence=sentence, sc_label=sc_label, entities=entities)


_RANDOM_CHARS = (
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 "
    "日本語の文です漢字かな"
)


def make_random_record(rng: random.Random, sc_vocab: ScLabelVocab, ner_vocab: NerLabelVocab, rid: str) -> ScnmRecord:
    """Fast seeded record generator for high-volume determinism checks."""
    sentence = "".join(rng.choice(_RANDOM_CHARS) for _ in range(rng.randint(8, 60)))
    sc_label = rng.choice(sc_vocab.labels)
    if rng.random() < 0.1:
        entities = (negative_entity(),)
    else:
        entities = []
        for _ in range(rng.randint(1, 4)):
            start = rng.randrange(len(sentence))
            end = rng.randint(start + 1, len(sentence))
            entities.append(Entity(rng.choice(ner_vocab.labels[:-1]), sentence[start:end]))
        entities = tuple(entities)
    return ScnmRecord(id=rid, sentence=sentence, sc_label=sc_label, entities=entities)
