"""Walkthrough: turning annotated records into prompt input/output text.

Run with: python3 demos/format_conversion.py
"""

from slgkit import (
    Entity,
    FormatId,
    NerLabelVocab,
    ScLabelVocab,
    ScnmRecord,
    convert_il_pair,
    convert_ner_only,
    convert_pair_sc,
    convert_sc_only,
    convert_scnm,
    negative_entity,
)

sc_vocab = ScLabelVocab(("Social", "Literature-and-Art", "Academic", "Technical", "Natural"))
ner_vocab = NerLabelVocab(
    ("Person", "Company", "Political-Org", "Other-Org", "Location",
     "Public-Facility", "Product", "Event", "None")
)

record = ScnmRecord(
    id="demo-1",
    sentence="In 2020, Shinzo Abe resigned as Prime Minister of Japan",
    sc_label="Social",
    entities=(Entity("Person", "Shinzo Abe"), Entity("Location", "Japan")),
)

print("The five single-sentence format variants, simplest to richest.")
print("F5 is the canonical one: the class label rides between < and >,")
print("entity labels between : and ;, candidate labels are spelled out")
print("in the input so the model only has to copy them.\n")

for fmt in (FormatId.F1, FormatId.F2, FormatId.F3, FormatId.F4, FormatId.F5):
    pair = convert_scnm(record, fmt, sc_vocab, ner_vocab)
    print(f"--- {fmt.value} ---")
    print("input :", pair.input_text)
    print("target:", pair.target_text)
    print()

print("A sentence with no entities serializes the negative case as :None;\n")
negative = ScnmRecord("demo-2", "Nothing notable happens here", "Academic",
                      (negative_entity(),))
print("target:", convert_scnm(negative, FormatId.F5, sc_vocab, ner_vocab).target_text)

print("\nThe two halves of the joint task can be split apart:")
print("SC only :", convert_sc_only(record, sc_vocab).target_text)
print("NER only:", convert_ner_only(record, ner_vocab).target_text)

print("\nSurface/label pairs for incremental-learning corpora stay bare:")
pair = convert_il_pair("Japan", "Location")
print(f"input: {pair.input_text!r} -> target: {pair.target_text!r}")

print("\nSentence-pair classification reuses the bracket grammar with any")
print("label set of arity >= 2:")
pair = convert_pair_sc(
    "A man is eating a donut.",
    "Someone is eating food.",
    "entailment",
    ("entailment", "neutral", "contradiction"),
)
print("input :", pair.input_text)
print("target:", pair.target_text)
