"""Walkthrough: greedy decoding with the forced-prefix constraint.

Every well-formed target starts with the opening mark "<", so the engine
can substitute the first generated token with "<" and let the model
continue from there. This demo wraps a faithful replay backend with a
first-token corruptor to show what the constraint buys.

Run with: python3 demos/constrained_decoding.py
"""

import random

from slgkit import (
    ConstraintSpec,
    FirstTokenNoiseBackend,
    FormatId,
    NerLabelVocab,
    ScLabelVocab,
    TableBackend,
    batch_decode,
    convert_scnm,
    decode,
    evaluate,
    percent,
)
from slgkit.records import Entity, ScnmRecord

sc_vocab = ScLabelVocab()
ner_vocab = NerLabelVocab()

rng = random.Random(7)
words = "sora umi yama kawa machi hito kuruma hon inu neko".split()
pairs = []
for i in range(200):
    sentence = " ".join(rng.choice(words) for _ in range(6)) + f" no{i}"
    span = sentence.split()[0]
    record = ScnmRecord(
        id=f"demo{i}",
        sentence=sentence,
        sc_label=rng.choice(sc_vocab.labels),
        entities=(Entity(rng.choice(ner_vocab.labels[:-1]), span),),
    )
    pairs.append(convert_scnm(record, FormatId.F5, sc_vocab, ner_vocab))

table = TableBackend.from_targets(pairs)
noisy = FirstTokenNoiseBackend(table, p=1.0, seed=99)

print("One decode, step by step. The first step is forced:")
result = decode(noisy, pairs[0].input_text, ConstraintSpec())
for step in result.steps[:4]:
    flag = "forced" if step.forced else "argmax"
    print(f"  step {step.index}: chose {step.chosen!r} ({flag})")
print(f"  ... -> {result.output_text!r}\n")

for enabled, title in ((True, "constraint ON"), (False, "constraint OFF")):
    spec = ConstraintSpec(enabled=enabled)
    backend = FirstTokenNoiseBackend(table, p=1.0, seed=99)
    results = batch_decode(backend, pairs, spec)
    report = evaluate(((r.generated, r.gold) for r in results), FormatId.F5)
    print(f"{title}: first output {results[0].generated[:40]!r}...")
    for name, value in report.accuracies().items():
        print(f"  {name:<6} {percent(value)}")
    print()

print("With the first token corrupted on every input, the constraint keeps")
print("format accuracy at 100 while the unconstrained decode collapses.")
