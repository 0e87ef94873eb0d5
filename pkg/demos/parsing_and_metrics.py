"""Walkthrough: format checking, parsing, and strict accuracy metrics.

Run with: python3 demos/parsing_and_metrics.py
"""

from slgkit import FormatId, check_format, evaluate, parse_output, render_table
from slgkit.bundled import eval_demo_paths

print("Format validity is purely structural; wrong labels still count as")
print("format-correct as long as the delimiter skeleton is intact.\n")

samples = [
    "<Social>NER:Person;Shinzo Abe:Location;Japan",
    "<Academic>NER:Person;Shinzo Abe:Location;Japan",   # wrong class label
    "<Company;nabisuko",                                # broken skeleton
    "Location Location Location Location Location",    # free text
]
for text in samples:
    ok, diagnostic = check_format(text, FormatId.F5)
    verdict = "ok" if ok else f"INVALID ({diagnostic})"
    print(f"{text!r:>75}  ->  {verdict}")

print("\nA valid string decomposes into its class label and entity pairs:")
parsed = parse_output(samples[0], FormatId.F5)
print("sc_label:", parsed.sc_label)
for entity in parsed.entities:
    print(f"entity  : {entity.label} = {entity.span!r}")

print("\nScoring the bundled four-row fixture. An output only counts as a")
print("correct text when its whole parsed structure equals the gold one;")
print("class labels and entity sequences are also counted separately, and")
print("a format failure zeroes everything.\n")

generated_path, gold_path = eval_demo_paths()
generated = generated_path.read_text(encoding="utf-8").splitlines()
gold = gold_path.read_text(encoding="utf-8").splitlines()
report = evaluate(zip(generated, gold), FormatId.F5)
print(render_table(report))
