"""Grammar check and structural decomposition of generated output text.

The target grammar for the canonical format is::

    text   := "<" SC ">" "NER" entity*
    entity := ":" LABEL ";" SPAN
    SC     := non-empty run without ">"
    LABEL  := non-empty run without ":" or ";"
    SPAN   := possibly-empty run up to the next ":" or end of string

SC-only and pair-sentence targets use just ``"<" SC ">"``; NER-only targets
use ``"NER" entity*``. A string is format-correct iff it matches its
grammar completely (no trailing text); label values are deliberately not
checked against any vocabulary. Parsing is total: malformed input yields a
``ParsedOutput`` with ``format_ok=False`` and a position-bearing
diagnostic, never an exception, and no fields are extracted from invalid
strings.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formats import FormatId
from .records import Entity

LABEL_FORMATS = frozenset({FormatId.F5, FormatId.SC_ONLY, FormatId.PAIR_SC})
ENTITY_FORMATS = frozenset({FormatId.F5, FormatId.NER_ONLY})
PARSEABLE_FORMATS = LABEL_FORMATS | ENTITY_FORMATS


@dataclass(frozen=True)
class ParsedOutput:
    """Structured decomposition of a generated string.

    ``sc_label`` is None for NER-only targets; ``entities`` is None for
    label-only targets. Both are None when ``format_ok`` is False.
    """

    format_ok: bool
    sc_label: str | None = None
    entities: tuple[Entity, ...] | None = None
    diagnostic: str = ""


def _invalid(diagnostic: str) -> ParsedOutput:
    return ParsedOutput(format_ok=False, diagnostic=diagnostic)


def _scan_sc(text: str) -> tuple[str, int] | ParsedOutput:
    """Consume '<' SC '>' from the start; return (label, next position)."""
    if not text.startswith("<"):
        return _invalid("expected '<' at position 0")
    end = text.find(">", 1)
    if end == -1:
        return _invalid("expected '>' before end of SC segment")
    if end == 1:
        return _invalid("SC label at position 1 is empty")
    return text[1:end], end + 1


def _scan_entities(text: str, pos: int) -> tuple[Entity, ...] | ParsedOutput:
    """Consume (':' LABEL ';' SPAN)* from ``pos`` to the end of the string."""
    entities: list[Entity] = []
    n = len(text)
    while pos < n:
        if text[pos] != ":":
            return _invalid(f"expected ':' at position {pos}, found {text[pos]!r}")
        i = pos + 1
        while i < n and text[i] not in (":", ";"):
            i += 1
        if i >= n:
            return _invalid(f"expected ';' to close NER label starting at position {pos + 1}")
        if text[i] == ":":
            return _invalid(
                f"NER label starting at position {pos + 1} contains ':' before ';'"
            )
        if i == pos + 1:
            return _invalid(f"NER label at position {pos + 1} is empty")
        label = text[pos + 1 : i]
        span_start = i + 1
        next_colon = text.find(":", span_start)
        if next_colon == -1:
            entities.append(Entity(label, text[span_start:]))
            pos = n
        else:
            entities.append(Entity(label, text[span_start:next_colon]))
            pos = next_colon
    return tuple(entities)


def parse_output(text: str, format: FormatId) -> ParsedOutput:
    """Decompose ``text`` under the grammar for ``format``.

    Accepts any string; failure is a value. Only F5, SC_ONLY, NER_ONLY and
    PAIR_SC targets have a grammar; other format ids are a usage error.
    """
    if format not in PARSEABLE_FORMATS:
        raise ValueError(f"no output grammar for format {format.value}")

    if format is FormatId.NER_ONLY:
        if not text.startswith("NER"):
            return _invalid("expected 'NER' at position 0")
        entities = _scan_entities(text, 3)
        if isinstance(entities, ParsedOutput):
            return entities
        return ParsedOutput(format_ok=True, entities=entities)

    scanned = _scan_sc(text)
    if isinstance(scanned, ParsedOutput):
        return scanned
    sc_label, pos = scanned

    if format in (FormatId.SC_ONLY, FormatId.PAIR_SC):
        if pos != len(text):
            return _invalid(f"trailing text at position {pos}")
        return ParsedOutput(format_ok=True, sc_label=sc_label)

    if text[pos : pos + 3] != "NER":
        return _invalid(f"expected 'NER' at position {pos}")
    entities = _scan_entities(text, pos + 3)
    if isinstance(entities, ParsedOutput):
        return entities
    return ParsedOutput(format_ok=True, sc_label=sc_label, entities=entities)


def check_format(text: str, format: FormatId) -> tuple[bool, str]:
    """Structural validity of ``text`` plus the diagnostic when invalid.

    Thin wrapper over :func:`parse_output` so validity and extraction can
    never disagree.
    """
    parsed = parse_output(text, format)
    return parsed.format_ok, parsed.diagnostic
