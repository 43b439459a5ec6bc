"""Linearized fact codec for generative extraction models.

A fact set serializes to a single target string in the grammar

    ("<R>" relation "<T>" tail)*

with single spaces around the markers, e.g.

    <R> occupation <T> writer <R> birth place <T> Delhi

Parsing is the lenient inverse: model output is arbitrary text, so the
parser scans left to right for marker pairs and drops (and counts)
fragments that are missing a side.  There is no escaping; payloads
containing a marker are rejected at serialization time instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ValidationError
from .records import RELATION_MARKER, TAIL_MARKER, Fact, FactSet


@dataclass
class ParseReport:
    """Outcome of lenient parsing: recovered facts plus damage counts."""

    facts: list[Fact] = field(default_factory=list)
    dropped_fragments: int = 0
    warnings: list[str] = field(default_factory=list)


def serialize_facts(fact_set: FactSet) -> str:
    """Serialize facts to the marker grammar; empty fact list gives ""."""
    parts = []
    for fact in fact_set.facts:
        # Fact construction already forbids markers; re-check so that the
        # grammar stays invertible even for hand-rolled Fact instances.
        for payload in (fact.relation, fact.tail):
            if RELATION_MARKER in payload or TAIL_MARKER in payload:
                raise ValidationError(f"fact payload contains a marker: {payload!r}")
        parts.append(f"{RELATION_MARKER} {fact.relation} {TAIL_MARKER} {fact.tail}")
    return " ".join(parts)


def parse_linearized(text: str) -> ParseReport:
    """Lenient inverse of serialize_facts; never raises.

    Every span starting at a ``<R>`` marker and bounded by the next
    ``<R>`` (or end of string) is one fragment.  A fragment parses to a
    Fact when it contains exactly one ``<T>`` with non-empty text on
    both sides; anything else is dropped and counted.  Text before the
    first ``<R>`` is dropped as a fragment if it contains a stray
    ``<T>``, otherwise it is ignored with a warning.
    """
    report = ParseReport()
    segments = text.split(RELATION_MARKER)

    prefix = segments[0]
    if TAIL_MARKER in prefix:
        report.dropped_fragments += 1
        report.warnings.append(f"{TAIL_MARKER} before any {RELATION_MARKER}; fragment dropped")
    elif prefix.strip():
        report.warnings.append(f"ignored text before first {RELATION_MARKER}: {prefix.strip()!r}")

    for i, fragment in enumerate(segments[1:]):
        pieces = fragment.split(TAIL_MARKER)
        if len(pieces) == 1:
            report.dropped_fragments += 1
            report.warnings.append(f"fragment {i}: missing {TAIL_MARKER} marker")
            continue
        if len(pieces) > 2:
            report.dropped_fragments += 1
            report.warnings.append(f"fragment {i}: multiple {TAIL_MARKER} markers")
            continue
        relation, tail = pieces[0].strip(), pieces[1].strip()
        if not relation:
            report.dropped_fragments += 1
            report.warnings.append(f"fragment {i}: empty relation")
            continue
        if not tail:
            report.dropped_fragments += 1
            report.warnings.append(f"fragment {i}: empty tail")
            continue
        report.facts.append(Fact(relation, tail))
    return report
