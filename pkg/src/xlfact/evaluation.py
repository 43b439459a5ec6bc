"""Strict word-match scoring of predicted facts.

A predicted fact can match a gold fact only when the relation strings
are exactly equal and the normalized tails share at least one token;
synonyms do not count (a predicted "writer" never matches gold
"author").  Matching within a sample is maximum-cardinality one-to-one
so the score does not depend on prediction order.  Precision/recall
are micro-aggregated from matched/predicted/gold counts, per language
and overall; every F1 is the harmonic mean of the paired P and R.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ValidationError
from .records import LANGUAGE_ORDER, FactSet, LanguageCode, SampleRecord
from .textnorm import token_set


@dataclass(frozen=True)
class MatchDecision:
    pred_index: int
    gold_index: int
    relation_match: bool
    tail_overlap_tokens: frozenset[str]


@dataclass(frozen=True)
class Score:
    """Micro counts plus the derived precision/recall/F1."""

    precision: float
    recall: float
    f1: float
    matched: int
    predicted: int
    gold: int


@dataclass(frozen=True)
class EvalReport:
    per_language: Mapping[LanguageCode, Score]
    overall: Score


def normalize_tail(text: str) -> frozenset[str]:
    """Lowercased token set with punctuation stripped."""
    return token_set(text)


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean, 0 when both are 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _eligible(pred: FactSet, gold: FactSet) -> list[list[frozenset[str]| None]]:
    table: list[list[frozenset[str] | None]] = []
    gold_tails = [normalize_tail(g.tail) for g in gold.facts]
    for p in pred.facts:
        p_tail = normalize_tail(p.tail)
        row: list[frozenset[str] | None] = []
        for g, g_tail in zip(gold.facts, gold_tails):
            overlap = p_tail & g_tail
            row.append(overlap if p.relation == g.relation and overlap else None)
        table.append(row)
    return table


def match_facts(pred: FactSet, gold: FactSet) -> list[MatchDecision]:
    """Maximum one-to-one matching between eligible fact pairs.

    Uses augmenting-path search with deterministic ascending iteration,
    so the result is reproducible and order-independent in size.
    """
    table = _eligible(pred, gold)
    n_pred, n_gold = len(pred.facts), len(gold.facts)
    owner = [-1] * n_gold  # gold index -> matched pred index

    def try_assign(p: int, visited: set[int]) -> bool:
        for g in range(n_gold):
            if table[p][g] is None or g in visited:
                continue
            visited.add(g)
            if owner[g] == -1 or try_assign(owner[g], visited):
                owner[g] = p
                return True
        return False

    for p in range(n_pred):
        try_assign(p, set())

    decisions = []
    for g in range(n_gold):
        p = owner[g]
        if p != -1:
            decisions.append(
                MatchDecision(
                    pred_index=p,
                    gold_index=g,
                    relation_match=True,
                    tail_overlap_tokens=table[p][g] or frozenset(),
                )
            )
    decisions.sort(key=lambda d: (d.pred_index, d.gold_index))
    return decisions


def _score(matched: int, predicted: int, gold: int) -> Score:
    precision = matched / predicted if predicted else 0.0
    recall = matched / gold if gold else 0.0
    return Score(
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        matched=matched,
        predicted=predicted,
        gold=gold,
    )


def score_corpus(
    predictions: Mapping[str, FactSet], records: Iterable[SampleRecord]
) -> EvalReport:
    """Micro P/R/F1 per language plus overall across all languages.

    Records without a prediction contribute their gold facts with zero
    predicted; a prediction whose sample_id is not in the corpus is an
    error.
    """
    records = list(records)
    by_id: dict[str, SampleRecord] = {}
    for record in records:
        if record.sample_id in by_id:
            raise ValidationError(f"duplicate sample_id {record.sample_id!r} in corpus")
        by_id[record.sample_id] = record
    for sample_id in predictions:
        if sample_id not in by_id:
            raise ValidationError(f"prediction for unknown sample_id {sample_id!r}")

    counts: dict[LanguageCode, list[int]] = {}
    for record in records:
        matched = predicted = 0
        prediction = predictions.get(record.sample_id)
        if prediction is not None:
            predicted = len(prediction.facts)
            matched = len(match_facts(prediction, record.gold))
        tally = counts.setdefault(record.language, [0, 0, 0])
        tally[0] += matched
        tally[1] += predicted
        tally[2] += len(record.gold.facts)

    per_language = {
        lang: _score(*counts[lang]) for lang in LANGUAGE_ORDER if lang in counts
    }
    total = [sum(t[i] for t in counts.values()) for i in range(3)]
    return EvalReport(per_language=per_language, overall=_score(*total))


# -- Rendering ---------------------------------------------------------

def report_to_json(report: EvalReport) -> dict:
    def score_dict(score: Score) -> dict:
        return {
            "precision": score.precision,
            "recall": score.recall,
            "f1": score.f1,
            "matched": score.matched,
            "predicted": score.predicted,
            "gold": score.gold,
        }

    return {
        "per_language": {
            lang.value: score_dict(report.per_language[lang])
            for lang in LANGUAGE_ORDER
            if lang in report.per_language
        },
        "overall": score_dict(report.overall),
    }


def report_from_json(document: dict) -> EvalReport:
    def parse_score(raw: dict) -> Score:
        return Score(
            precision=float(raw["precision"]),
            recall=float(raw["recall"]),
            f1=float(raw["f1"]),
            matched=int(raw["matched"]),
            predicted=int(raw["predicted"]),
            gold=int(raw["gold"]),
        )

    return EvalReport(
        per_language={
            LanguageCode.parse(code): parse_score(raw)
            for code, raw in document["per_language"].items()
        },
        overall=parse_score(document["overall"]),
    )


def render_report(report: EvalReport) -> tuple[str, str]:
    """Aligned text table plus the JSON document as a string.

    Language columns follow the fixed order te, bn, ta, gu, mr, en,
    hi, kn (present languages only) with "All" last.
    """
    languages = [lang for lang in LANGUAGE_ORDER if lang in report.per_language]
    headers = [lang.value for lang in languages] + ["All"]
    rows: list[tuple[str, list[str]]] = []
    for field, fmt in (
        ("precision", "{:.4f}"),
        ("recall", "{:.4f}"),
        ("f1", "{:.4f}"),
        ("matched", "{:d}"),
        ("predicted", "{:d}"),
        ("gold", "{:d}"),
    ):
        cells = [fmt.format(getattr(report.per_language[lang], field)) for lang in languages]
        cells.append(fmt.format(getattr(report.overall, field)))
        rows.append((field, cells))

    label_width = max(len(name) for name, _ in rows)
    widths = [
        max(len(headers[i]), max(len(cells[i]) for _, cells in rows))
        for i in range(len(headers))
    ]
    lines = [
        " " * label_width
        + "  "
        + "  ".join(h.rjust(widths[i]) for i, h in enumerate(headers))
    ]
    for name, cells in rows:
        lines.append(
            name.ljust(label_width)
            + "  "
            + "  ".join(cells[i].rjust(widths[i]) for i in range(len(cells)))
        )
    text = "\n".join(lines) + "\n"
    return text, json.dumps(report_to_json(report), indent=2) + "\n"
