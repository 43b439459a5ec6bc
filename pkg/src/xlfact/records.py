"""Corpus record types, JSON Lines ingestion and dataset statistics.

A corpus is a UTF-8 JSON Lines file, one sample per line:

    {"sample_id": "x1", "language": "hi", "sentence": "...",
     "head": "...", "facts": [{"relation": "...", "tail": "..."}],
     "split": "train"}

Eight language codes are supported (te, bn, ta, gu, mr, en, hi, kn);
anything else is rejected at parse time.  Fact order is preserved from
the source.  Sentences are NFC-normalized on ingestion.  The test
split is expected to be fully aligned and the train split only
partially aligned; this is metadata for consumers, nothing here
enforces it.
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import UnknownLanguageError, ValidationError

RELATION_MARKER = "<R>"
TAIL_MARKER = "<T>"
_MARKERS = (RELATION_MARKER, TAIL_MARKER)

SPLITS = ("train", "test")


class LanguageCode(str, Enum):
    TE = "te"
    BN = "bn"
    TA = "ta"
    GU = "gu"
    MR = "mr"
    EN = "en"
    HI = "hi"
    KN = "kn"

    @classmethod
    def parse(cls, code: str) -> "LanguageCode":
        try:
            return cls(code)
        except ValueError:
            raise UnknownLanguageError(
                f"unknown language code {code!r}; expected one of "
                + ", ".join(m.value for m in cls)
            ) from None


# Fixed column order used by report tables.
LANGUAGE_ORDER = (
    LanguageCode.TE,
    LanguageCode.BN,
    LanguageCode.TA,
    LanguageCode.GU,
    LanguageCode.MR,
    LanguageCode.EN,
    LanguageCode.HI,
    LanguageCode.KN,
)


def _check_no_markers(value: str, what: str) -> None:
    for marker in _MARKERS:
        if marker in value:
            raise ValidationError(f"{what} must not contain the {marker} marker: {value!r}")


@dataclass(frozen=True)
class Fact:
    """One (relation, tail) pair; both sides non-empty and marker-free."""

    relation: str
    tail: str

    def __post_init__(self):
        object.__setattr__(self, "relation", self.relation.strip())
        object.__setattr__(self, "tail", self.tail.strip())
        if not self.relation:
            raise ValidationError("fact relation must be non-empty")
        if not self.tail:
            raise ValidationError("fact tail must be non-empty")
        _check_no_markers(self.relation, "relation")
        _check_no_markers(self.tail, "tail")


@dataclass(frozen=True)
class FactSet:
    """A head entity plus its ordered facts for one sentence."""

    head: str
    facts: tuple[Fact, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "head", self.head.strip())
        object.__setattr__(self, "facts", tuple(self.facts))
        if not self.head:
            raise ValidationError("head entity must be non-empty")


@dataclass(frozen=True)
class SampleRecord:
    sample_id: str
    language: LanguageCode
    sentence: str
    head: str
    gold: FactSet
    split: str

    def __post_init__(self):
        if not self.sentence.strip():
            raise ValidationError("sentence must be non-empty")
        if self.gold.head != self.head:
            raise ValidationError(
                f"gold fact set head {self.gold.head!r} differs from record head {self.head!r}"
            )
        if self.split not in SPLITS:
            raise ValidationError(f"split must be one of {SPLITS}, got {self.split!r}")


_REQUIRED_KEYS = ("sample_id", "language", "sentence", "head", "facts", "split")


def parse_sample(line: str) -> SampleRecord:
    """Parse one corpus JSON line into a validated SampleRecord.

    Unknown keys are ignored; missing required keys, unknown language
    codes, empty sentence/head and marker-containing facts are errors.
    """
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError("corpus line must be a JSON object")
    missing = [k for k in _REQUIRED_KEYS if k not in raw]
    if missing:
        raise ValidationError(f"missing required keys: {', '.join(missing)}")

    for key in ("sample_id", "language", "sentence", "head", "split"):
        if not isinstance(raw[key], str):
            raise ValidationError(f"key {key!r} must be a string")
    if not isinstance(raw["facts"], list):
        raise ValidationError("key 'facts' must be an array")

    language = LanguageCode.parse(raw["language"])
    sentence = unicodedata.normalize("NFC", raw["sentence"])
    head = raw["head"].strip()
    if not head:
        raise ValidationError("head must be non-empty")

    facts = []
    for i, item in enumerate(raw["facts"]):
        if not isinstance(item, dict) or "relation" not in item or "tail" not in item:
            raise ValidationError(f"fact {i} must be an object with 'relation' and 'tail'")
        if not isinstance(item["relation"], str) or not isinstance(item["tail"], str):
            raise ValidationError(f"fact {i}: relation and tail must be strings")
        facts.append(Fact(item["relation"], item["tail"]))

    return SampleRecord(
        sample_id=raw["sample_id"],
        language=language,
        sentence=sentence,
        head=head,
        gold=FactSet(head=head, facts=tuple(facts)),
        split=raw["split"],
    )


def serialize_sample(record: SampleRecord) -> str:
    """Inverse of parse_sample: one canonical JSON line, no newline."""
    return json.dumps(
        {
            "sample_id": record.sample_id,
            "language": record.language.value,
            "sentence": record.sentence,
            "head": record.head,
            "facts": [{"relation": f.relation, "tail": f.tail} for f in record.gold.facts],
            "split": record.split,
        },
        ensure_ascii=False,
    )


def load_corpus(path) -> list[SampleRecord]:
    """Load a JSONL corpus file; blank lines are skipped.

    The first bad line aborts the load with its 1-based line number.
    """
    records = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                records.append(parse_sample(line))
            except ValidationError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return records


@dataclass(frozen=True)
class DatasetStats:
    """Histograms over gold facts plus the relation mass curve."""

    relation_histogram: Mapping[str, int]
    language_histogram: Mapping[LanguageCode, int]
    avg_facts_per_sentence: float
    total_records: int
    total_facts: int

    def top_k_mass(self, k: int) -> float:
        """Fraction of all facts covered by the k most frequent relations."""
        if k < 0:
            raise ValidationError("k must be >= 0")
        if self.total_facts == 0:
            return 0.0
        counts = sorted(self.relation_histogram.values(), reverse=True)
        return sum(counts[:k]) / self.total_facts


def compute_stats(records: Iterable[SampleRecord]) -> DatasetStats:
    records = list(records)
    if not records:
        raise ValidationError("cannot compute statistics over an empty corpus")
    relation_histogram: Counter[str] = Counter()
    language_histogram: Counter[LanguageCode] = Counter()
    total_facts = 0
    for record in records:
        n = len(record.gold.facts)
        total_facts += n
        language_histogram[record.language] += n
        for fact in record.gold.facts:
            relation_histogram[fact.relation] += 1
    return DatasetStats(
        relation_histogram=dict(relation_histogram),
        language_histogram=dict(language_histogram),
        avg_facts_per_sentence=total_facts / len(records),
        total_records=len(records),
        total_facts=total_facts,
    )


def stats_to_json(stats: DatasetStats) -> dict:
    n_relations = len(stats.relation_histogram)
    return {
        "total_records": stats.total_records,
        "total_facts": stats.total_facts,
        "avg_facts_per_sentence": stats.avg_facts_per_sentence,
        "relation_histogram": dict(
            sorted(stats.relation_histogram.items(), key=lambda kv: (-kv[1], kv[0]))
        ),
        "language_histogram": {
            lang.value: stats.language_histogram[lang]
            for lang in LANGUAGE_ORDER
            if lang in stats.language_histogram
        },
        "top_k_mass": [stats.top_k_mass(k) for k in range(1, n_relations + 1)],
    }


def render_stats(stats: DatasetStats, top: int = 20) -> str:
    """Aligned plain-text statistics table."""
    lines = [
        f"records            {stats.total_records}",
        f"facts              {stats.total_facts}",
        f"facts/sentence     {stats.avg_facts_per_sentence:.4f}",
        f"distinct relations {len(stats.relation_histogram)}",
        "",
        "facts per language",
    ]
    for lang in LANGUAGE_ORDER:
        if lang in stats.language_histogram:
            lines.append(f"  {lang.value:<4} {stats.language_histogram[lang]}")
    lines.append("")
    lines.append(f"top {top} relations (count, cumulative mass)")
    ranked = sorted(stats.relation_histogram.items(), key=lambda kv: (-kv[1], kv[0]))
    width = max((len(rel) for rel, _ in ranked[:top]), default=0)
    for k, (rel, count) in enumerate(ranked[:top], 1):
        lines.append(f"  {rel:<{width}} {count:>7} {stats.top_k_mass(k):.4f}")
    return "\n".join(lines) + "\n"
