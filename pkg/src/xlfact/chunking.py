"""Tail-candidate extraction from annotated English text.

The extraction stage works on translated English sentences that carry
universal PoS tags and dependency links (CoNLL-U input).  Dates are
recognized first and masked with ``__DATE_k__`` dummies so they cannot
leak into other entity spans; they re-enter at the end as candidates
carrying their normalized ISO value.  Candidate selection then applies
four rules to the base noun chunks:

1. chunks with high lexical overlap with the head entity are removed
   (token-set IoU >= 0.5 or full containment in the head's tokens);
2. chunks rooted at a pronoun are removed;
3. every maximal run of ADJ/PROPN tokens containing at least one
   PROPN becomes a candidate of its own;
4. the root of each surviving chunk is added separately when it is a
   plain NOUN.

Candidates are de-duplicated case-insensitively, first occurrence wins.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ValidationError
from .textnorm import token_set

NOMINAL_TAGS = frozenset({"NOUN", "PROPN", "PRON"})
PROPN_RUN_TAGS = frozenset({"ADJ", "PROPN"})
# Left-side dependents pulled into a chunk (base relation, subtypes
# like flat:name compare equal).
CHUNK_DEP_RELS = frozenset({"det", "amod", "compound", "nummod", "poss", "flat"})

HEAD_OVERLAP_IOU = 0.5

CANDIDATE_KINDS = ("chunk", "propn_span", "root_noun", "date")


@dataclass(frozen=True)
class AnnotatedToken:
    index: int  # 1-based
    surface: str
    upos: str
    head_index: int  # 0 = root
    deprel: str


@dataclass(frozen=True)
class AnnotatedSentence:
    tokens: tuple[AnnotatedToken, ...]
    raw: str

    def token(self, index: int) -> AnnotatedToken:
        return self.tokens[index - 1]

    def span_text(self, start: int, end: int) -> str:
        """Surface text of tokens start..end inclusive (1-based)."""
        return " ".join(t.surface for t in self.tokens[start - 1 : end])


@dataclass(frozen=True)
class NounChunk:
    start: int
    end: int  # inclusive
    root_index: int


@dataclass(frozen=True)
class DateMention:
    start: int  # character offsets into the raw text
    end: int  # exclusive
    iso: str  # YYYY, YYYY-MM or YYYY-MM-DD
    dummy: str  # __DATE_k__, k = 0-based mention ordinal


@dataclass(frozen=True)
class TailCandidate:
    text: str
    span: tuple[int, int]
    kind: str


# -- CoNLL-U -----------------------------------------------------------

def parse_conllu(text: str) -> list[AnnotatedSentence]:
    """Parse CoNLL-U input (10 tab-separated columns per token line).

    Consumes ID, FORM, UPOS, HEAD and DEPREL; comment lines provide the
    raw text via ``# text = ...`` when present.  Token IDs must be
    plain contiguous integers and the dependency links must form a
    single tree.
    """
    sentences = []
    block: list[list[str]] = []
    raw_text: str | None = None
    line_of_block_start = 1

    def flush(lineno: int):
        nonlocal block, raw_text
        if block:
            sentences.append(_build_sentence(block, raw_text, lineno))
        block = []
        raw_text = None

    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            flush(line_of_block_start)
            line_of_block_start = lineno + 1
            continue
        if line.startswith("#"):
            match = re.match(r"#\s*text\s*=\s*(.*)", line)
            if match:
                raw_text = match.group(1)
            continue
        columns = line.split("\t")
        if len(columns) != 10:
            raise ValidationError(
                f"line {lineno}: expected 10 tab-separated columns, found {len(columns)}"
            )
        block.append(columns)
    flush(line_of_block_start)
    return sentences


def _build_sentence(rows: list[list[str]], raw_text: str | None, lineno: int) -> AnnotatedSentence:
    tokens = []
    for i, columns in enumerate(rows):
        try:
            index = int(columns[0])
            head = int(columns[6])
        except ValueError:
            raise ValidationError(
                f"sentence at line {lineno}: non-integer ID or HEAD ({columns[0]!r}, {columns[6]!r})"
            ) from None
        if index != i + 1:
            raise ValidationError(f"sentence at line {lineno}: non-contiguous token IDs")
        tokens.append(
            AnnotatedToken(
                index=index, surface=columns[1], upos=columns[3], head_index=head, deprel=columns[7]
            )
        )
    n = len(tokens)
    children: dict[int, list[int]] = {i: [] for i in range(n + 1)}
    roots = []
    for token in tokens:
        if token.head_index == token.index:
            raise ValidationError(f"sentence at line {lineno}: token {token.index} heads itself")
        if not 0 <= token.head_index <= n:
            raise ValidationError(
                f"sentence at line {lineno}: HEAD {token.head_index} out of range"
            )
        if token.head_index == 0:
            roots.append(token.index)
        else:
            children[token.head_index].append(token.index)
    if len(roots) != 1:
        raise ValidationError(f"sentence at line {lineno}: expected exactly one root, found {len(roots)}")
    seen = set()
    stack = [roots[0]]
    while stack:
        node = stack.pop()
        if node in seen:
            raise ValidationError(f"sentence at line {lineno}: dependency cycle at token {node}")
        seen.add(node)
        stack.extend(children[node])
    if len(seen) != n:
        raise ValidationError(f"sentence at line {lineno}: dependencies do not form a single tree")
    raw = raw_text if raw_text is not None else " ".join(t.surface for t in tokens)
    return AnnotatedSentence(tokens=tuple(tokens), raw=raw)


# -- Dates -------------------------------------------------------------

_MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5, "june": 6,
    "july": 7, "august": 8, "september": 9, "october": 10, "november": 11, "december": 12,
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7, "aug": 8,
    "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
}
_MONTH_RE = r"(?:" + "|".join(sorted(_MONTHS, key=len, reverse=True)) + r")"

# Recognized English date patterns; matched case-insensitively on word
# boundaries, normalized to partial ISO-8601.
_DATE_PATTERNS: list[tuple[re.Pattern, str]] = [
    (re.compile(rf"\b(\d{{1,2}})\s+({_MONTH_RE})\s+(\d{{4}})\b", re.IGNORECASE), "dmy"),
    (re.compile(rf"\b({_MONTH_RE})\s+(\d{{1,2}}),\s*(\d{{4}})\b", re.IGNORECASE), "mdy"),
    (re.compile(rf"\b({_MONTH_RE})\s+(\d{{4}})\b", re.IGNORECASE), "my"),
    (re.compile(r"\b(\d{4})-(\d{2})-(\d{2})\b"), "iso"),
    (re.compile(r"\b(\d{1,2})/(\d{1,2})/(\d{4})\b"), "slash"),
    (re.compile(r"\b([12]\d{3})\b"), "year"),
]


def _normalize_match(kind: str, match: re.Match) -> str | None:
    if kind == "dmy":
        day, month, year = int(match.group(1)), _MONTHS[match.group(2).lower()], match.group(3)
    elif kind == "mdy":
        month, day, year = _MONTHS[match.group(1).lower()], int(match.group(2)), match.group(3)
    elif kind == "my":
        month, year = _MONTHS[match.group(1).lower()], match.group(2)
        return f"{year}-{month:02d}"
    elif kind == "iso":
        year, month, day = match.group(1), int(match.group(2)), int(match.group(3))
    elif kind == "slash":
        day, month, year = int(match.group(1)), int(match.group(2)), match.group(3)
    else:  # bare year, range-limited by the pattern itself
        return match.group(1)
    if not 1 <= month <= 12 or not 1 <= day <= 31:
        return None
    return f"{year}-{month:02d}-{day:02d}"


def extract_dates(raw: str) -> tuple[str, list[DateMention]]:
    """Find dates, normalize to ISO and mask them with dummy tokens.

    Scanning is left to right with longest-match-wins at equal starts;
    accepted matches never overlap.  Returns the masked text and the
    mentions with their character spans in the original string.
    """
    found: list[tuple[int, int, str]] = []
    for pattern, kind in _DATE_PATTERNS:
        for match in pattern.finditer(raw):
            iso = _normalize_match(kind, match)
            if iso is not None:
                found.append((match.start(), match.end(), iso))
    found.sort(key=lambda item: (item[0], -(item[1] - item[0])))

    mentions: list[DateMention] = []
    masked_parts = []
    cursor = 0
    last_end = 0
    for start, end, iso in found:
        if start < last_end:
            continue
        dummy = f"__DATE_{len(mentions)}__"
        mentions.append(DateMention(start=start, end=end, iso=iso, dummy=dummy))
        masked_parts.append(raw[cursor:start])
        masked_parts.append(dummy)
        cursor = end
        last_end = end
    masked_parts.append(raw[cursor:])
    return "".join(masked_parts), mentions


# -- Noun chunks -------------------------------------------------------

def noun_chunks(sentence: AnnotatedSentence) -> list[NounChunk]:
    """Base noun chunks: a nominal token plus its qualifying left deps.

    Nominal tokens are visited right to left so that a token already
    inside a chunk (e.g. the modifier noun in a compound) does not
    start a chunk of its own; the result is the maximal base phrases.
    """
    covered: set[int] = set()
    chunks = []
    for token in reversed(sentence.tokens):
        if token.upos not in NOMINAL_TAGS or token.index in covered:
            continue
        start = token.index
        for dep in sentence.tokens:
            if (
                dep.index < token.index
                and dep.head_index == token.index
                and dep.deprel.split(":")[0] in CHUNK_DEP_RELS
            ):
                start = min(start, dep.index)
        chunks.append(NounChunk(start=start, end=token.index, root_index=token.index))
        covered.update(range(start, token.index + 1))
    chunks.reverse()
    return chunks


# -- Candidate selection -----------------------------------------------

def _overlaps_head(text: str, head_tokens: frozenset[str]) -> bool:
    tokens = token_set(text)
    if not tokens:
        return False
    union = tokens | head_tokens
    iou = len(tokens & head_tokens) / len(union)
    return iou >= HEAD_OVERLAP_IOU or tokens <= head_tokens


def select_tail_candidates(
    sentence: AnnotatedSentence, head: str, dates: list[DateMention]
) -> list[TailCandidate]:
    """Apply the four selection rules; see the module docstring.

    ``sentence`` must be the annotation of the date-masked text; spans
    containing a date dummy token are discarded (the date participates
    through its ISO value instead).
    """
    head_tokens = token_set(head)
    dummies = {m.dummy for m in dates}

    def has_dummy(start: int, end: int) -> bool:
        return any(t.surface in dummies for t in sentence.tokens[start - 1 : end])

    chunks = [
        c
        for c in noun_chunks(sentence)
        if not _overlaps_head(sentence.span_text(c.start, c.end), head_tokens)
        and sentence.token(c.root_index).upos != "PRON"
    ]

    candidates: list[TailCandidate] = []
    for chunk in chunks:
        if has_dummy(chunk.start, chunk.end):
            continue
        candidates.append(
            TailCandidate(
                text=sentence.span_text(chunk.start, chunk.end),
                span=(chunk.start, chunk.end),
                kind="chunk",
            )
        )

    for start, end in _propn_runs(sentence):
        text = sentence.span_text(start, end)
        if has_dummy(start, end) or _overlaps_head(text, head_tokens):
            continue
        candidates.append(TailCandidate(text=text, span=(start, end), kind="propn_span"))

    for chunk in chunks:
        root = sentence.token(chunk.root_index)
        if root.upos != "NOUN" or root.surface in dummies:
            continue
        if _overlaps_head(root.surface, head_tokens):
            continue
        candidates.append(
            TailCandidate(text=root.surface, span=(root.index, root.index), kind="root_noun")
        )

    for mention in dates:
        candidates.append(
            TailCandidate(text=mention.iso, span=(mention.start, mention.end), kind="date")
        )

    deduped = []
    seen: set[str] = set()
    for candidate in candidates:
        key = candidate.text.lower()
        if key in seen:
            continue
        seen.add(key)
        deduped.append(candidate)
    return deduped


def _propn_runs(sentence: AnnotatedSentence) -> list[tuple[int, int]]:
    """Maximal contiguous ADJ/PROPN runs containing at least one PROPN."""
    runs = []
    start = None
    has_propn = False
    for token in sentence.tokens:
        if token.upos in PROPN_RUN_TAGS:
            if start is None:
                start = token.index
                has_propn = False
            has_propn = has_propn or token.upos == "PROPN"
        else:
            if start is not None and has_propn:
                runs.append((start, token.index - 1))
            start = None
    if start is not None and has_propn:
        runs.append((start, sentence.tokens[-1].index))
    return runs
