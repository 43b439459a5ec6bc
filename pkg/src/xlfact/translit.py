"""Script unification: map Indic-script text onto Devanagari.

The Brahmic blocks in Unicode share a common 128-codepoint layout, so
transliteration is plain offset arithmetic: a Bengali/Gujarati/Tamil/
Telugu/Kannada codepoint maps to ``U+0900 + (cp - block_start)``
whenever that Devanagari slot is an assigned character.  The goal is
vocabulary overlap across languages, not phonetic fidelity.

Hindi and Marathi are already Devanagari and English is exempt; those
three pass through unchanged.  Characters outside the source block
(Latin letters, digits, punctuation, other scripts) are never touched.
"""

from __future__ import annotations

from dataclasses import dataclass

from .records import LanguageCode

DEVANAGARI_START = 0x0900
BLOCK_SIZE = 0x80

# Assigned codepoints of the Devanagari block, generated once from the
# Unicode character database (13.0): every one of the 128 slots is an
# assigned character.  Kept as static data so behaviour does not drift
# with the interpreter's UCD version.
ASSIGNED_DEVANAGARI = frozenset(range(DEVANAGARI_START, DEVANAGARI_START + BLOCK_SIZE))

# Unicode block starts for the five languages that get offset-mapped.
SOURCE_BLOCK_START = {
    LanguageCode.BN: 0x0980,
    LanguageCode.GU: 0x0A80,
    LanguageCode.TA: 0x0B80,
    LanguageCode.TE: 0x0C00,
    LanguageCode.KN: 0x0C80,
}

# Already Devanagari: text passes through, block chars counted as such.
_DEVANAGARI_NATIVE = {LanguageCode.HI, LanguageCode.MR}


@dataclass(frozen=True)
class TranslitReport:
    """Counts over characters that fell inside the source script block."""

    mapped: int
    passthrough: int
    passthrough_codepoints: frozenset[int]


def is_mappable(codepoint: int, lang: LanguageCode) -> bool:
    """True iff the offset rule maps ``codepoint`` to an assigned slot.

    Always false for en/hi/mr, which are never offset-mapped.
    """
    block_start = SOURCE_BLOCK_START.get(lang)
    if block_start is None:
        return False
    if not block_start <= codepoint < block_start + BLOCK_SIZE:
        return False
    return DEVANAGARI_START + (codepoint - block_start) in ASSIGNED_DEVANAGARI


def to_devanagari(text: str, lang: LanguageCode) -> tuple[str, TranslitReport]:
    """Transliterate ``text`` to Devanagari per the block-offset rule.

    Returns the converted string and a report.  Output always has the
    same number of codepoints as the input, and the conversion is
    idempotent: Devanagari output falls outside every source block.
    """
    if lang is LanguageCode.EN:
        return text, TranslitReport(0, 0, frozenset())

    if lang in _DEVANAGARI_NATIVE:
        native = [
            ord(ch)
            for ch in text
            if DEVANAGARI_START <= ord(ch) < DEVANAGARI_START + BLOCK_SIZE
        ]
        return text, TranslitReport(0, len(native), frozenset(native))

    block_start = SOURCE_BLOCK_START[lang]
    out = []
    mapped = 0
    passthrough = 0
    passthrough_codepoints = set()
    for ch in text:
        cp = ord(ch)
        if block_start <= cp < block_start + BLOCK_SIZE:
            target = DEVANAGARI_START + (cp - block_start)
            if target in ASSIGNED_DEVANAGARI:
                out.append(chr(target))
                mapped += 1
            else:
                out.append(ch)
                passthrough += 1
                passthrough_codepoints.add(cp)
        else:
            out.append(ch)
    return "".join(out), TranslitReport(mapped, passthrough, frozenset(passthrough_codepoints))
