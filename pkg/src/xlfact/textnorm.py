"""Shared lowercase tokenization used for overlap and hashing features.

ASCII punctuation (including ``_`` and ``-``) is treated as a token
separator, so "Saina-Nehwal" splits into two tokens.  Non-ASCII
punctuation is left alone on purpose: callers operate on English text
or on opaque strings where splitting would do more harm than good.
"""

from __future__ import annotations

import string

_PUNCT_TO_SPACE = str.maketrans({c: " " for c in string.punctuation})


def tokenize(text: str) -> list[str]:
    """Lowercase tokens of ``text``, punctuation treated as whitespace."""
    return text.lower().translate(_PUNCT_TO_SPACE).split()


def token_set(text: str) -> frozenset[str]:
    return frozenset(tokenize(text))
