"""Word tokenization and letter-trigram extraction."""

from __future__ import annotations

import re

TOKENIZER_VERSION = 1
TRIGRAM_BOUNDARY = "#"
DEFAULT_ADDRESS_CHARS = 1000

_WORD = re.compile(r"[^\W_]+")


def tokenize_words(text: str) -> list[str]:
    """Lowercase and split on whitespace and punctuation.

    Punctuation and underscores are separators and never become tokens.
    """

    if not text:
        return []
    return _WORD.findall(text.lower())


def letter_trigrams(
    address: str,
    max_chars: int = DEFAULT_ADDRESS_CHARS,
) -> list[str]:
    """Return the boundary-marked letter trigrams of ``address``.

    The raw string is truncated to ``max_chars`` before the markers are
    added, so a string of ``n`` characters yields exactly ``n`` trigrams.
    """

    text = address[:max_chars].lower()
    if not text:
        return []
    padded = f"{TRIGRAM_BOUNDARY}{text}{TRIGRAM_BOUNDARY}"
    return [padded[i : i + 3] for i in range(len(padded) - 2)]
