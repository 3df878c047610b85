"""Tokenization and answer normalization shared by every other stage.

Answer normalization follows the extractive-QA convention: lowercase,
strip punctuation, drop English articles, split on whitespace. Punctuation
means the unicode ``P*`` general categories; removed characters merge their
neighbours ("A-Team" -> "ateam").
"""

import unicodedata

_ARTICLES = frozenset({"a", "an", "the"})


def tokenize(text: str) -> list[str]:
    """Split on unicode whitespace, preserving casing and attached punctuation."""
    return text.split()


def _strip_punctuation(text: str) -> str:
    return "".join(ch for ch in text if not unicodedata.category(ch).startswith("P"))


def normalize_answer(text: str) -> list[str]:
    """Lowercase, strip punctuation, drop article tokens. May yield []."""
    tokens = _strip_punctuation(text.lower()).split()
    return [t for t in tokens if t not in _ARTICLES]
