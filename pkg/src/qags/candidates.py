"""Answer-candidate extraction from a summary.

A deterministic, rule-based stand-in for a statistical NER/noun-chunk
extractor: capitalized runs, numeric expressions, and quoted spans. Callers
that want model-quality candidates supply them externally through
:func:`load_external_candidates`.
"""

import random
import unicodedata
from dataclasses import dataclass
from enum import Enum

from .errors import QagsError
from .text import normalize_answer


class CandidateKind(str, Enum):
    CAPITALIZED_SPAN = "CapitalizedSpan"
    NUMERIC_EXPRESSION = "NumericExpression"
    QUOTED_SPAN = "QuotedSpan"
    EXTERNAL = "External"


class NoCandidates(QagsError):
    """Raw extraction found nothing usable in the summary."""


class SpanMismatch(QagsError):
    """An externally supplied candidate does not reproduce the summary slice."""


@dataclass(frozen=True)
class AnswerCandidate:
    text: str
    start: int
    end: int
    kind: CandidateKind


# Words allowed to extend a numeric expression ("5 million", "30 km").
_UNIT_WORDS = frozenset(
    {
        "%",
        "percent",
        "million",
        "billion",
        "trillion",
        "thousand",
        "hundred",
        "dozen",
        "km",
        "kg",
        "mph",
        "miles",
        "mile",
        "metres",
        "meters",
        "feet",
        "pounds",
        "dollars",
        "euros",
        "degrees",
        "years",
        "year",
        "months",
        "month",
        "weeks",
        "week",
        "days",
        "day",
        "hours",
        "hour",
        "minutes",
        "seconds",
    }
)

_CLOSERS = "\"'’”)]"


def _token_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        spans.append((i, j))
        i = j
    return spans


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _ends_sentence(token: str) -> bool:
    core = token.rstrip(_CLOSERS)
    return bool(core) and core[-1] in ".!?"


def _strip_trailing_punct(text: str, start: int, end: int) -> tuple[int, int]:
    while end > start and _is_punct(text[end - 1]):
        end -= 1
    return start, end


def _has_digit(token: str) -> bool:
    return any(ch.isdigit() for ch in token)


def _is_unit(token: str) -> bool:
    if token in _UNIT_WORDS:
        return True
    core = token.lower()
    while core and _is_punct(core[-1]):
        core = core[:-1]
    return core in _UNIT_WORDS


def _capitalized_runs(summary: str, spans: list[tuple[int, int]]) -> list[tuple[int, int]]:
    runs = []
    i = 0
    while i < len(spans):
        start_tok, end_tok = spans[i]
        token = summary[start_tok:end_tok]
        if not token[0].isupper():
            i += 1
            continue
        j = i
        while j + 1 < len(spans):
            ns, ne = spans[j + 1]
            if summary[ns:ne][0].isupper():
                j += 1
            else:
                break
        sentence_initial = i == 0 or _ends_sentence(summary[spans[i - 1][0] : spans[i - 1][1]])
        if not (sentence_initial and j == i):
            runs.append((spans[i][0], spans[j][1]))
        i = j + 1
    return runs


def _numeric_runs(summary: str, spans: list[tuple[int, int]]) -> list[tuple[int, int]]:
    runs = []
    i = 0
    while i < len(spans):
        s, e = spans[i]
        if not _has_digit(summary[s:e]):
            i += 1
            continue
        j = i
        while j + 1 < len(spans) and _has_digit(summary[spans[j + 1][0] : spans[j + 1][1]]):
            j += 1
        while j + 1 < len(spans) and _is_unit(summary[spans[j + 1][0] : spans[j + 1][1]]):
            j += 1
        runs.append((spans[i][0], spans[j][1]))
        i = j + 1
    return runs


def _quoted_spans(summary: str) -> list[tuple[int, int]]:
    inner = []
    straight = [i for i, ch in enumerate(summary) if ch == '"']
    for a, b in zip(straight[0::2], straight[1::2]):
        inner.append((a + 1, b))
    stack: list[int] = []
    for i, ch in enumerate(summary):
        if ch == "“":
            stack.append(i)
        elif ch == "”" and stack:
            inner.append((stack.pop() + 1, i))
    trimmed = []
    for a, b in inner:
        while a < b and summary[a].isspace():
            a += 1
        while b > a and summary[b - 1].isspace():
            b -= 1
        if a < b:
            trimmed.append((a, b))
    return trimmed


def _raw_candidates(summary: str) -> list[AnswerCandidate]:
    spans = _token_spans(summary)
    found: list[AnswerCandidate] = []
    for a, b in _capitalized_runs(summary, spans):
        a, b = _strip_trailing_punct(summary, a, b)
        if a < b:
            found.append(AnswerCandidate(summary[a:b], a, b, CandidateKind.CAPITALIZED_SPAN))
    for a, b in _numeric_runs(summary, spans):
        a, b = _strip_trailing_punct(summary, a, b)
        if a < b:
            found.append(AnswerCandidate(summary[a:b], a, b, CandidateKind.NUMERIC_EXPRESSION))
    for a, b in _quoted_spans(summary):
        found.append(AnswerCandidate(summary[a:b], a, b, CandidateKind.QUOTED_SPAN))
    deduped: list[AnswerCandidate] = []
    seen: set[str] = set()
    for cand in found:
        key = " ".join(normalize_answer(cand.text))
        if not key or key in seen:
            continue
        seen.add(key)
        deduped.append(cand)
    return deduped


def extract_candidates(summary: str, max_candidates: int, rng: random.Random) -> list[AnswerCandidate]:
    """Return exactly ``max_candidates`` candidates.

    Raw candidates beyond the cap are downsampled through ``rng``; a shortfall
    is padded by duplicating candidates round-robin, so later question
    generation still sees the full candidate budget.

    Raises :class:`NoCandidates` when the rules match nothing.
    """
    if max_candidates < 1:
        raise ValueError("max_candidates must be >= 1")
    raw = _raw_candidates(summary)
    if not raw:
        raise NoCandidates("no capitalized, numeric, or quoted span found")
    if len(raw) > max_candidates:
        return rng.sample(raw, max_candidates)
    return [raw[i % len(raw)] for i in range(max_candidates)]


def load_external_candidates(summary: str, entries: list[dict]) -> list[AnswerCandidate]:
    """Validate externally supplied ``{text, start, end}`` spans against the summary."""
    out = []
    for entry in entries:
        text, start, end = entry["text"], entry["start"], entry["end"]
        if summary[start:end] != text:
            raise SpanMismatch(
                f"span [{start},{end}) reads {summary[start:end]!r}, not {text!r}"
            )
        if not text or text != text.strip():
            raise SpanMismatch(f"candidate text {text!r} is empty or has surrounding whitespace")
        out.append(AnswerCandidate(text, start, end, CandidateKind.EXTERNAL))
    return out
