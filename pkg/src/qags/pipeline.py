"""Question over-generation and the filtering cascade.

A summary's candidates are over-generated into up to |candidates| x beam
questions, then pruned in a fixed order: truncate at the first question mark,
drop exact duplicates, drop questions under three whitespace tokens, drop
questions the QA model cannot answer against the summary, keep the top K by
(log_prob desc, text asc). If fewer than K survive, rejected questions (other
than duplicates) are sampled back in uniformly without replacement.
"""

import logging
import random
from dataclasses import dataclass, replace
from enum import Enum

from .backends import AnswerCache, BackendError, QgRequest
from .candidates import AnswerCandidate
from .errors import QagsError

logger = logging.getLogger(__name__)


class FilterReason(str, Enum):
    TRUNCATED_ONLY = "TruncatedOnly"
    DUPLICATE = "Duplicate"
    TOO_SHORT = "TooShort"
    UNANSWERABLE = "Unanswerable"


class AllGenerationsFailed(QagsError):
    """Every candidate's QG request failed."""


@dataclass(frozen=True)
class GeneratedQuestion:
    text: str
    log_prob: float
    source_candidate: AnswerCandidate
    filtered_reason: FilterReason | None = None
    sampled_back: bool = False


@dataclass(frozen=True)
class QuestionSet:
    selected: tuple[GeneratedQuestion, ...]
    rejected: tuple[GeneratedQuestion, ...]
    sampled_back: int


def overgenerate(
    qg,
    context: str,
    candidates: list[AnswerCandidate],
    beam_width: int,
    min_len: int = 8,
    max_len: int = 60,
) -> list[GeneratedQuestion]:
    """Generate up to len(candidates) * beam_width questions, tagged by candidate.

    Per-candidate backend failures are logged and skipped; if every candidate
    fails, raises :class:`AllGenerationsFailed` chaining the last error.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    questions: list[GeneratedQuestion] = []
    failures = 0
    last_error: BackendError | None = None
    for candidate in candidates:
        request = QgRequest(
            context=context,
            answer=candidate.text,
            beam_width=beam_width,
            min_len=min_len,
            max_len=max_len,
        )
        try:
            response = qg.generate(request)
        except BackendError as exc:
            failures += 1
            last_error = exc
            logger.warning("QG failed for candidate %r: %s", candidate.text, exc)
            continue
        questions.extend(
            GeneratedQuestion(q.text, q.log_prob, candidate) for q in response.questions
        )
    if failures == len(candidates):
        raise AllGenerationsFailed(f"all {failures} QG requests failed") from last_error
    return questions


def _truncate(text: str) -> str:
    cut = text.find("?")
    return text[: cut + 1] if cut >= 0 else text


def filter_questions(
    raw: list[GeneratedQuestion],
    qa,
    summary: str,
    k: int,
    rng: random.Random,
    cache: AnswerCache | None = None,
) -> QuestionSet:
    """Apply the filtering cascade and select the final question set."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cache = cache if cache is not None else AnswerCache()

    truncated = [replace(q, text=_truncate(q.text)) for q in raw]

    # Dedup keeps the highest-log_prob instance per text (first wins on ties).
    best: dict[str, GeneratedQuestion] = {}
    order: list[str] = []
    for q in truncated:
        prev = best.get(q.text)
        if prev is None:
            best[q.text] = q
            order.append(q.text)
        elif q.log_prob > prev.log_prob:
            best[q.text] = q
    pool = [best[text] for text in order]
    rejected = [
        replace(q, filtered_reason=FilterReason.DUPLICATE)
        for q in truncated
        if best[q.text] is not q
    ]

    survivors: list[GeneratedQuestion] = []
    for q in pool:
        stripped = q.text.strip()
        if stripped in ("", "?"):
            rejected.append(replace(q, filtered_reason=FilterReason.TRUNCATED_ONLY))
        elif len(q.text.split()) < 3:
            rejected.append(replace(q, filtered_reason=FilterReason.TOO_SHORT))
        elif cache.answer(qa, q.text, summary).is_no_answer:
            rejected.append(replace(q, filtered_reason=FilterReason.UNANSWERABLE))
        else:
            survivors.append(q)

    survivors.sort(key=lambda q: (-q.log_prob, q.text))
    selected = survivors[:k]
    rejected.extend(survivors[k:])

    sampled_back = 0
    if len(selected) < k:
        # Uniform sample without replacement as a shuffled prefix, so growing k
        # only ever extends the selection.
        fallback = [q for q in rejected if q.filtered_reason is not FilterReason.DUPLICATE]
        rng.shuffle(fallback)
        picks = fallback[: k - len(selected)]
        picked = {id(q) for q in picks}
        rejected = [q for q in rejected if id(q) not in picked]
        selected.extend(replace(q, sampled_back=True) for q in picks)
        sampled_back = len(picks)

    return QuestionSet(selected=tuple(selected), rejected=tuple(rejected), sampled_back=sampled_back)
