"""Answer-similarity functions: token-level F1 (default) and exact match.

No-answer convention: one no-answer against a span scores 0 (a question only
answerable on one side is evidence of inconsistency); two no-answers score 1.
"""

from collections import Counter
from enum import Enum

from .backends import Answer
from .text import normalize_answer


class SimilarityMetric(str, Enum):
    F1 = "f1"
    EM = "em"


def token_f1(a: Answer, b: Answer) -> float:
    """Multiset token F1 over normalized answers, in [0, 1]."""
    if a.is_no_answer or b.is_no_answer:
        return 1.0 if a.is_no_answer and b.is_no_answer else 0.0
    tokens_a = normalize_answer(a.text)
    tokens_b = normalize_answer(b.text)
    if not tokens_a or not tokens_b:
        return 1.0 if tokens_a == tokens_b else 0.0
    overlap = sum((Counter(tokens_a) & Counter(tokens_b)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(tokens_a)
    recall = overlap / len(tokens_b)
    return 2 * precision * recall / (precision + recall)


def exact_match(a: Answer, b: Answer) -> float:
    """1.0 iff the normalized token sequences are identical (or both no-answer)."""
    if a.is_no_answer or b.is_no_answer:
        return 1.0 if a.is_no_answer and b.is_no_answer else 0.0
    return 1.0 if normalize_answer(a.text) == normalize_answer(b.text) else 0.0


def similarity_fn(metric: SimilarityMetric):
    return token_f1 if metric is SimilarityMetric.F1 else exact_match
