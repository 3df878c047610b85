"""Answer each selected question against both the source and the summary."""

from dataclasses import dataclass

from .backends import Answer, AnswerCache
from .pipeline import GeneratedQuestion


@dataclass(frozen=True)
class AnswerPair:
    question: GeneratedQuestion
    source_answer: Answer
    summary_answer: Answer


def answer_both(
    qa,
    question: GeneratedQuestion,
    source_context: str,
    summary: str,
    cache: AnswerCache | None = None,
) -> AnswerPair:
    """Answer one question against both contexts, atomically.

    Backend errors propagate; no partial pair is ever returned. Passing the
    filter stage's cache reuses its summary-side answers.
    """
    cache = cache if cache is not None else AnswerCache()
    summary_answer = cache.answer(qa, question.text, summary)
    source_answer = cache.answer(qa, question.text, source_context)
    return AnswerPair(question=question, source_answer=source_answer, summary_answer=summary_answer)
