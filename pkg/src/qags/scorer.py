"""Per-instance scoring: candidates -> questions -> paired answers -> mean similarity."""

import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from math import fsum

from .answering import answer_both
from .backends import Answer, AnswerCache, BackendError
from .candidates import AnswerCandidate, NoCandidates, extract_candidates
from .errors import QagsError
from .pipeline import filter_questions, overgenerate
from .similarity import SimilarityMetric, similarity_fn

logger = logging.getLogger(__name__)


class Degenerate(str, Enum):
    NO_CANDIDATES = "NoCandidates"
    NO_QUESTIONS = "NoQuestions"


@dataclass(frozen=True)
class ScoringConfig:
    num_candidates: int = 10
    beam_width: int = 10
    num_questions: int = 20
    similarity_metric: SimilarityMetric = SimilarityMetric.F1
    prepend_summary: bool = False
    seed: int = 1337
    min_len: int = 8
    max_len: int = 60

    def __post_init__(self):
        if self.num_candidates < 1 or self.beam_width < 1 or self.num_questions < 1:
            raise ValueError("num_candidates, beam_width, num_questions must be >= 1")
        if self.num_questions > self.num_candidates * self.beam_width:
            raise ValueError("num_questions cannot exceed num_candidates * beam_width")
        if self.min_len > self.max_len:
            raise ValueError("min_len must be <= max_len")


@dataclass(frozen=True)
class ScoringInstance:
    id: str
    article: str
    summary: str
    candidates: tuple[AnswerCandidate, ...] | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("instance id must be non-empty")
        if not self.article or not self.summary:
            raise ValueError(f"instance {self.id!r}: article and summary must be non-empty")


@dataclass(frozen=True)
class QuestionRecord:
    question: str
    log_prob: float
    source_answer: Answer
    summary_answer: Answer
    similarity: float


@dataclass(frozen=True)
class QagsResult:
    id: str
    score: float
    per_question: tuple[QuestionRecord, ...]
    errored_questions: int = 0
    degenerate: Degenerate | None = None
    counts: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class InstanceFailure:
    id: str
    error: str


def instance_rng(config: ScoringConfig, instance_id: str) -> random.Random:
    """Independent, reproducible RNG stream per (seed, instance)."""
    return random.Random(f"{config.seed}:{instance_id}")


def score_instance(instance: ScoringInstance, config: ScoringConfig, qg, qa) -> QagsResult:
    """Run the four scoring steps for one (article, summary) pair.

    Degenerate summaries (no candidates, or no questions generated) score 0
    and are flagged rather than raised. Backend errors on individual questions
    exclude that question from the mean; an error only propagates when every
    question failed or generation itself collapsed.
    """
    rng = instance_rng(config, instance.id)
    if instance.candidates:
        candidates = list(instance.candidates)
    else:
        try:
            candidates = extract_candidates(instance.summary, config.num_candidates, rng)
        except NoCandidates:
            return QagsResult(instance.id, 0.0, (), degenerate=Degenerate.NO_CANDIDATES)

    raw = overgenerate(qg, instance.summary, candidates, config.beam_width, config.min_len, config.max_len)
    counts = {"candidates": len(candidates), "questions_generated": len(raw)}
    if not raw:
        return QagsResult(instance.id, 0.0, (), degenerate=Degenerate.NO_QUESTIONS, counts=counts)

    cache = AnswerCache()
    question_set = filter_questions(raw, qa, instance.summary, config.num_questions, rng, cache=cache)
    counts["questions_rejected"] = len(question_set.rejected)
    counts["questions_sampled_back"] = question_set.sampled_back
    if not question_set.selected:
        return QagsResult(instance.id, 0.0, (), degenerate=Degenerate.NO_QUESTIONS, counts=counts)

    source_context = (
        f"{instance.summary} {instance.article}" if config.prepend_summary else instance.article
    )
    similarity = similarity_fn(config.similarity_metric)
    records: list[QuestionRecord] = []
    errored = 0
    last_error: BackendError | None = None
    for question in question_set.selected:
        try:
            pair = answer_both(qa, question, source_context, instance.summary, cache=cache)
        except BackendError as exc:
            errored += 1
            last_error = exc
            logger.warning("instance %s: question %r errored: %s", instance.id, question.text, exc)
            continue
        records.append(
            QuestionRecord(
                question=question.text,
                log_prob=question.log_prob,
                source_answer=pair.source_answer,
                summary_answer=pair.summary_answer,
                similarity=similarity(pair.source_answer, pair.summary_answer),
            )
        )
    if not records:
        raise last_error if last_error is not None else QagsError(
            f"instance {instance.id}: no question produced an answer pair"
        )
    score = fsum(r.similarity for r in records) / len(records)
    return QagsResult(
        id=instance.id,
        score=score,
        per_question=tuple(records),
        errored_questions=errored,
        counts=counts,
    )


def score_batch(
    instances: list[ScoringInstance],
    config: ScoringConfig,
    qg,
    qa,
    jobs: int = 1,
) -> list[QagsResult | InstanceFailure]:
    """Score instances independently, preserving input order.

    Per-instance failures become :class:`InstanceFailure` records; the batch
    always completes. Duplicate ids are rejected before any scoring starts.
    """
    ids = [instance.id for instance in instances]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate instance ids: {dupes}")

    def run(instance: ScoringInstance) -> QagsResult | InstanceFailure:
        try:
            return score_instance(instance, config, qg, qa)
        except QagsError as exc:
            logger.warning("instance %s failed: %s", instance.id, exc)
            return InstanceFailure(instance.id, f"{type(exc).__name__}: {exc}")

    if jobs <= 1 or len(instances) <= 1:
        return [run(instance) for instance in instances]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, instances))
