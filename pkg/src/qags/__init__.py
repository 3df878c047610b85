"""Factual-consistency scoring for abstractive summaries.

Questions are generated from the summary, answered against both the summary
and its source, and the answer agreement (token F1 by default) is averaged
into a single score.
"""

from .backends import (
    Answer,
    BackendError,
    BackendRefused,
    BackendUnavailable,
    HttpBackend,
    ProtocolError,
    QaRequest,
    QgRequest,
    QgResponse,
    ScoredQuestion,
    ScriptedBackend,
    SpanMatchQa,
    TemplateQg,
)
from .candidates import AnswerCandidate, CandidateKind, NoCandidates, SpanMismatch, extract_candidates
from .errors import QagsError
from .pipeline import AllGenerationsFailed, FilterReason, GeneratedQuestion, QuestionSet
from .scorer import (
    Degenerate,
    InstanceFailure,
    QagsResult,
    ScoringConfig,
    ScoringInstance,
    score_batch,
    score_instance,
)
from .similarity import SimilarityMetric, exact_match, token_f1
from .stats import (
    AnnotationSet,
    DegenerateInput,
    EmptySummary,
    RankingTriplet,
    SentenceJudgments,
    ablation_sweep,
    human_score,
    krippendorff_alpha,
    pearson,
    ranking_accuracy,
)
from .text import normalize_answer, tokenize

__version__ = "0.1.0"

__all__ = [
    "AllGenerationsFailed",
    "AnnotationSet",
    "Answer",
    "AnswerCandidate",
    "BackendError",
    "BackendRefused",
    "BackendUnavailable",
    "CandidateKind",
    "Degenerate",
    "DegenerateInput",
    "EmptySummary",
    "FilterReason",
    "GeneratedQuestion",
    "HttpBackend",
    "InstanceFailure",
    "NoCandidates",
    "ProtocolError",
    "QaRequest",
    "QagsError",
    "QagsResult",
    "QgRequest",
    "QgResponse",
    "QuestionSet",
    "RankingTriplet",
    "ScoredQuestion",
    "ScoringConfig",
    "ScoringInstance",
    "ScriptedBackend",
    "SentenceJudgments",
    "SimilarityMetric",
    "SpanMatchQa",
    "SpanMismatch",
    "TemplateQg",
    "ablation_sweep",
    "exact_match",
    "extract_candidates",
    "human_score",
    "krippendorff_alpha",
    "normalize_answer",
    "pearson",
    "ranking_accuracy",
    "score_batch",
    "score_instance",
    "token_f1",
    "tokenize",
]
