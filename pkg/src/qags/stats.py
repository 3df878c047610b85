"""Statistics for validating a consistency metric.

Human-score aggregation (per-sentence majority vote, then mean), sample
Pearson correlation, Krippendorff's alpha for nominal binary judgments, the
consistent-vs-inconsistent sentence-ranking harness, and the K/similarity
ablation sweep.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from math import fsum, sqrt

from .errors import QagsError
from .scorer import InstanceFailure, ScoringConfig, ScoringInstance, score_batch
from .similarity import SimilarityMetric


class EmptySummary(QagsError):
    """An annotation set with zero sentences cannot be scored."""


class DegenerateInput(QagsError):
    """The statistic is undefined on this input (constant, too small, or empty)."""


@dataclass(frozen=True)
class SentenceJudgments:
    index: int
    judgments: tuple[int, ...]

    def __post_init__(self):
        if any(j not in (0, 1) for j in self.judgments):
            raise ValueError(f"sentence {self.index}: judgments must be binary, got {self.judgments}")


@dataclass(frozen=True)
class AnnotationSet:
    summary_id: str
    sentences: tuple[SentenceJudgments, ...]

    def __post_init__(self):
        counts = {len(s.judgments) for s in self.sentences}
        if len(counts) > 1:
            raise ValueError(f"{self.summary_id}: sentences have differing annotator counts {sorted(counts)}")


@dataclass(frozen=True)
class RankingTriplet:
    source: str
    consistent: str
    inconsistent: str

    def __post_init__(self):
        if self.consistent == self.inconsistent:
            raise ValueError("consistent and inconsistent sentences must differ")


def human_score(annotation: AnnotationSet) -> float:
    """Majority vote per sentence, averaged over sentences. Ties count as 0."""
    if not annotation.sentences:
        raise EmptySummary(f"{annotation.summary_id}: no sentences")
    votes = [1.0 if 2 * sum(s.judgments) > len(s.judgments) else 0.0 for s in annotation.sentences]
    return fsum(votes) / len(votes)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise DegenerateInput(f"need at least 2 points, got {n}")
    mean_x = fsum(xs) / n
    mean_y = fsum(ys) / n
    var_x = fsum((x - mean_x) ** 2 for x in xs)
    var_y = fsum((y - mean_y) ** 2 for y in ys)
    if var_x == 0.0 or var_y == 0.0:
        raise DegenerateInput("constant sequence has no defined correlation")
    sx, sy = sqrt(var_x), sqrt(var_y)
    r = fsum(((x - mean_x) / sx) * ((y - mean_y) / sy) for x, y in zip(xs, ys))
    return max(-1.0, min(1.0, r))


def krippendorff_alpha(annotations: Sequence[AnnotationSet]) -> float:
    """Krippendorff's alpha for nominal binary data over all sentence-units.

    Units with fewer than two judgments are excluded, per the standard
    coincidence-matrix formulation.
    """
    units = [
        sentence.judgments
        for annotation in annotations
        for sentence in annotation.sentences
        if len(sentence.judgments) >= 2
    ]
    if not units:
        raise DegenerateInput("no unit has two or more judgments")
    n_ones = sum(sum(u) for u in units)
    n_total = sum(len(u) for u in units)
    n_zeros = n_total - n_ones
    expected = 2.0 * n_zeros * n_ones / (n_total * (n_total - 1))
    if expected == 0.0:
        raise DegenerateInput("every judgment in the dataset is identical")
    observed = fsum(2.0 * sum(u) * (len(u) - sum(u)) / (len(u) - 1) for u in units) / n_total
    return 1.0 - observed / expected


def ranking_accuracy(
    triplets: Sequence[RankingTriplet],
    metric: Callable[[str, str], float],
) -> float:
    """Fraction of triplets where the consistent sentence scores strictly higher.

    Ties count as failures.
    """
    if not triplets:
        raise ValueError("triplets must be non-empty")
    wins = sum(
        1 for t in triplets if metric(t.source, t.consistent) > metric(t.source, t.inconsistent)
    )
    return wins / len(triplets)


@dataclass(frozen=True)
class AblationCell:
    num_questions: int
    similarity_metric: SimilarityMetric
    pearson: float


def ablation_sweep(
    instances: Sequence[ScoringInstance],
    human_scores: dict[str, float],
    ks: Sequence[int],
    metrics: Sequence[SimilarityMetric],
    config: ScoringConfig,
    qg,
    qa,
    jobs: int = 1,
) -> list[AblationCell]:
    """One Pearson value per (K, similarity) grid cell.

    Question generation and filtering re-run from scratch per K; nothing is
    truncated from a larger run. Instance failures propagate.
    """
    if not instances:
        raise DegenerateInput("no instances to sweep")
    if not ks or not metrics:
        raise DegenerateInput("empty ablation grid")
    missing = [i.id for i in instances if i.id not in human_scores]
    if missing:
        raise ValueError(f"instances without human scores: {missing}")
    humans = [human_scores[i.id] for i in instances]
    cells = []
    for k in ks:
        for metric in metrics:
            cell_config = replace(config, num_questions=k, similarity_metric=metric)
            results = score_batch(list(instances), cell_config, qg, qa, jobs=jobs)
            failures = [r for r in results if isinstance(r, InstanceFailure)]
            if failures:
                raise QagsError(f"K={k} {metric.value}: {failures[0].error}")
            scores = [r.score for r in results]
            cells.append(AblationCell(k, metric, pearson(scores, humans)))
    return cells
