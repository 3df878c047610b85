import math
import random

import pytest

from qags.backends import SpanMatchQa, TemplateQg
from qags.scorer import ScoringConfig, ScoringInstance, score_instance
from qags.similarity import SimilarityMetric
from qags.stats import (
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

from oracles import ALPHA_4X3, PEARSON_1234_2143, oracle_alpha, oracle_pearson


def annotation(summary_id, judgment_rows):
    return AnnotationSet(
        summary_id=summary_id,
        sentences=tuple(
            SentenceJudgments(index=i, judgments=tuple(row)) for i, row in enumerate(judgment_rows)
        ),
    )


# human_score


def test_human_score_majority_then_mean():
    assert human_score(annotation("s", [[1, 1, 0], [0, 0, 1]])) == 0.5


def test_human_score_all_consistent():
    assert human_score(annotation("s", [[1, 1, 1], [1, 1, 1], [1, 1, 1]])) == 1.0


def test_human_score_tie_resolves_inconsistent():
    assert human_score(annotation("s", [[1, 0]])) == 0.0


def test_human_score_empty_summary():
    with pytest.raises(EmptySummary):
        human_score(annotation("s", []))


def test_human_score_mismatched_annotator_counts_rejected():
    with pytest.raises(ValueError):
        annotation("s", [[1, 1, 0], [1, 0]])


def test_human_score_convex_combination_when_adding_consistent_sentence():
    rng = random.Random(5)
    for _ in range(100):
        rows = [[rng.randint(0, 1) for _ in range(3)] for _ in range(rng.randrange(1, 6))]
        before = human_score(annotation("s", rows))
        after = human_score(annotation("s", rows + [[1, 1, 1]]))
        n = len(rows)
        assert after == pytest.approx((before * n + 1.0) / (n + 1), abs=1e-12)
        assert min(before, 1.0) <= after <= 1.0


# pearson


def test_pearson_perfect_and_inverse():
    xs = [1.0, 2.0, 5.0, 9.0]
    assert pearson(xs, xs) == pytest.approx(1.0, abs=1e-12)
    assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0, abs=1e-12)


def test_pearson_pinned_example():
    assert pearson([1, 2, 3, 4], [2, 1, 4, 3]) == pytest.approx(PEARSON_1234_2143, abs=1e-12)


def test_pearson_degenerate_inputs():
    with pytest.raises(DegenerateInput):
        pearson([1.0], [2.0])
    with pytest.raises(DegenerateInput):
        pearson([3.0, 3.0, 3.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        pearson([1.0, 2.0], [1.0])


def test_pearson_matches_oracle_on_random_vectors():
    rng = random.Random(616)
    for _ in range(100):
        n = rng.randrange(2, 40)
        xs = [rng.uniform(-50, 50) for _ in range(n)]
        ys = [rng.uniform(-50, 50) for _ in range(n)]
        if len(set(xs)) == 1 or len(set(ys)) == 1:
            continue
        assert pearson(xs, ys) == pytest.approx(oracle_pearson(xs, ys), abs=1e-12)


def test_pearson_affine_invariance():
    rng = random.Random(617)
    for _ in range(50):
        n = rng.randrange(2, 30)
        xs = [rng.uniform(-10, 10) for _ in range(n)]
        ys = [rng.uniform(-10, 10) for _ in range(n)]
        if len(set(xs)) == 1 or len(set(ys)) == 1:
            continue
        a, b = rng.uniform(0.1, 9.0), rng.uniform(-20, 20)
        scaled = [a * x + b for x in xs]
        assert pearson(scaled, ys) == pytest.approx(pearson(xs, ys), abs=1e-12)


# krippendorff_alpha


def test_alpha_perfect_agreement_is_exactly_one():
    sets = [annotation("a", [[1, 1, 1], [0, 0, 0]]), annotation("b", [[1, 1, 1]])]
    assert krippendorff_alpha(sets) == 1.0


def test_alpha_pinned_hand_example():
    sets = [annotation("a", [[1, 1, 0], [0, 0, 0], [1, 0, 1], [1, 1, 1]])]
    assert krippendorff_alpha(sets) == pytest.approx(ALPHA_4X3, abs=1e-12)


def test_alpha_degenerate_when_all_identical():
    with pytest.raises(DegenerateInput):
        krippendorff_alpha([annotation("a", [[1, 1, 1], [1, 1, 1]])])


def test_alpha_requires_pairable_units():
    with pytest.raises(DegenerateInput):
        krippendorff_alpha([annotation("a", [[1], [0]])])


def test_alpha_excludes_single_judgment_units():
    base = [annotation("a", [[1, 1, 0], [0, 0, 1]])]
    augmented = [annotation("a", [[1, 1, 0], [0, 0, 1]]), annotation("b", [[1]])]
    assert krippendorff_alpha(base) == krippendorff_alpha(augmented)


def test_alpha_matches_bruteforce_oracle_on_random_sets():
    rng = random.Random(2718)
    checked = 0
    while checked < 50:
        units = [
            [rng.randint(0, 1) for _ in range(rng.randrange(2, 5))]
            for _ in range(rng.randrange(2, 7))
        ]
        values = {v for unit in units for v in unit}
        if len(values) < 2:
            continue
        # annotator counts may differ across summaries, not within one
        sets = [annotation(f"s{j}", [unit]) for j, unit in enumerate(units)]
        assert krippendorff_alpha(sets) == pytest.approx(oracle_alpha(units), abs=1e-9)
        checked += 1


def test_alpha_near_zero_for_random_judgments():
    rng = random.Random(31415)
    units = [[rng.randint(0, 1) for _ in range(3)] for _ in range(10_000)]
    sets = [annotation("s", units)]
    assert abs(krippendorff_alpha(sets)) < 0.05


# ranking_accuracy


def _qags_metric(source, sentence):
    digest = abs(hash((source, sentence)))
    instance = ScoringInstance(id=f"m{digest}", article=source, summary=sentence)
    return score_instance(instance, ScoringConfig(), TemplateQg(), SpanMatchQa()).score


def test_ranking_oracle_entity_swap_is_perfect():
    triplets = [
        RankingTriplet(
            source=f"Alpha{i} Bravo met Carol{i} Delta at Echo Field.",
            consistent=f"Alpha{i} Bravo met Carol{i} Delta.",
            inconsistent=f"Alpha{i} Bravo met Zorblax{i} Delta.",
        )
        for i in range(10)
    ]
    assert ranking_accuracy(triplets, _qags_metric) == 1.0


def test_ranking_constant_metric_all_ties_fail():
    triplets = [
        RankingTriplet(source="s", consistent=f"c{i}", inconsistent=f"x{i}") for i in range(10)
    ]
    assert ranking_accuracy(triplets, lambda s, y: 0.5) == 0.0


def test_ranking_random_metric_near_half():
    rng = random.Random(7777)
    triplets = [
        RankingTriplet(source=f"s{i}", consistent=f"c{i}", inconsistent=f"x{i}")
        for i in range(1000)
    ]
    accuracy = ranking_accuracy(triplets, lambda s, y: rng.random())
    assert abs(accuracy - 0.5) <= 0.05


def test_ranking_invariant_under_increasing_transform():
    triplets = [
        RankingTriplet(source=f"s{i}", consistent=f"c{i}", inconsistent=f"x{i}")
        for i in range(50)
    ]

    def base(source, sentence):
        return (hash((source, sentence)) % 1000) / 1000.0

    def transformed(source, sentence):
        return math.exp(3.0 * base(source, sentence)) - 2.0

    assert ranking_accuracy(triplets, base) == ranking_accuracy(triplets, transformed)


def test_ranking_rejects_empty_and_equal_pairs():
    with pytest.raises(ValueError):
        ranking_accuracy([], lambda s, y: 1.0)
    with pytest.raises(ValueError):
        RankingTriplet(source="s", consistent="same", inconsistent="same")


# ablation_sweep


def _swap_instances():
    # summaries with a varying number of swapped-out entities
    names = ["Alpha", "Bravo", "Carol", "Delta", "Echo"]
    instances, humans = [], {}
    for i in range(8):
        swapped = i % 4
        kept = [f"{n}{i} Xx" for n in names]
        article = "The group of " + " and ".join(kept) + " met at noon."
        mention = [f"Zor{j} Xx" if j < swapped else kept[j] for j in range(len(names))]
        summary = "The group of " + " and ".join(mention) + " met."
        instances.append(ScoringInstance(id=f"i{i}", article=article, summary=summary))
        humans[f"i{i}"] = 1.0 - swapped / len(names)
    return instances, humans


def test_ablation_shape_and_f1_em_equality():
    instances, humans = _swap_instances()
    config = ScoringConfig(num_candidates=5, beam_width=10, num_questions=20)
    cells = ablation_sweep(
        instances,
        humans,
        ks=[5, 20],
        metrics=[SimilarityMetric.F1, SimilarityMetric.EM],
        config=config,
        qg=TemplateQg(),
        qa=SpanMatchQa(),
    )
    assert len(cells) == 4
    by_key = {(c.num_questions, c.similarity_metric): c.pearson for c in cells}
    # span-match answers either agree exactly or are no-answers, so F1 == EM
    assert by_key[(5, SimilarityMetric.F1)] == by_key[(5, SimilarityMetric.EM)]
    assert by_key[(20, SimilarityMetric.F1)] == by_key[(20, SimilarityMetric.EM)]


def test_ablation_empty_inputs_degenerate():
    with pytest.raises(DegenerateInput):
        ablation_sweep([], {}, [5], [SimilarityMetric.F1], ScoringConfig(), TemplateQg(), SpanMatchQa())
    instances, humans = _swap_instances()
    with pytest.raises(DegenerateInput):
        ablation_sweep(instances, humans, [], [SimilarityMetric.F1], ScoringConfig(), TemplateQg(), SpanMatchQa())


def test_ablation_missing_human_scores_rejected():
    instances, humans = _swap_instances()
    humans.pop("i3")
    with pytest.raises(ValueError, match="i3"):
        ablation_sweep(
            instances, humans, [5], [SimilarityMetric.F1], ScoringConfig(), TemplateQg(), SpanMatchQa()
        )
