import json

import pytest

from corpus import WORKED_FIXTURES


@pytest.fixture
def worked_example_fixture_path(tmp_path):
    path = tmp_path / "worked_example.json"
    path.write_text(json.dumps(WORKED_FIXTURES), encoding="utf-8")
    return str(path)


_ACCEPTANCE_LABELS = {
    "test_a1_identity": "A1 identity: QAGS(X, X) == 1.0 on 50 generated documents",
    "test_a2_similarity_oracle_equivalence": "A2 similarity: F1/EM match brute-force oracle on 10,000 pairs",
    "test_a3_worked_example_golden": "A3 golden: scripted worked example scores the oracle mean",
    "test_a4_filtering_cascade_fuzz": "A4 filtering: cascade invariants hold on 1,000 fuzzed pools",
    "test_a5_hallucination_monotonicity": "A5 hallucination: entity swap strictly lowers the score (100 pairs)",
    "test_a6_statistics_oracles": "A6 statistics: pearson/alpha match definition oracles",
    "test_a7_ranking_harness": "A7 ranking: oracle 100%, constant 0%, random ~50%",
    "test_a8_k_ablation_shape": "A8 ablation: 4 K-cells, K=50 >= K=5 on constructed data",
    "test_a9_reproducibility": "A9 reproducibility: byte-identical results JSONL across runs",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            name = getattr(report, "location", (None, None, ""))[2].split("[")[0]
            if name in _ACCEPTANCE_LABELS:
                verdict = "PASS" if outcome == "passed" else "FAIL"
                lines.append((name, f"{verdict}  {_ACCEPTANCE_LABELS[name]}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
