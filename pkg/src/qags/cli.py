"""Command-line surface: JSONL in/out, reports, and run manifests.

Every flag can also be set through a ``QAGS_``-prefixed environment variable
(``--num-questions`` -> ``QAGS_NUM_QUESTIONS``); explicit flags win. Exit
codes: 0 success, 2 completed with partial failures, 1 fatal.
"""

import argparse
import contextlib
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from dataclasses import asdict

from .backends import Answer, HttpBackend, ScriptedBackend, SpanMatchQa, TemplateQg
from .candidates import SpanMismatch, load_external_candidates
from .errors import QagsError
from .scorer import InstanceFailure, QagsResult, ScoringConfig, ScoringInstance, score_batch, score_instance
from .similarity import SimilarityMetric
from .stats import (
    AnnotationSet,
    DegenerateInput,
    RankingTriplet,
    SentenceJudgments,
    ablation_sweep,
    human_score,
    krippendorff_alpha,
    pearson,
    ranking_accuracy,
)

logger = logging.getLogger(__name__)


class MissingIds(QagsError):
    """Results and annotations do not cover the same instance ids."""


def _env(name: str) -> str | None:
    return os.environ.get(f"QAGS_{name}")


def _env_str(name: str, default: str | None) -> str | None:
    value = _env(name)
    return value if value is not None else default


def _env_int(name: str, default: int) -> int:
    value = _env(name)
    return int(value) if value is not None else default


def _env_bool(name: str, default: bool) -> bool:
    value = _env(name)
    if value is None:
        return default
    return value.lower() in ("1", "true", "yes", "on")


def _add_path_arg(parser: argparse.ArgumentParser, flag: str, env_name: str, **kwargs) -> None:
    # required on the command line unless supplied through the environment
    default = _env_str(env_name, None)
    parser.add_argument(flag, default=default, required=default is None, **kwargs)


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--num-candidates", type=int, default=_env_int("NUM_CANDIDATES", 10))
    parser.add_argument("--beam-width", type=int, default=_env_int("BEAM_WIDTH", 10))
    parser.add_argument("--num-questions", type=int, default=_env_int("NUM_QUESTIONS", 20))
    parser.add_argument(
        "--similarity", choices=["f1", "em"], default=_env_str("SIMILARITY", "f1")
    )
    parser.add_argument(
        "--prepend-summary", action="store_true", default=_env_bool("PREPEND_SUMMARY", False)
    )
    parser.add_argument("--seed", type=int, default=_env_int("SEED", 1337))
    parser.add_argument("--min-len", type=int, default=_env_int("MIN_LEN", 8))
    parser.add_argument("--max-len", type=int, default=_env_int("MAX_LEN", 60))
    parser.add_argument("--jobs", type=int, default=_env_int("JOBS", 1))


def _add_backend_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--backend",
        choices=["oracle", "http", "scripted"],
        default=_env_str("BACKEND", "oracle"),
    )
    parser.add_argument("--qg-endpoint", default=_env_str("QG_ENDPOINT", None))
    parser.add_argument("--qa-endpoint", default=_env_str("QA_ENDPOINT", None))
    parser.add_argument("--scripted-fixtures", default=_env_str("SCRIPTED_FIXTURES", None))


def _build_config(args: argparse.Namespace) -> ScoringConfig:
    return ScoringConfig(
        num_candidates=args.num_candidates,
        beam_width=args.beam_width,
        num_questions=args.num_questions,
        similarity_metric=SimilarityMetric(args.similarity),
        prepend_summary=args.prepend_summary,
        seed=args.seed,
        min_len=args.min_len,
        max_len=args.max_len,
    )


def _build_backends(args: argparse.Namespace):
    if args.backend == "oracle":
        return TemplateQg(), SpanMatchQa()
    if args.backend == "scripted":
        if not args.scripted_fixtures:
            raise QagsError("--scripted-fixtures is required with --backend scripted")
        backend = ScriptedBackend.load(args.scripted_fixtures)
        return backend, backend
    if not args.qg_endpoint or not args.qa_endpoint:
        raise QagsError("--qg-endpoint and --qa-endpoint are required with --backend http")
    backend = HttpBackend(qg_endpoint=args.qg_endpoint, qa_endpoint=args.qa_endpoint)
    return backend, backend


def _backend_manifest(args: argparse.Namespace) -> dict:
    return {
        "kind": args.backend,
        "qg_endpoint": args.qg_endpoint,
        "qa_endpoint": args.qa_endpoint,
        "scripted_fixtures": args.scripted_fixtures,
    }


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    finally:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _answer_dict(answer: Answer) -> dict | None:
    if answer.is_no_answer:
        return None
    return {
        "text": answer.text,
        "start": answer.start,
        "end": answer.end,
        "confidence": answer.confidence,
    }


def _result_dict(result: QagsResult) -> dict:
    return {
        "id": result.id,
        "score": result.score,
        "per_question": [
            {
                "question": r.question,
                "log_prob": r.log_prob,
                "source_answer": _answer_dict(r.source_answer),
                "summary_answer": _answer_dict(r.summary_answer),
                "similarity": r.similarity,
            }
            for r in result.per_question
        ],
        "errored_questions": result.errored_questions,
        "degenerate": result.degenerate.value if result.degenerate else None,
        "counts": result.counts,
    }


def _parse_instance(record: dict) -> ScoringInstance:
    if not isinstance(record, dict):
        raise ValueError(f"record must be an object, got {type(record).__name__}")
    for key in ("id", "article", "summary"):
        if not isinstance(record.get(key), str):
            raise ValueError(f"record field {key!r} must be a string")
    candidates = None
    entries = record.get("candidates")
    if entries:
        candidates = tuple(load_external_candidates(record["summary"], entries))
    return ScoringInstance(
        id=record["id"],
        article=record["article"],
        summary=record["summary"],
        candidates=candidates,
    )


def _read_jsonl(path: str):
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if line.strip():
                yield lineno, line


def _read_instances(path: str) -> tuple[list[ScoringInstance], list[str]]:
    instances, malformed = [], []
    for lineno, line in _read_jsonl(path):
        try:
            instances.append(_parse_instance(json.loads(line)))
        except (ValueError, KeyError, TypeError, SpanMismatch) as exc:
            malformed.append(f"{path}:{lineno}: {exc}")
    return instances, malformed


def cmd_score(args: argparse.Namespace) -> int:
    started = time.time()
    config = _build_config(args)
    qg, qa = _build_backends(args)
    instances, malformed = _read_instances(args.input)
    for issue in malformed:
        logger.warning("skipping malformed line: %s", issue)
    if len(malformed) > args.error_budget:
        print(
            f"error: {len(malformed)} malformed input line(s) exceed budget {args.error_budget}",
            file=sys.stderr,
        )
        return 1
    results = score_batch(instances, config, qg, qa, jobs=args.jobs)

    lines = []
    for result in results:
        if isinstance(result, InstanceFailure):
            lines.append(_dumps({"id": result.id, "error": result.error}))
        else:
            lines.append(_dumps(_result_dict(result)))
    _atomic_write(args.output, "".join(line + "\n" for line in lines))

    failures = sum(1 for r in results if isinstance(r, InstanceFailure))
    degenerate = sum(1 for r in results if isinstance(r, QagsResult) and r.degenerate)
    totals: dict[str, int] = {}
    for result in results:
        if isinstance(result, QagsResult):
            for key, value in result.counts.items():
                totals[key] = totals.get(key, 0) + value
            totals["questions_errored"] = totals.get("questions_errored", 0) + result.errored_questions
    manifest = {
        "command": "score",
        "config": {**asdict(config), "similarity_metric": config.similarity_metric.value},
        "backend": _backend_manifest(args),
        "input": args.input,
        "output": args.output,
        "jobs": args.jobs,
        "error_budget": args.error_budget,
        "instances": {
            "total": len(instances),
            "scored": len(instances) - failures,
            "errored": failures,
            "degenerate": degenerate,
            "malformed_input_lines": len(malformed),
        },
        "stage_counts": totals,
        "duration_seconds": time.time() - started,
    }
    manifest_path = args.manifest or f"{args.output}.manifest.json"
    _atomic_write(manifest_path, json.dumps(manifest, sort_keys=True, indent=2) + "\n")

    if failures or malformed:
        return 2
    return 0


def _read_annotations(path: str) -> dict[str, AnnotationSet]:
    annotations = {}
    for lineno, line in _read_jsonl(path):
        record = json.loads(line)
        annotation = AnnotationSet(
            summary_id=record["summary_id"],
            sentences=tuple(
                SentenceJudgments(index=s["index"], judgments=tuple(s["judgments"]))
                for s in record["sentences"]
            ),
        )
        annotations[annotation.summary_id] = annotation
    return annotations


def _read_results(path: str) -> tuple[dict[str, float], dict[str, dict[str, float]]]:
    scores: dict[str, float] = {}
    baselines: dict[str, dict[str, float]] = {}
    for lineno, line in _read_jsonl(path):
        record = json.loads(line)
        if "error" in record:
            continue
        scores[record["id"]] = float(record["score"])
        for name, value in (record.get("baselines") or {}).items():
            baselines.setdefault(name, {})[record["id"]] = float(value)
    return scores, baselines


def cmd_correlate(args: argparse.Namespace) -> int:
    scores, baselines = _read_results(args.results)
    annotations = _read_annotations(args.annotations)
    result_ids = set(scores)
    annotation_ids = set(annotations)
    if result_ids != annotation_ids:
        missing = sorted(result_ids ^ annotation_ids)
        print(f"error: unmatched ids between results and annotations: {missing}", file=sys.stderr)
        return 1
    ids = sorted(result_ids)
    humans = [human_score(annotations[i]) for i in ids]

    columns: dict[str, list[float]] = {"qags": [scores[i] for i in ids]}
    for name in sorted(baselines):
        values = baselines[name]
        if set(values) != result_ids:
            logger.warning("baseline %r does not cover every id; skipped", name)
            continue
        columns[name] = [values[i] for i in ids]

    correlations = {}
    try:
        for name, xs in columns.items():
            correlations[name] = pearson(xs, humans)
        alpha = krippendorff_alpha(list(annotations.values()))
    except DegenerateInput as exc:
        print(f"error: degenerate input: {exc}", file=sys.stderr)
        return 1

    out = io.StringIO()
    out.write(f"{'metric':<16} pearson_x100\n")
    for name, r in correlations.items():
        out.write(f"{name:<16} {100 * r:12.2f}\n")
    out.write(f"krippendorff_alpha {alpha:.4f}\n")
    print(out.getvalue(), end="")
    if args.output:
        payload = {"pearson": correlations, "krippendorff_alpha": alpha, "n": len(ids)}
        _atomic_write(args.output, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    config = _build_config(args)
    qg, qa = _build_backends(args)
    triplets = []
    for lineno, line in _read_jsonl(args.triplets):
        record = json.loads(line)
        triplets.append(
            RankingTriplet(
                source=record["source"],
                consistent=record["consistent"],
                inconsistent=record["inconsistent"],
            )
        )
    if not triplets:
        print("error: no triplets in input", file=sys.stderr)
        return 1

    def metric(source: str, sentence: str) -> float:
        digest = hashlib.sha256(f"{source}\x00{sentence}".encode()).hexdigest()[:16]
        instance = ScoringInstance(id=f"rank-{digest}", article=source, summary=sentence)
        return score_instance(instance, config, qg, qa).score

    accuracy = ranking_accuracy(triplets, metric)
    print(f"ranking accuracy: {100 * accuracy:.1f}% ({len(triplets)} triplets)")
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    ks = [int(k) for k in args.ks.split(",") if k.strip()]
    metrics = [SimilarityMetric(m.strip()) for m in args.similarities.split(",") if m.strip()]
    if not ks or not metrics:
        print("error: empty ablation grid", file=sys.stderr)
        return 1
    config = _build_config(args)
    qg, qa = _build_backends(args)
    instances, malformed = _read_instances(args.input)
    if malformed:
        print(f"error: malformed input lines: {malformed}", file=sys.stderr)
        return 1
    annotations = _read_annotations(args.annotations)
    humans = {sid: human_score(a) for sid, a in annotations.items()}
    cells = ablation_sweep(instances, humans, ks, metrics, config, qg, qa, jobs=args.jobs)

    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["num_questions", "similarity", "pearson"])
    for cell in cells:
        writer.writerow([cell.num_questions, cell.similarity_metric.value, repr(cell.pearson)])
    _atomic_write(args.output, buffer.getvalue())
    print(f"{'K':>4} {'similarity':<10} pearson_x100")
    for cell in cells:
        print(f"{cell.num_questions:>4} {cell.similarity_metric.value:<10} {100 * cell.pearson:12.2f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qags",
        description="Score the factual consistency of summaries by asking and answering questions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score a JSONL file of {id, article, summary} instances")
    _add_path_arg(p_score, "--input", "INPUT")
    _add_path_arg(p_score, "--output", "OUTPUT")
    p_score.add_argument("--manifest", default=_env_str("MANIFEST", None))
    p_score.add_argument("--error-budget", type=int, default=_env_int("ERROR_BUDGET", 0))
    _add_config_args(p_score)
    _add_backend_args(p_score)
    p_score.set_defaults(func=cmd_score)

    p_corr = sub.add_parser("correlate", help="correlate scores with human judgments")
    _add_path_arg(p_corr, "--results", "RESULTS")
    _add_path_arg(p_corr, "--annotations", "ANNOTATIONS")
    p_corr.add_argument("--output", default=_env_str("OUTPUT", None))
    p_corr.set_defaults(func=cmd_correlate)

    p_rank = sub.add_parser("rank", help="sentence-ranking accuracy on consistency triplets")
    _add_path_arg(p_rank, "--triplets", "TRIPLETS")
    _add_config_args(p_rank)
    _add_backend_args(p_rank)
    p_rank.set_defaults(func=cmd_rank)

    p_ablate = sub.add_parser("ablate", help="sweep K and similarity metric, report correlations")
    _add_path_arg(p_ablate, "--input", "INPUT")
    _add_path_arg(p_ablate, "--annotations", "ANNOTATIONS")
    _add_path_arg(p_ablate, "--output", "OUTPUT")
    p_ablate.add_argument("--ks", default=_env_str("KS", "5,10,20,50"))
    p_ablate.add_argument("--similarities", default=_env_str("SIMILARITIES", "f1"))
    _add_config_args(p_ablate)
    _add_backend_args(p_ablate)
    p_ablate.set_defaults(func=cmd_ablate)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QagsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
