"""Inference engines behind the wire protocol.

``RuleBasedEngine`` is deterministic and dependency-free: it templates
questions around the target answer and answers by first exact occurrence.
``TransformersEngine`` serves real checkpoints (seq2seq QG, extractive QA with
a no-answer head); it imports torch/transformers lazily so the rest of the
package works without them. ``FixtureReplayEngine`` replays recorded
request/response pairs and backs the stub server used in tests.
"""

import json
from dataclasses import dataclass

from .config import ServerConfig


@dataclass(frozen=True)
class SpanAnswer:
    text: str | None
    start: int | None
    end: int | None
    confidence: float

    @classmethod
    def none(cls, confidence: float = 1.0) -> "SpanAnswer":
        return cls(None, None, None, confidence)


class RuleBasedEngine:
    """Template QG and exact-substring QA; instant to load, fully deterministic."""

    _WH_TEMPLATES = (
        "What is {} ?",
        "Who is {} ?",
        "Where is {} ?",
        "When was {} ?",
        "How is {} described ?",
    )

    def __init__(self, config: ServerConfig):
        self.qg_model = config.qg_model
        self.qa_model = config.qa_model

    def generate(
        self, context: str, answer: str, beam_width: int, min_len: int, max_len: int
    ) -> list[tuple[str, float]]:
        beams = []
        for rank, template in enumerate(self._WH_TEMPLATES[:beam_width]):
            question = template.format(answer)
            length = len(question.split())
            if length > max_len:
                continue
            beams.append((question, -1.0 * (rank + 1)))
        return beams

    def answer(self, question: str, context: str) -> SpanAnswer:
        target = self._target_of(question)
        if target is None:
            return SpanAnswer.none()
        index = context.find(target)
        if index < 0:
            return SpanAnswer.none()
        return SpanAnswer(target, index, index + len(target), 1.0)

    @staticmethod
    def _target_of(question: str) -> str | None:
        stripped = question.strip().removesuffix("?").rstrip()
        for prefix, suffix in (
            ("What is ", ""),
            ("Who is ", ""),
            ("Where is ", ""),
            ("When was ", ""),
            ("How is ", " described"),
        ):
            if stripped.startswith(prefix):
                core = stripped.removeprefix(prefix)
                if suffix and core.endswith(suffix):
                    core = core.removesuffix(suffix)
                elif suffix:
                    continue
                return core or None
        return None


class FixtureReplayEngine:
    """Replays recorded fixtures keyed by the exact request body."""

    def __init__(self, fixtures: list[dict], qg_model: str = "fixture-qg", qa_model: str = "fixture-qa"):
        self.qg_model = qg_model
        self.qa_model = qa_model
        self._responses: dict[tuple[str, str], dict] = {}
        for entry in fixtures:
            key = (entry["route"], json.dumps(entry["request"], sort_keys=True))
            self._responses[key] = entry["response"]

    @classmethod
    def load(cls, path: str) -> "FixtureReplayEngine":
        with open(path, encoding="utf-8") as handle:
            return cls(json.load(handle))

    def _lookup(self, route: str, body: dict) -> dict:
        key = (route, json.dumps(body, sort_keys=True))
        if key not in self._responses:
            raise LookupError(f"no recorded fixture for {route} request")
        return self._responses[key]

    def generate(
        self, context: str, answer: str, beam_width: int, min_len: int, max_len: int
    ) -> list[tuple[str, float]]:
        body = {
            "context": context,
            "answer": answer,
            "beam_width": beam_width,
            "min_len": min_len,
            "max_len": max_len,
        }
        payload = self._lookup("/v1/questions", body)
        return [(q["text"], q["log_prob"]) for q in payload["questions"]]

    def answer(self, question: str, context: str) -> SpanAnswer:
        payload = self._lookup("/v1/answers", {"question": question, "context": context})
        raw = payload["answer"]
        if raw is None:
            return SpanAnswer.none(payload["confidence"])
        return SpanAnswer(raw["text"], raw["start"], raw["end"], payload["confidence"])


class TransformersEngine:
    """Serves published checkpoints: seq2seq QG plus extractive QA.

    QG input is the answer-conditional concatenation
    ``{answer} {answer_marker} {context}``; the generated question follows the
    ``question_marker`` convention the checkpoint was fine-tuned with. QA uses
    a SQuAD2-style null threshold: when the no-answer score beats the best
    span by more than ``no_answer_threshold``, the engine reports no answer.
    """

    def __init__(self, config: ServerConfig):
        import threading

        import torch
        from transformers import (
            AutoModelForQuestionAnswering,
            AutoModelForSeq2SeqLM,
            AutoTokenizer,
        )

        self._torch = torch
        self._config = config
        self._device_lock = threading.Lock()
        self.qg_model = config.qg_model
        self.qa_model = config.qa_model
        self._device = torch.device(config.device)
        self._qg_tokenizer = AutoTokenizer.from_pretrained(config.qg_model)
        self._qg = AutoModelForSeq2SeqLM.from_pretrained(config.qg_model).to(self._device).eval()
        self._qa_tokenizer = AutoTokenizer.from_pretrained(config.qa_model)
        self._qa = (
            AutoModelForQuestionAnswering.from_pretrained(config.qa_model).to(self._device).eval()
        )

    def generate(
        self, context: str, answer: str, beam_width: int, min_len: int, max_len: int
    ) -> list[tuple[str, float]]:
        torch = self._torch
        source = f"{answer} {self._config.answer_marker} {context}"
        inputs = self._qg_tokenizer(
            source, return_tensors="pt", truncation=True, max_length=1024
        ).to(self._device)
        with self._device_lock, torch.no_grad():
            output = self._qg.generate(
                **inputs,
                num_beams=beam_width,
                num_return_sequences=beam_width,
                length_penalty=self._config.length_penalty,
                no_repeat_ngram_size=self._config.no_repeat_ngram_size,
                min_length=min_len,
                max_length=max_len,
                output_scores=True,
                return_dict_in_generate=True,
                do_sample=False,
            )
        questions = []
        for sequence, score in zip(output.sequences, output.sequences_scores):
            text = self._qg_tokenizer.decode(sequence, skip_special_tokens=True).strip()
            if text:
                questions.append((text, min(0.0, float(score))))
        return questions

    def answer(self, question: str, context: str) -> SpanAnswer:
        torch = self._torch
        inputs = self._qa_tokenizer(
            question,
            context,
            return_tensors="pt",
            truncation="only_second",
            max_length=512,
            return_offsets_mapping=True,
        )
        offsets = inputs.pop("offset_mapping")[0].tolist()
        sequence_ids = inputs.sequence_ids(0)
        inputs = inputs.to(self._device)
        with self._device_lock, torch.no_grad():
            output = self._qa(**inputs)
        start_logits = output.start_logits[0]
        end_logits = output.end_logits[0]
        null_score = float(start_logits[0] + end_logits[0])

        best_score, best_span = None, None
        context_positions = [
            i for i, sid in enumerate(sequence_ids) if sid == 1 and offsets[i][1] > offsets[i][0]
        ]
        for i in context_positions:
            for j in context_positions:
                if j < i or j - i > 30:
                    continue
                score = float(start_logits[i] + end_logits[j])
                if best_score is None or score > best_score:
                    best_score, best_span = score, (i, j)
        if best_span is None or null_score - best_score > self._config.no_answer_threshold:
            probability = 1.0 / (1.0 + pow(2.718281828, -(null_score - (best_score or null_score))))
            return SpanAnswer.none(min(1.0, max(0.0, probability)))
        start_char = offsets[best_span[0]][0]
        end_char = offsets[best_span[1]][1]
        probability = 1.0 / (1.0 + pow(2.718281828, -(best_score - null_score)))
        return SpanAnswer(
            context[start_char:end_char], start_char, end_char, min(1.0, max(0.0, probability))
        )


def build_engine(config: ServerConfig):
    if config.engine == "rule":
        return RuleBasedEngine(config)
    return TransformersEngine(config)
