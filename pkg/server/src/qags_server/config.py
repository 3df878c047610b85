"""Server configuration, settable through flags or QAGS_SERVER_* env vars."""

import os
from dataclasses import dataclass


def _env(name: str) -> str | None:
    return os.environ.get(f"QAGS_SERVER_{name}")


@dataclass(frozen=True)
class ServerConfig:
    """Engine selection and decoding defaults.

    The decoding defaults (beam 10, length penalty 1.0, trigram-repetition
    blocking, generations between 8 and 60 tokens) apply when a request does
    not override them. ``answer_marker`` / ``question_marker`` are the special
    tokens used for answer-conditional input formatting; they are part of
    checkpoint compatibility, so point them at whatever the checkpoint was
    fine-tuned with.
    """

    engine: str = "rule"  # "rule" or "transformers"
    qg_model: str = "rule-template-qg"
    qa_model: str = "rule-span-qa"
    device: str = "cpu"
    beam_width: int = 10
    length_penalty: float = 1.0
    no_repeat_ngram_size: int = 3
    min_len: int = 8
    max_len: int = 60
    no_answer_threshold: float = 0.0
    answer_marker: str = "<answer>"
    question_marker: str = "<question>"
    host: str = "127.0.0.1"
    port: int = 8731
    workers: int = 1

    def __post_init__(self):
        if self.engine not in ("rule", "transformers"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.min_len > self.max_len:
            raise ValueError("min_len must be <= max_len")

    @classmethod
    def from_env(cls, **overrides) -> "ServerConfig":
        fields = {
            "engine": _env("ENGINE"),
            "qg_model": _env("QG_MODEL"),
            "qa_model": _env("QA_MODEL"),
            "device": _env("DEVICE"),
            "beam_width": _env("BEAM_WIDTH"),
            "length_penalty": _env("LENGTH_PENALTY"),
            "no_repeat_ngram_size": _env("NO_REPEAT_NGRAM_SIZE"),
            "min_len": _env("MIN_LEN"),
            "max_len": _env("MAX_LEN"),
            "no_answer_threshold": _env("NO_ANSWER_THRESHOLD"),
            "answer_marker": _env("ANSWER_MARKER"),
            "question_marker": _env("QUESTION_MARKER"),
            "host": _env("HOST"),
            "port": _env("PORT"),
            "workers": _env("WORKERS"),
        }
        ints = {"beam_width", "no_repeat_ngram_size", "min_len", "max_len", "port", "workers"}
        floats = {"length_penalty", "no_answer_threshold"}
        kwargs = {}
        for name, raw in fields.items():
            if raw is None:
                continue
            if name in ints:
                kwargs[name] = int(raw)
            elif name in floats:
                kwargs[name] = float(raw)
            else:
                kwargs[name] = raw
        kwargs.update(overrides)
        return cls(**kwargs)
