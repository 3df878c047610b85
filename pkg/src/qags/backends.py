"""QG/QA backend handles: deterministic oracles, scripted replay, HTTP client.

The wire protocol is JSON over HTTP:

- ``POST /v1/questions``  body ``{context, answer, beam_width, min_len, max_len}``
  -> ``{questions: [{text, log_prob}]}``
- ``POST /v1/answers``    body ``{question, context}``
  -> ``{answer: {text, start, end} | null, confidence}``
- ``GET /v1/health``      -> ``{status: "ok", qg_model, qa_model}``

Offsets are unicode character offsets, 0-based, end-exclusive. Both sides pin
the protocol version in an ``X-QAGS-Protocol: 1`` header. Error statuses carry
``{error: string}``. The client enforces the response invariants no matter
what the server sent: answer spans must reproduce the context slice, question
lists are re-sorted by (log_prob desc, text asc), log_probs must be <= 0.
"""

import json
import re
import threading
import time
from dataclasses import dataclass

import requests

from .errors import QagsError

PROTOCOL_HEADER = "X-QAGS-Protocol"
PROTOCOL_VERSION = "1"


class BackendError(QagsError):
    """Base class for backend failures."""


class BackendUnavailable(BackendError):
    """Transport-level failure talking to a model endpoint."""


class ProtocolError(BackendError):
    """The server answered with something that violates the wire contract."""


class BackendRefused(BackendError):
    """The server answered with an error status and message."""


@dataclass(frozen=True)
class Answer:
    """Extractive answer: a context span, or an explicit no-answer (text=None)."""

    text: str | None
    start: int | None = None
    end: int | None = None
    confidence: float = 1.0

    @property
    def is_no_answer(self) -> bool:
        return self.text is None

    @classmethod
    def no_answer(cls, confidence: float = 1.0) -> "Answer":
        return cls(None, None, None, confidence)

    @classmethod
    def span(cls, text: str, start: int, end: int, confidence: float = 1.0) -> "Answer":
        return cls(text, start, end, confidence)


@dataclass(frozen=True)
class QgRequest:
    """Question-generation request.

    ``context`` is the raw conditioning text; backends that need
    answer-conditional formatting (answer + marker + context) apply their own
    marker tokens server-side.
    """

    context: str
    answer: str
    beam_width: int
    min_len: int = 8
    max_len: int = 60

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.min_len > self.max_len:
            raise ValueError("min_len must be <= max_len")


@dataclass(frozen=True)
class ScoredQuestion:
    text: str
    log_prob: float


@dataclass(frozen=True)
class QgResponse:
    questions: tuple[ScoredQuestion, ...]


@dataclass(frozen=True)
class QaRequest:
    question: str
    context: str

    def __post_init__(self):
        if not self.question:
            raise ValueError("question must be non-empty")


def _order_questions(questions: list[ScoredQuestion]) -> tuple[ScoredQuestion, ...]:
    return tuple(sorted(questions, key=lambda q: (-q.log_prob, q.text)))


class AnswerCache:
    """Memoizes QA calls by (question, context) so filtering and scoring share them."""

    def __init__(self):
        self._store: dict[tuple[str, str], Answer] = {}
        self._lock = threading.Lock()

    def answer(self, qa, question: str, context: str) -> Answer:
        key = (question, context)
        with self._lock:
            hit = self._store.get(key)
        if hit is not None:
            return hit
        result = qa.answer(QaRequest(question=question, context=context))
        with self._lock:
            self._store[key] = result
        return result


_QG_TEMPLATES = (("What is {} ?", -1.0), ("Who is {} ?", -2.0), ("Where is {} ?", -3.0))


class TemplateQg:
    """Oracle QG: wh-templates around the candidate answer, fixed log-probs."""

    def generate(self, request: QgRequest) -> QgResponse:
        questions = [
            ScoredQuestion(template.format(request.answer), log_prob)
            for template, log_prob in _QG_TEMPLATES[: request.beam_width]
        ]
        return QgResponse(questions=_order_questions(questions))


_TEMPLATE_QUESTION = re.compile(r"^(?:What|Who|Where) is (?P<target>.+) \?$")


class SpanMatchQa:
    """Oracle QA: parses the template target and returns its first occurrence."""

    def answer(self, request: QaRequest) -> Answer:
        match = _TEMPLATE_QUESTION.match(request.question)
        if match is None:
            return Answer.no_answer()
        target = match.group("target")
        index = request.context.find(target)
        if index < 0:
            return Answer.no_answer()
        return Answer.span(target, index, index + len(target))


class ScriptedBackend:
    """Replays question/answer fixtures from a JSON file.

    Fixture format::

        {
          "questions": [{"text": "...", "log_prob": -0.5}, ...],
          "answers": {"<question text>": ["candidate answer", ...] | null}
        }

    ``generate`` returns the fixture questions (top ``beam_width``) regardless
    of the requested answer. ``answer`` returns the first fixture answer found
    verbatim in the context; a null/missing entry or no match is a no-answer.
    """

    def __init__(self, questions: list[ScoredQuestion], answers: dict[str, list[str] | None]):
        self._questions = _order_questions(questions)
        self._answers = answers

    @classmethod
    def load(cls, path: str) -> "ScriptedBackend":
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
        questions = [ScoredQuestion(q["text"], float(q["log_prob"])) for q in payload["questions"]]
        for q in questions:
            if q.log_prob > 0:
                raise ValueError(f"fixture log_prob must be <= 0, got {q.log_prob}")
        return cls(questions, payload.get("answers", {}))

    def generate(self, request: QgRequest) -> QgResponse:
        return QgResponse(questions=self._questions[: request.beam_width])

    def answer(self, request: QaRequest) -> Answer:
        texts = self._answers.get(request.question)
        if not texts:
            return Answer.no_answer()
        for text in texts:
            index = request.context.find(text)
            if index >= 0:
                return Answer.span(text, index, index + len(text))
        return Answer.no_answer()


class HttpBackend:
    """Wire-protocol client for remote QG/QA model servers.

    Transport failures are retried with exponential backoff; server-side
    refusals (any HTTP error status) are not. At most ``max_in_flight``
    requests run concurrently per backend instance.
    """

    def __init__(
        self,
        qg_endpoint: str | None = None,
        qa_endpoint: str | None = None,
        timeout: float = 30.0,
        retries: int = 2,
        backoff: float = 0.5,
        max_in_flight: int = 8,
        session: requests.Session | None = None,
    ):
        self.qg_endpoint = qg_endpoint.rstrip("/") if qg_endpoint else None
        self.qa_endpoint = qa_endpoint.rstrip("/") if qa_endpoint else None
        self._timeout = timeout
        self._retries = retries
        self._backoff = backoff
        self._gate = threading.BoundedSemaphore(max_in_flight)
        self._session = session or requests.Session()

    def _post(self, endpoint: str, route: str, body: dict) -> dict:
        url = f"{endpoint}{route}"
        headers = {PROTOCOL_HEADER: PROTOCOL_VERSION}
        last_exc: Exception | None = None
        for attempt in range(self._retries + 1):
            try:
                with self._gate:
                    response = self._session.post(url, json=body, headers=headers, timeout=self._timeout)
                break
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = exc
                if attempt < self._retries:
                    time.sleep(self._backoff * (2**attempt))
        else:
            raise BackendUnavailable(f"{url}: {last_exc}") from last_exc
        if response.status_code >= 400:
            try:
                message = response.json().get("error", response.text)
            except ValueError:
                message = response.text
            raise BackendRefused(f"{url}: HTTP {response.status_code}: {message}")
        if response.headers.get(PROTOCOL_HEADER) != PROTOCOL_VERSION:
            raise ProtocolError(f"{url}: missing or mismatched {PROTOCOL_HEADER} response header")
        try:
            return response.json()
        except ValueError as exc:
            raise ProtocolError(f"{url}: response is not valid JSON") from exc

    def generate(self, request: QgRequest) -> QgResponse:
        if not self.qg_endpoint:
            raise BackendUnavailable("no QG endpoint configured")
        payload = self._post(
            self.qg_endpoint,
            "/v1/questions",
            {
                "context": request.context,
                "answer": request.answer,
                "beam_width": request.beam_width,
                "min_len": request.min_len,
                "max_len": request.max_len,
            },
        )
        try:
            raw = payload["questions"]
            questions = [ScoredQuestion(str(q["text"]), float(q["log_prob"])) for q in raw]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed QG response: {payload!r}") from exc
        if len(questions) > request.beam_width:
            raise ProtocolError(f"server returned {len(questions)} questions for beam {request.beam_width}")
        for q in questions:
            if q.log_prob > 0:
                raise ProtocolError(f"log_prob {q.log_prob} is positive")
        return QgResponse(questions=_order_questions(questions))

    def answer(self, request: QaRequest) -> Answer:
        if not self.qa_endpoint:
            raise BackendUnavailable("no QA endpoint configured")
        payload = self._post(
            self.qa_endpoint,
            "/v1/answers",
            {"question": request.question, "context": request.context},
        )
        try:
            raw = payload["answer"]
            confidence = float(payload["confidence"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed QA response: {payload!r}") from exc
        if not 0.0 <= confidence <= 1.0:
            raise ProtocolError(f"confidence {confidence} outside [0,1]")
        if raw is None:
            return Answer.no_answer(confidence)
        try:
            text, start, end = str(raw["text"]), int(raw["start"]), int(raw["end"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed answer object: {raw!r}") from exc
        if request.context[start:end] != text:
            raise ProtocolError(
                f"answer span [{start},{end}) does not reproduce its text in the context"
            )
        return Answer.span(text, start, end, confidence)

    def health(self, endpoint: str) -> dict:
        url = f"{endpoint.rstrip('/')}/v1/health"
        try:
            response = self._session.get(
                url, headers={PROTOCOL_HEADER: PROTOCOL_VERSION}, timeout=self._timeout
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise BackendUnavailable(f"{url}: {exc}") from exc
        if response.status_code >= 400:
            raise BackendRefused(f"{url}: HTTP {response.status_code}")
        try:
            return response.json()
        except ValueError as exc:
            raise ProtocolError(f"{url}: response is not valid JSON") from exc
