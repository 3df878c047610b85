"""Protocol conformance: recorded fixtures, schemas, and error envelopes."""

import jsonschema
import pytest
from fastapi.testclient import TestClient

from qags_server import ServerConfig, create_app
from qags_server.engines import RuleBasedEngine, SpanAnswer
from qags_server.schemas import (
    ANSWER_RESPONSE,
    ERROR_RESPONSE,
    HEALTH_RESPONSE,
    QUESTION_REQUEST,
    ANSWER_REQUEST,
    QUESTION_RESPONSE,
)


@pytest.fixture()
def client():
    with TestClient(create_app(ServerConfig())) as test_client:
        yield test_client


def test_recorded_fixture_suite_validates(client, recorded_fixtures):
    assert recorded_fixtures, "fixture suite must not be empty"
    for entry in recorded_fixtures:
        route, body, expected = entry["route"], entry["request"], entry["response"]
        request_schema = QUESTION_REQUEST if route == "/v1/questions" else ANSWER_REQUEST
        jsonschema.validate(body, request_schema)
        response = client.post(route, json=body)
        assert response.status_code == 200
        assert response.headers["X-QAGS-Protocol"] == "1"
        payload = response.json()
        assert payload == expected  # deterministic engine, fixed inputs

        if route == "/v1/questions":
            jsonschema.validate(payload, QUESTION_RESPONSE)
            questions = payload["questions"]
            assert len(questions) <= body["beam_width"]
            log_probs = [q["log_prob"] for q in questions]
            assert log_probs == sorted(log_probs, reverse=True)
            assert all(lp <= 0 for lp in log_probs)
        else:
            jsonschema.validate(payload, ANSWER_RESPONSE)
            answer = payload["answer"]
            if answer is not None:
                context = body["context"]
                assert context[answer["start"] : answer["end"]] == answer["text"]


def test_health_schema(client):
    response = client.get("/v1/health")
    assert response.status_code == 200
    jsonschema.validate(response.json(), HEALTH_RESPONSE)
    assert response.headers["X-QAGS-Protocol"] == "1"


@pytest.mark.parametrize(
    "body",
    [
        {},
        {"context": "x", "answer": "y"},
        {"context": "x", "answer": "y", "beam_width": 0},
        {"context": "x", "answer": "y", "beam_width": 2, "min_len": 9, "max_len": 3},
        {"context": 5, "answer": "y", "beam_width": 2},
    ],
)
def test_questions_schema_violations_are_422(client, body):
    response = client.post("/v1/questions", json=body)
    assert response.status_code == 422
    jsonschema.validate(response.json(), ERROR_RESPONSE)
    assert response.headers["X-QAGS-Protocol"] == "1"


@pytest.mark.parametrize("body", [{}, {"question": "", "context": "x"}, {"question": "q?"}])
def test_answers_schema_violations_are_422(client, body):
    response = client.post("/v1/answers", json=body)
    assert response.status_code == 422
    jsonschema.validate(response.json(), ERROR_RESPONSE)


def test_503_until_engine_loaded():
    app = create_app(ServerConfig())
    client = TestClient(app)  # lifespan never entered, engine stays unloaded
    response = client.get("/v1/health")
    assert response.status_code == 503
    jsonschema.validate(response.json(), ERROR_RESPONSE)
    response = client.post(
        "/v1/questions", json={"context": "x", "answer": "y", "beam_width": 1}
    )
    assert response.status_code == 503


def test_unsupported_protocol_version_rejected(client):
    response = client.get("/v1/health", headers={"X-QAGS-Protocol": "2"})
    assert response.status_code == 400
    jsonschema.validate(response.json(), ERROR_RESPONSE)
    assert response.headers["X-QAGS-Protocol"] == "1"


def test_engine_span_violation_is_500():
    class BrokenEngine(RuleBasedEngine):
        def answer(self, question, context):
            return SpanAnswer("wrong", 0, 5, 1.0)

    app = create_app(ServerConfig(), engine=BrokenEngine(ServerConfig()))
    with TestClient(app, raise_server_exceptions=False) as client:
        response = client.post(
            "/v1/answers", json={"question": "What is x ?", "context": "abcdefgh"}
        )
        assert response.status_code == 500
        jsonschema.validate(response.json(), ERROR_RESPONSE)


def test_no_answer_encodes_as_null(client):
    response = client.post(
        "/v1/answers", json={"question": "What is Zorblax ?", "context": "nothing relevant"}
    )
    assert response.status_code == 200
    assert response.json()["answer"] is None


def test_beam_width_truncates_server_side(client):
    response = client.post(
        "/v1/questions", json={"context": "c", "answer": "Alba", "beam_width": 2}
    )
    assert response.status_code == 200
    assert len(response.json()["questions"]) == 2
