"""The primary wire client round-trips against a stub server replaying fixtures."""

import pathlib
import threading
import time

import pytest
import uvicorn

from qags.backends import Answer, BackendRefused, HttpBackend, QaRequest, QgRequest

from qags_server import ServerConfig, create_app
from qags_server.engines import FixtureReplayEngine

FIXTURES_PATH = pathlib.Path(__file__).parent / "fixtures" / "protocol_fixtures.json"


@pytest.fixture(scope="module")
def stub_endpoint():
    engine = FixtureReplayEngine.load(str(FIXTURES_PATH))
    app = create_app(ServerConfig(), engine=engine)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("stub server did not start")
        time.sleep(0.01)
    host, port = server.servers[0].sockets[0].getsockname()[:2]
    yield f"http://{host}:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_wire_client_round_trips_recorded_fixtures(stub_endpoint, recorded_fixtures):
    backend = HttpBackend(qg_endpoint=stub_endpoint, qa_endpoint=stub_endpoint)
    for entry in recorded_fixtures:
        body, expected = entry["request"], entry["response"]
        if entry["route"] == "/v1/questions":
            response = backend.generate(
                QgRequest(
                    context=body["context"],
                    answer=body["answer"],
                    beam_width=body["beam_width"],
                    min_len=body["min_len"],
                    max_len=body["max_len"],
                )
            )
            got = [{"text": q.text, "log_prob": q.log_prob} for q in response.questions]
            assert got == expected["questions"]
        else:
            answer = backend.answer(QaRequest(question=body["question"], context=body["context"]))
            if expected["answer"] is None:
                assert answer.is_no_answer
            else:
                assert answer == Answer.span(
                    expected["answer"]["text"],
                    expected["answer"]["start"],
                    expected["answer"]["end"],
                    expected["confidence"],
                )


def test_wire_client_health_round_trip(stub_endpoint):
    backend = HttpBackend(qg_endpoint=stub_endpoint, qa_endpoint=stub_endpoint)
    payload = backend.health(stub_endpoint)
    assert payload["status"] == "ok"
    assert payload["qg_model"] == "fixture-qg"


def test_unrecorded_request_is_refused(stub_endpoint):
    backend = HttpBackend(qg_endpoint=stub_endpoint, qa_endpoint=stub_endpoint)
    with pytest.raises(BackendRefused, match="no recorded fixture"):
        backend.answer(QaRequest(question="never recorded ?", context="nope"))
