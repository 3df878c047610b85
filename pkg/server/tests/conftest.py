import json
import pathlib

import pytest

pytest.importorskip("qags_server", reason="model-server package not installed")

FIXTURES_PATH = pathlib.Path(__file__).parent / "fixtures" / "protocol_fixtures.json"


@pytest.fixture(scope="session")
def recorded_fixtures():
    return json.loads(FIXTURES_PATH.read_text(encoding="utf-8"))
