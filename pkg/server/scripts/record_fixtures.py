#!/usr/bin/env python3
"""Record the protocol-conformance fixture suite from a live rule-engine app.

Writes request/response pairs that tests replay to pin the wire behaviour.
Rerun after changing the rule engine or the protocol surface.
"""

import argparse
import json
import pathlib

from fastapi.testclient import TestClient

from qags_server import ServerConfig, create_app

CONTEXT = (
    "Alba Frost opened the Silver Bay bridge on Tuesday. "
    'Mayor Hugo Drake called it "a turning point" for the 12,000 residents.'
)

REQUESTS = [
    ("/v1/questions", {"context": CONTEXT, "answer": "Alba Frost", "beam_width": 10, "min_len": 8, "max_len": 60}),
    ("/v1/questions", {"context": CONTEXT, "answer": "Silver Bay bridge", "beam_width": 3, "min_len": 8, "max_len": 60}),
    ("/v1/questions", {"context": CONTEXT, "answer": "Tuesday", "beam_width": 1, "min_len": 8, "max_len": 60}),
    ("/v1/questions", {"context": CONTEXT, "answer": "a turning point", "beam_width": 5, "min_len": 8, "max_len": 12}),
    ("/v1/answers", {"question": "What is Alba Frost ?", "context": CONTEXT}),
    ("/v1/answers", {"question": "Where is Silver Bay bridge ?", "context": CONTEXT}),
    ("/v1/answers", {"question": "Who is Mayor Hugo Drake ?", "context": CONTEXT}),
    ("/v1/answers", {"question": "What is Faisal Khan ?", "context": CONTEXT}),
    ("/v1/answers", {"question": "completely freeform question ?", "context": CONTEXT}),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--output",
        default=str(pathlib.Path(__file__).parent.parent / "tests" / "fixtures" / "protocol_fixtures.json"),
    )
    args = parser.parse_args()

    app = create_app(ServerConfig())
    fixtures = []
    with TestClient(app) as client:
        for route, body in REQUESTS:
            response = client.post(route, json=body)
            response.raise_for_status()
            fixtures.append({"route": route, "request": body, "response": response.json()})

    output = pathlib.Path(args.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(json.dumps(fixtures, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"recorded {len(fixtures)} fixtures to {output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
