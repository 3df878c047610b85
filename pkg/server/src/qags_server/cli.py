"""Console entry point: qags-server."""

import argparse
import logging

import uvicorn

from .app import create_app
from .config import ServerConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qags-server",
        description="Serve question-generation and question-answering models over HTTP.",
    )
    parser.add_argument("--engine", choices=["rule", "transformers"], default=None)
    parser.add_argument("--qg-model", default=None, help="checkpoint id or path for QG")
    parser.add_argument("--qa-model", default=None, help="checkpoint id or path for QA")
    parser.add_argument("--device", default=None)
    parser.add_argument("--beam-width", type=int, default=None)
    parser.add_argument("--length-penalty", type=float, default=None)
    parser.add_argument("--no-repeat-ngram-size", type=int, default=None)
    parser.add_argument("--min-len", type=int, default=None)
    parser.add_argument("--max-len", type=int, default=None)
    parser.add_argument("--no-answer-threshold", type=float, default=None)
    parser.add_argument("--answer-marker", default=None)
    parser.add_argument("--question-marker", default=None)
    parser.add_argument("--host", default=None)
    parser.add_argument("--port", type=int, default=None)
    parser.add_argument(
        "--workers", type=int, default=None, help="max engine calls in flight at once"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    overrides = {key: value for key, value in vars(args).items() if value is not None}
    config = ServerConfig.from_env(**overrides)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
