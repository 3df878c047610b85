"""Reference inference service for the qags model wire protocol."""

from .config import ServerConfig
from .app import create_app

__version__ = "0.1.0"

__all__ = ["ServerConfig", "create_app"]
