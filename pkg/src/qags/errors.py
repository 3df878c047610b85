"""Exception hierarchy root for the qags package."""


class QagsError(Exception):
    """Base class for all errors raised by this package."""
