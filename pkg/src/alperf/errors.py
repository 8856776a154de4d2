"""Shared exception types."""


class ValidationError(ValueError):
    """An input violates a documented contract (bad config, bad argument)."""
