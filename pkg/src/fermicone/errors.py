"""Shared exception types."""


class ResourceLimitError(RuntimeError):
    """A hard resource cap (cone width, dense-oracle mode count) was exceeded.

    Raised instead of silently truncating or approximating.
    """
