"""Exception hierarchy.

``ModelError`` covers invalid models and pairs (CLI exit code 1);
``TreeParseError`` covers malformed input text (CLI exit code 2).
"""

from treechernoff._linalg import NotPositiveDefiniteError


class ModelError(ValueError):
    """A model or pair violates a domain invariant."""


class InvalidTreeError(ModelError):
    """Tree structure or edge weights are invalid."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class GraftError(ModelError):
    """A grafting operation cannot be applied."""


class TrivialGraftError(GraftError):
    """The graft is a no-op (attach node equals the old parent, or identical trees)."""


class ReductionError(ModelError):
    """A pruning or contraction precondition does not hold."""


class TreeParseError(ValueError):
    """Malformed tree text. ``lineno`` is 1-based, or None for whole-file errors."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


__all__ = [
    "ModelError",
    "InvalidTreeError",
    "GraftError",
    "TrivialGraftError",
    "ReductionError",
    "TreeParseError",
    "NotPositiveDefiniteError",
]
