"""Exception hierarchy shared across the package."""


class PersorecError(Exception):
    """Base class for all package errors."""


class ValidationError(PersorecError, ValueError):
    """A value violates a documented invariant."""


class MbtiParseError(ValidationError):
    def __init__(self, text, position, allowed):
        self.text = text
        self.position = position
        self.allowed = allowed
        super().__init__(
            f"invalid MBTI type {text!r}: position {position} must be one of "
            f"{'/'.join(allowed)}"
        )


class IncompatibleModelError(ValidationError):
    """Two trait vectors come from different personality models."""


class UnsupportedModelError(ValidationError):
    """The operation is not defined for the requested personality model."""


class UnknownIdError(PersorecError, KeyError):
    """A user or item id is not present in the dataset."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown id"


class DatasetError(PersorecError):
    """Malformed, inconsistent, or unreadable dataset files."""
