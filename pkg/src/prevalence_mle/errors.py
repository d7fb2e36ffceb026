"""Exception types shared across the package."""


class EmptyDataError(ValueError):
    """An operation received an empty collection where data is required."""


class SingleClassError(ValueError):
    """Labeled data contains only one of the two classes."""


class NonFiniteFeatureError(ValueError):
    """A feature value is NaN or infinite."""


class DimensionMismatchError(ValueError):
    """Feature dimensions disagree between inputs."""


class ScoreRangeError(ValueError):
    """A score lies outside the closed unit interval."""


class ZeroMassError(ValueError):
    """A score fell in a bin whose mixture mass is zero (smoothing disabled)."""


class MalformedRowError(ValueError):
    """A data file row could not be parsed; carries the 1-based row number."""

    def __init__(self, row_number: int, message: str):
        super().__init__(f"row {row_number}: {message}")
        self.row_number = row_number


class MissingClassError(ValueError):
    """A sampling pool lacks one of the two classes."""
