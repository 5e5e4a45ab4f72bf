"""
Exception hierarchy shared by every sub-package.

Each class carries the process exit code the CLI uses for it.
"""

from __future__ import annotations


class ConfocalError(Exception):
    """Root of every failure raised by the library."""

    exit_code = 2
    # Pipeline step that failed, filled in by the CLI
    stage: str | None = None


class ConfigError(ConfocalError, ValueError):
    """A configuration value is out of range or an experiment file is malformed."""


class InvalidAxes(ConfocalError, ValueError):
    """An ellipse axis length is not a positive finite number."""


class NotAnEllipse(ConfocalError):
    """A conic does not describe a real ellipse."""


class UndefinedAtCriticalPoint(ConfocalError):
    """Sampson distance queried where the conic gradient vanishes."""


class DegenerateInput(ConfocalError):
    """Point set cannot determine a conic (collinear, coincident, rank-deficient)."""


class InsufficientPoints(DegenerateInput):
    """Fewer points than an estimator or pipeline stage needs."""

    def __init__(self, needed: int, got: int, what: str = "points") -> None:
        super().__init__(f"insufficient points: need at least {needed} {what}, got {got}")
        self.needed = needed
        self.got = got


class InitializationFailed(ConfocalError):
    """The initial estimate for an iterative fit could not be computed."""


class NumericalFailure(ConfocalError):
    """Normal equations stayed unsolvable even at maximum damping."""

    exit_code = 3


class EmptyResult(ConfocalError):
    """A generator produced no output (e.g. no pixel survived the raster filters)."""


class EmptyInput(ConfocalError):
    """A metric was asked to summarize an empty point set."""


class FileAccessError(ConfocalError):
    """An input file could not be opened or read, or an output file could not be written."""


class ParseError(ConfocalError):
    """A line of a text input file could not be parsed."""

    def __init__(self, message: str, line_number: int) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
