"""Exception types raised by streamsnap."""

from __future__ import annotations


class StreamSnapError(Exception):
    """Base class for all library errors."""


class DomainError(StreamSnapError, ValueError):
    """An argument lies outside the domain of a formula (e.g. ``n = 0``)."""


class UnsupportedRegimeError(StreamSnapError, ValueError):
    """A limit-law query was made for a regime that has no such law."""


class PreconditionError(StreamSnapError, ValueError):
    """A harness check was invoked on inputs that violate its precondition."""


class ScheduleParseError(StreamSnapError, ValueError):
    """A schedule spec string does not match the grammar.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class ScheduleRangeError(StreamSnapError, ValueError):
    """A schedule parameter violates its bound (e.g. ``a > 1``)."""


class RecordError(StreamSnapError, ValueError):
    """A malformed input record; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
