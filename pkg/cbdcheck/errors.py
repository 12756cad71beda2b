"""
errors.py
=========

Exception hierarchy shared by the library and the CLI.

Every error knows the exit code the CLI maps it to, so that worker threads
can hand failures back over the queue and the CLI never needs to inspect
messages to pick a code.
"""

from __future__ import annotations


class CbdError(Exception):
    """Root of all cbdcheck errors."""

    exit_code: int = 2


class InvalidSystemError(CbdError, ValueError):
    """A system (or one of its parts) violates a model invariant."""


class SystemFileSyntaxError(InvalidSystemError):
    """
    Malformed system file.

    Attributes:
        line (int): 1-based line number of the offending token.
        column (int): 1-based column of the offending token.
    """

    def __init__(self, message: str, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class PmfSumError(InvalidSystemError):
    """A bunch pmf does not sum to exactly 1."""


class DuplicateLabelError(InvalidSystemError):
    """A (content, context) label, content id or context id is declared twice."""


class UnknownOutcomeError(InvalidSystemError):
    """A pmf key uses a symbol outside its content's outcome set."""


class ContentNotInBunchError(InvalidSystemError):
    """A content was looked up in a bunch that does not measure it."""


class UnknownContextError(InvalidSystemError):
    """A context id is not declared (or not part of a connection)."""


class OutcomeSetMismatchError(InvalidSystemError):
    """Two distributions that must share an outcome set do not."""


class InvalidParameterError(InvalidSystemError):
    """A scenario or constraint parameter is out of range."""


class SystemTooLargeError(CbdError):
    """The product space exceeds the configured assignment cap."""

    exit_code = 3


class OracleScaleError(CbdError):
    """The LP is beyond the brute-force oracle's scale guard."""

    exit_code = 3


class InconsistentConnectednessError(CbdError):
    """Strict mode was requested for an inconsistently connected system."""


class LpInconsistencyError(CbdError):
    """Internal LP failure: unbounded objective or a witness that fails substitution."""

    exit_code = 3


class OracleDisagreementError(CbdError):
    """The simplex verdict and the brute-force verdict differ."""

    exit_code = 3


class CorpusError(CbdError):
    """A corpus entry is missing one of its two files or its sidecar is malformed."""
