"""Exception hierarchy shared by every stage of the pipeline.

Each error carries an ``error_class`` used for the greppable
``error[<class>]`` prefix printed by the command line driver.
"""

from __future__ import annotations


class StreamlangError(Exception):
    error_class = "error"

    def __init__(self, message: str, pos=None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    def __str__(self) -> str:
        return self.message


class LexError(StreamlangError):
    error_class = "lex"


class ParseError(StreamlangError):
    error_class = "parse"

    def __init__(self, message: str, pos=None, expected=()):
        super().__init__(message, pos)
        self.expected = frozenset(expected)


class TypingError(StreamlangError):
    error_class = "type"


class TypeMismatch(TypingError):
    def __init__(self, message: str, pos=None, expected: str | None = None, actual: str | None = None):
        super().__init__(message, pos)
        self.expected = expected
        self.actual = actual


class OccursCheck(TypingError):
    pass


class ConstraintViolation(TypingError):
    pass


class UnboundVariable(TypingError):
    error_class = "unbound"


class ClockConflict(StreamlangError):
    error_class = "clock-conflict"


class CircularClockDependency(StreamlangError):
    error_class = "clock-cycle"


class FallibleOutput(StreamlangError):
    error_class = "fallible-output"

    def __init__(self, message: str, pos=None, node_id: int | None = None, path=()):
        super().__init__(message, pos)
        self.node_id = node_id
        self.path = tuple(path)


class ConfigError(StreamlangError):
    error_class = "config"


class ScriptRuntimeError(StreamlangError):
    error_class = "runtime"


class FormatError(StreamlangError):
    error_class = "format"


class SourceFailed(StreamlangError):
    """A source was asked to fill a frame while it had no data."""

    error_class = "source-failed"


class KindMismatch(AssertionError):
    """A frame reached a source whose content kind it does not match."""
