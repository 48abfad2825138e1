"""Exception hierarchy shared by every attrsel module."""

from __future__ import annotations


class AttrSelError(Exception):
    """Base class for all errors raised by attrsel."""


class ParseError(AttrSelError, ValueError):
    """Malformed ARFF/CSV input.

    ``line`` is 1-based and refers to the physical line of the source;
    ``token`` is the offending text when one can be singled out.
    """

    def __init__(self, message: str, line: int | None = None, token: str | None = None):
        self.line = line
        self.token = token
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if token is not None:
            parts.append(f"token {token!r}")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class SchemaError(AttrSelError, ValueError):
    """Input parses but cannot be analysed as requested (bad target, arity, ...)."""


class EmptyAnalysisError(SchemaError):
    """No attributes (or rows) left to analyse."""


class ConvergenceError(AttrSelError, ArithmeticError):
    """An iterative numerical routine exhausted its budget."""
