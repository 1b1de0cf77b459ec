"""Errors raised by the statement splitter, lexer and parser."""

from __future__ import annotations


class ParseError(Exception):
    """Malformed input. position is a character offset into the source."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


class UnterminatedString(ParseError):
    pass


class UnterminatedComment(ParseError):
    pass


class UnsupportedStatement(ParseError):
    """Statement types outside the supported subset (INSERT, UPDATE, ...)."""
