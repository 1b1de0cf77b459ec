"""Split a SQL script into statements on top-level semicolons.

Semicolons inside string literals, quoted identifiers and comments do not
terminate a statement. Statements that contain only whitespace and comments
are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnterminatedComment, UnterminatedString


@dataclass(frozen=True)
class RawStatement:
    text: str
    offset: int


def split_script(script: str) -> list[RawStatement]:
    statements: list[RawStatement] = []
    start = 0
    i = 0
    n = len(script)
    while i < n:
        ch = script[i]
        if ch == "'":
            i = _skip_delimited(script, i, "'", UnterminatedString("unterminated string literal", i))
        elif ch == '"':
            i = _skip_delimited(script, i, '"', UnterminatedString("unterminated quoted identifier", i))
        elif ch == "-" and script.startswith("--", i):
            end = script.find("\n", i)
            i = n if end < 0 else end + 1
        elif ch == "/" and script.startswith("/*", i):
            i = _skip_block(script, i)
        elif ch == ";":
            _append(statements, script[start:i], start)
            i += 1
            start = i
        else:
            i += 1
    _append(statements, script[start:], start)
    return statements


def _append(statements: list[RawStatement], text: str, offset: int) -> None:
    if _has_content(text):
        statements.append(RawStatement(text, offset))


def _has_content(text: str) -> bool:
    """True when text holds anything besides whitespace and comments."""
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == "-" and text.startswith("--", i):
            end = text.find("\n", i)
            i = n if end < 0 else end + 1
        elif ch == "/" and text.startswith("/*", i):
            try:
                i = _skip_block(text, i)
            except UnterminatedComment:
                return True
        else:
            return True
    return False


def _skip_delimited(text: str, start: int, quote: str, error: Exception) -> int:
    i = start + 1
    n = len(text)
    while i < n:
        if text[i] == quote:
            if i + 1 < n and text[i + 1] == quote:
                i += 2
                continue
            return i + 1
        i += 1
    raise error


def _skip_block(text: str, start: int) -> int:
    depth = 1
    i = start + 2
    n = len(text)
    while i < n:
        if text.startswith("/*", i):
            depth += 1
            i += 2
        elif text.startswith("*/", i):
            depth -= 1
            i += 2
            if depth == 0:
                return i
        else:
            i += 1
    raise UnterminatedComment("unterminated block comment", start)
