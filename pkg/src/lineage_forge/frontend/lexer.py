"""SQL tokenizer.

Produces a flat token list; keywords are not distinguished from identifiers
here (the parser matches them case-insensitively on demand, so quoted
identifiers that collide with keywords keep working).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, UnterminatedComment, UnterminatedString

TOKEN_IDENT = "ident"
TOKEN_QUOTED_IDENT = "quoted_ident"
TOKEN_NUMBER = "number"
TOKEN_STRING = "string"
TOKEN_OP = "op"
TOKEN_EOF = "eof"

# Multi-character operators, longest first so the scanner is greedy.
_OPERATORS = ("||", "<=", ">=", "<>", "!=", "=", "<", ">", "+", "-", "*", "/",
              "%", ",", ".", "(", ")", ";")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    position: int

    def is_kw(self, word: str) -> bool:
        """True when this token is the unquoted keyword word."""
        return self.kind == TOKEN_IDENT and self.value.upper() == word.upper()

    def is_op(self, symbol: str) -> bool:
        return self.kind == TOKEN_OP and self.value == symbol


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "-" and text.startswith("--", i):
            end = text.find("\n", i)
            i = n if end < 0 else end + 1
            continue
        if ch == "/" and text.startswith("/*", i):
            i = _skip_block_comment(text, i)
            continue
        if ch == "'":
            value, i2 = _scan_string(text, i)
            tokens.append(Token(TOKEN_STRING, value, i))
            i = i2
            continue
        if ch == '"':
            value, i2 = _scan_quoted_ident(text, i)
            tokens.append(Token(TOKEN_QUOTED_IDENT, value, i))
            i = i2
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            value, i2 = _scan_number(text, i)
            tokens.append(Token(TOKEN_NUMBER, value, i))
            i = i2
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token(TOKEN_IDENT, text[i:j], i))
            i = j
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token(TOKEN_OP, op, i))
                i += len(op)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(Token(TOKEN_EOF, "", n))
    return tokens


def _skip_block_comment(text: str, start: int) -> int:
    # Block comments nest, matching the splitter's behavior.
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


def _scan_string(text: str, start: int) -> tuple[str, int]:
    # '' inside a string is an escaped quote.
    parts: list[str] = []
    i = start + 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "'":
            if i + 1 < n and text[i + 1] == "'":
                parts.append("'")
                i += 2
                continue
            return "".join(parts), i + 1
        parts.append(ch)
        i += 1
    raise UnterminatedString("unterminated string literal", start)


def _scan_quoted_ident(text: str, start: int) -> tuple[str, int]:
    parts: list[str] = []
    i = start + 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == '"':
            if i + 1 < n and text[i + 1] == '"':
                parts.append('"')
                i += 2
                continue
            return "".join(parts), i + 1
        parts.append(ch)
        i += 1
    raise UnterminatedString("unterminated quoted identifier", start)


def _scan_number(text: str, start: int) -> tuple[str, int]:
    i = start
    n = len(text)
    seen_dot = False
    while i < n and (text[i].isdigit() or (text[i] == "." and not seen_dot)):
        if text[i] == ".":
            # A trailing dot followed by a letter is qualification, not a float.
            if i + 1 >= n or not text[i + 1].isdigit():
                break
            seen_dot = True
        i += 1
    return text[start:i], i
