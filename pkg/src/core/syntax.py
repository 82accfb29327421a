"""
Scanner for the key=value text formats (model files, quench schedules).

    N=3 L=3 lyubashenko=(0 1 2)
    family={ g0=(0 2) (1) g1=() f0="(0 2)" }
    step twist=(0 1) mode=duration t=2.5

Values are bare words, quoted strings, permutation literals in cycle or
image notation, or nested {...} blocks. '#' starts a comment. Every field
remembers where it came from so semantic errors can point back at the text.
"""

import re
from dataclasses import dataclass

from src.core.exceptions import ParseError

_KEY = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")
_BARE_STOP = set(" \t\r\n{}#")


@dataclass
class Field:
    key: str
    value: "str | list[Field] | None"
    line: int
    column: int
    value_line: int = 0
    value_column: int = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.value_line or self.line, self.value_column or self.column)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.column)

    def skip_space(self) -> None:
        while self.pos < len(self.text):
            ch = self.peek()
            if ch == "#":
                while self.peek() not in ("", "\n"):
                    self.advance()
            elif ch.isspace():
                self.advance()
            else:
                return

    def _blank_then(self, ch: str) -> bool:
        """True when ``ch`` follows the current position after spaces or tabs only."""
        pos = self.pos
        while pos < len(self.text) and self.text[pos] in " \t":
            pos += 1
        return self.text[pos:pos + 1] == ch

    def read_until(self, closing: str) -> str:
        start_line, start_column = self.line, self.column
        out = []
        while True:
            ch = self.peek()
            if ch in ("", "\n"):
                raise ParseError(f"missing '{closing}'", start_line, start_column)
            out.append(self.advance())
            if ch == closing:
                return "".join(out)

    def read_value(self) -> str:
        ch = self.peek()
        if ch == '"':
            self.advance()
            return self.read_until('"')[:-1]
        if ch == "[":
            return self.read_until("]")
        if ch == "(":
            parts = [self.read_until(")")]
            while self._blank_then("("):
                while self.peek() in (" ", "\t"):
                    self.advance()
                parts.append(self.read_until(")"))
            return "".join(parts)
        out = []
        while self.peek() and self.peek() not in _BARE_STOP:
            out.append(self.advance())
        if not out:
            raise self.error("missing value")
        return "".join(out)

    def read_block(self, closing: str | None) -> list[Field]:
        fields: list[Field] = []
        while True:
            self.skip_space()
            ch = self.peek()
            if ch == "":
                if closing:
                    raise self.error(f"missing '{closing}' at end of input")
                return fields
            if ch == closing:
                self.advance()
                return fields
            match = _KEY.match(self.text, self.pos)
            if not match:
                raise self.error(f"unexpected character {ch!r}")
            line, column = self.line, self.column
            for _ in match.group(0):
                self.advance()
            key = match.group(0)
            if self.peek() not in ("=", ":"):
                fields.append(Field(key=key, value=None, line=line, column=column))
                continue
            self.advance()
            value_line, value_column = self.line, self.column
            if self.peek() == "{":
                self.advance()
                value = self.read_block("}")
            else:
                value = self.read_value()
            fields.append(Field(key, value, line, column, value_line, value_column))


def parse_fields(text: str) -> list[Field]:
    """All top-level fields of ``text``, in order."""
    return _Scanner(text).read_block(None)


def fields_by_line(fields: list[Field]) -> list[list[Field]]:
    """Group top-level fields by the line their key starts on."""
    lines: dict[int, list[Field]] = {}
    for f in fields:
        lines.setdefault(f.line, []).append(f)
    return [lines[k] for k in sorted(lines)]
