"""Diagnostics raised by the front-end and verifier phases."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceLocation:
    """A 1-based position in an input file, optionally inside a function."""

    file: str = ""
    line: int = 1
    column: int = 1
    function: str = ""

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")

    def with_function(self, name: str) -> "SourceLocation":
        return SourceLocation(self.file, self.line, self.column, name)

    def __str__(self) -> str:
        text = f"{self.file}:{self.line}:{self.column}"
        if self.function:
            text += f" ({self.function})"
        return text


NO_LOC = SourceLocation("", 1, 1)


class MiniCxxError(Exception):
    """Base for all diagnostics with a source position."""

    def __init__(self, message: str, loc: SourceLocation = NO_LOC):
        super().__init__(message)
        self.message = message
        self.loc = loc

    def __str__(self) -> str:
        if self.loc.file:
            return f"{self.loc.file}:{self.loc.line}:{self.loc.column}: {self.message}"
        return self.message


class LexError(MiniCxxError):
    pass


class ParseError(MiniCxxError):
    pass


class TemplateError(MiniCxxError):
    pass


class TypeCheckError(MiniCxxError):
    pass


class InternalError(Exception):
    """Invariant violation inside the verifier itself; never user-caused."""
