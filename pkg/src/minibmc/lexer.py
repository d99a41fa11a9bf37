"""Tokenizer for MiniCxx source text."""

from __future__ import annotations

from dataclasses import dataclass, field

from minibmc.errors import LexError, SourceLocation

KEYWORDS = {
    "class", "struct", "public", "private", "protected",
    "virtual", "override", "const", "volatile",
    "template", "typename", "friend",
    "int", "bool", "char", "double", "float", "void",
    "if", "else", "while", "for", "return", "assert",
    "try", "catch", "throw", "new", "delete", "noexcept",
    "true", "false", "nullptr", "this",
}

# longest first so max-munch works; no >> token (nested template args)
PUNCTUATION = [
    "...", "::", "->", "++", "--", "&&", "||", "<=", ">=", "==", "!=",
    "+", "-", "*", "/", "%", "&", "|", "!", "<", ">", "=",
    "(", ")", "{", "}", "[", "]", ";", ",", ".", ":", "~",
]

INCLUDE_WHITELIST = {"cassert", "utility"}


@dataclass(frozen=True)
class Token:
    kind: str          # keyword text, punctuation text, "ident", "number", "charlit"
    text: str
    loc: SourceLocation = field(compare=False, default=SourceLocation())

    def __repr__(self) -> str:
        return f"Token({self.kind!r}, {self.text!r})"


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


class _Scanner:
    def __init__(self, source: str, filename: str):
        self.src = source
        self.file = filename
        self.pos = 0
        self.line = 1
        self.col = 1

    def loc(self) -> SourceLocation:
        return SourceLocation(self.file, self.line, self.col)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.src[i] if i < len(self.src) else ""

    def advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos >= len(self.src):
                return
            if self.src[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.src)


def lex(source: str, filename: str = "<input>") -> list[Token]:
    """Tokenize source; whitelisted #include lines produce no tokens."""
    s = _Scanner(source, filename)
    tokens: list[Token] = []

    while not s.at_end():
        c = s.peek()
        if c in " \t\r\n":
            s.advance()
            continue
        if c == "/" and s.peek(1) == "/":
            while not s.at_end() and s.peek() != "\n":
                s.advance()
            continue
        if c == "/" and s.peek(1) == "*":
            loc = s.loc()
            s.advance(2)
            while not s.at_end() and not (s.peek() == "*" and s.peek(1) == "/"):
                s.advance()
            if s.at_end():
                raise LexError("unterminated comment", loc)
            s.advance(2)
            continue
        if c == "#":
            _scan_directive(s)
            continue
        loc = s.loc()
        if c.isdigit():
            start = s.pos
            while s.peek().isdigit():
                s.advance()
            tokens.append(Token("number", s.src[start:s.pos], loc))
            continue
        if _is_ident_start(c):
            start = s.pos
            while _is_ident_char(s.peek()):
                s.advance()
            text = s.src[start:s.pos]
            kind = text if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, loc))
            continue
        if c == "'":
            tokens.append(_scan_char(s, loc))
            continue
        for p in PUNCTUATION:
            if s.src.startswith(p, s.pos):
                s.advance(len(p))
                tokens.append(Token(p, p, loc))
                break
        else:
            raise LexError(f"unknown character {c!r}", loc)

    return tokens


def _scan_char(s: _Scanner, loc: SourceLocation) -> Token:
    s.advance()  # opening quote
    if s.at_end():
        raise LexError("unterminated character literal", loc)
    c = s.peek()
    if c == "\\":
        s.advance()
        esc = s.peek()
        mapping = {"n": "\n", "t": "\t", "0": "\0", "\\": "\\", "'": "'"}
        if esc not in mapping:
            raise LexError(f"unknown escape \\{esc}", loc)
        c = mapping[esc]
    s.advance()
    if s.peek() != "'":
        raise LexError("unterminated character literal", loc)
    s.advance()
    return Token("charlit", c, loc)


def _scan_directive(s: _Scanner) -> None:
    """Handle a preprocessor line; only whitelisted includes are allowed."""
    loc = s.loc()
    start = s.pos
    while not s.at_end() and s.peek() != "\n":
        s.advance()
    text = s.src[start:s.pos].strip()
    body = text[1:].strip()
    if not body.startswith("include"):
        raise LexError(f"unsupported directive {text!r}", loc)
    rest = body[len("include"):].strip()
    if not (rest.startswith("<") and rest.endswith(">")):
        raise LexError("malformed #include", loc)
    header = rest[1:-1].strip()
    if header not in INCLUDE_WHITELIST:
        raise LexError(f"unsupported header <{header}>", loc)
    # whitelisted headers contribute nothing to the token stream
