"""Text formats for words and group presentations.

Word grammar (whitespace or ``*`` between factors is optional)::

    word    := factor*
    factor  := atom ('^' int)?
    atom    := name | '1' | '[' word ',' word ']' | '(' word ')'

``[u,v]`` expands to ``u v u^-1 v^-1``.  An equation line may be written
``u = v``, meaning ``u v^-1``.

Group files::

    backend: free | dehn
    gens: a b
    rel: [a,b]

Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from ..errors import AlphabetError, ParseError, PreconditionError
from .context import Backend, GroupContext, GroupPresentation
from .words import Letter, Word

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<int>-?\d+)
  | (?P<op>[\^\[\](),=*.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    column: int


def _tokenize(text: str, line: int | None, col0: int) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(), col0 + pos))
        pos = m.end()
    out.append(_Tok("end", "", col0 + len(text)))
    return out


class _WordParser:
    def __init__(self, text: str, alphabet: set[str] | None, line: int | None, col0: int):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.alphabet = alphabet
        self.line = line

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        t = self.take()
        if t.text != text:
            found = t.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.line, t.column)

    def error(self, msg: str, tok: _Tok) -> ParseError:
        return ParseError(msg, self.line, tok.column)

    def word(self, stop: tuple[str, ...]) -> Word:
        out = Word.identity()
        while True:
            t = self.peek()
            if t.kind == "end" or t.text in stop:
                return out
            if t.text in ("*", "."):
                self.take()
                continue
            out = out * self.factor()

    def factor(self) -> Word:
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            t = self.take()
            if t.kind != "int":
                raise self.error(f"expected an integer exponent, found {t.text or 'end of input'!r}", t)
            base = base ** int(t.text)
        return base

    def atom(self) -> Word:
        t = self.take()
        if t.kind == "name":
            if self.alphabet is not None and t.text not in self.alphabet:
                raise ParseError(f"unknown symbol {t.text!r}", self.line, t.column)
            return Word._raw((Letter(t.text, 1),))
        if t.kind == "int":
            if t.text != "1":
                raise self.error(f"unexpected number {t.text!r}", t)
            return Word.identity()
        if t.text == "[":
            u = self.word(stop=(",",))
            self.expect(",")
            v = self.word(stop=("]",))
            self.expect("]")
            return u * v * u.inverse() * v.inverse()
        if t.text == "(":
            u = self.word(stop=(")",))
            self.expect(")")
            return u
        raise self.error(f"unexpected {t.text or 'end of input'!r}", t)


def parse_word(
    text: str,
    alphabet: Iterable[str] | None = None,
    *,
    line: int | None = None,
    column: int = 1,
) -> Word:
    """Parse a word; ``u = v`` is accepted and yields ``u v^-1``."""
    alpha = set(alphabet) if alphabet is not None else None
    p = _WordParser(text, alpha, line, column)
    lhs = p.word(stop=("=",))
    if p.peek().text == "=":
        p.take()
        rhs = p.word(stop=())
        lhs = lhs * rhs.inverse()
    t = p.peek()
    if t.kind != "end":
        raise p.error(f"unexpected {t.text!r}", t)
    return lhs


def iter_directives(text: str) -> Iterator[tuple[int, str, str, int]]:
    """Yield ``(line, key, value, value_column)`` for each ``key: value`` line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if ":" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError("expected 'key: value'", lineno, col)
        key, value = body.split(":", 1)
        col = len(key) + 2 + (len(value) - len(value.lstrip()))
        yield lineno, key.strip().lower(), value.strip(), col


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


def parse_names(value: str, line: int, column: int) -> list[str]:
    names = value.split()
    for n in names:
        if not _NAME.match(n):
            raise ParseError(f"invalid symbol name {n!r}", line, column + value.find(n))
    if len(set(names)) != len(names):
        raise ParseError("duplicate symbol names", line, column)
    return names


def parse_group(text: str) -> GroupContext:
    backend = None
    gens: list[str] | None = None
    rels: list[tuple[int, str, int]] = []
    for line, key, value, col in iter_directives(text):
        if key == "backend":
            try:
                backend = Backend(value.lower())
            except ValueError:
                raise ParseError(f"unknown backend {value!r}", line, col) from None
        elif key == "gens":
            if gens is not None:
                raise ParseError("generators declared twice", line, col)
            gens = parse_names(value, line, col)
        elif key == "rel":
            rels.append((line, value, col))
        else:
            raise ParseError(f"unknown directive {key!r}", line, 1)
    if gens is None:
        raise ParseError("missing 'gens:' line")
    relators = [parse_word(v, gens, line=l, column=c) for l, v, c in rels]
    if backend is None:
        backend = Backend.DEHN if any(relators) else Backend.FREE
    try:
        return GroupContext(GroupPresentation(tuple(gens), tuple(relators)), backend)
    except (AlphabetError, PreconditionError) as exc:
        raise ParseError(str(exc)) from exc


def format_group(ctx: GroupContext) -> str:
    return ctx.presentation.to_text(ctx.backend.value)
