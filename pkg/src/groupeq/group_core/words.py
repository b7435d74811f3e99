"""Letters and freely reduced words.

A :class:`Word` is an immutable, always freely reduced tuple of
:class:`Letter` values.  The empty word is the identity.
"""
from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple, Sequence

from ..errors import AlphabetError


class Letter(NamedTuple):
    symbol: str
    sign: int

    def inverse(self) -> "Letter":
        return Letter(self.symbol, -self.sign)

    def __str__(self) -> str:
        return self.symbol if self.sign > 0 else f"{self.symbol}^-1"


def _reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for let in letters:
        if out and out[-1].symbol == let.symbol and out[-1].sign == -let.sign:
            out.pop()
        else:
            out.append(let)
    return tuple(out)


class Word:
    """A freely reduced word.  Construction always reduces its input."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[Letter] = ()):
        self.letters: tuple[Letter, ...] = _reduce(
            l if isinstance(l, Letter) else Letter(*l) for l in letters
        )
        self._hash = hash(self.letters)

    @classmethod
    def _raw(cls, letters: tuple[Letter, ...]) -> "Word":
        # caller guarantees ``letters`` is already reduced
        w = cls.__new__(cls)
        w.letters = letters
        w._hash = hash(letters)
        return w

    @classmethod
    def gen(cls, symbol: str, power: int = 1) -> "Word":
        sign = 1 if power > 0 else -1
        return cls._raw((Letter(symbol, sign),) * abs(power))

    @classmethod
    def identity(cls) -> "Word":
        return _IDENTITY

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word._raw(self.letters[item])
        return self.letters[item]

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return self._hash

    def __mul__(self, other: "Word") -> "Word":
        a, b = self.letters, other.letters
        i = 0
        n = min(len(a), len(b))
        while i < n and a[-1 - i].symbol == b[i].symbol and a[-1 - i].sign == -b[i].sign:
            i += 1
        return Word._raw(a[: len(a) - i] + b[i:])

    def inverse(self) -> "Word":
        return Word._raw(tuple(l.inverse() for l in reversed(self.letters)))

    def __invert__(self) -> "Word":
        return self.inverse()

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        out = _IDENTITY
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self, g: "Word") -> "Word":
        """Return ``g * self * g^-1``."""
        return g * self * g.inverse()

    def symbols(self) -> set[str]:
        return {l.symbol for l in self.letters}

    def exponent_sum(self, symbol: str) -> int:
        return sum(l.sign for l in self.letters if l.symbol == symbol)

    def occurrences(self, symbol: str) -> int:
        return sum(1 for l in self.letters if l.symbol == symbol)

    def substitute(self, images: dict[str, "Word"]) -> "Word":
        """Apply the homomorphism sending each symbol in ``images`` to its image.

        Symbols not in ``images`` are kept verbatim.
        """
        out: list[Letter] = []
        for let in self.letters:
            img = images.get(let.symbol)
            if img is None:
                seq: Sequence[Letter] = (let,)
            elif let.sign > 0:
                seq = img.letters
            else:
                seq = img.inverse().letters
            for l in seq:
                if out and out[-1].symbol == l.symbol and out[-1].sign == -l.sign:
                    out.pop()
                else:
                    out.append(l)
        return Word._raw(tuple(out))

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    def __str__(self) -> str:
        return format_word(self)


_IDENTITY = Word._raw(())


def format_word(w: Word) -> str:
    """Render ``w`` in the text grammar, compressing runs into powers."""
    if not w.letters:
        return "1"
    parts: list[str] = []
    letters = w.letters
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        run = (j - i) * letters[i].sign
        sym = letters[i].symbol
        parts.append(sym if run == 1 else f"{sym}^{run}")
        i = j
    return " ".join(parts)


def free_reduce(letters: Iterable, alphabet: Iterable[str] | None = None) -> Word:
    """Freely reduce a raw letter sequence.

    Items may be :class:`Letter` or ``(symbol, sign)`` pairs.  When an
    ``alphabet`` is given every symbol must belong to it.
    """
    seq = [l if isinstance(l, Letter) else Letter(*l) for l in letters]
    for l in seq:
        if l.sign not in (1, -1):
            raise ValueError(f"letter sign must be +1 or -1, got {l.sign}")
    if alphabet is not None:
        allowed = set(alphabet)
        for l in seq:
            if l.symbol not in allowed:
                raise AlphabetError(f"unknown symbol {l.symbol!r}")
    return Word(seq)


def word(*parts) -> Word:
    """Convenience builder: ``word("a", ("b", -1), ("a", 2))``.

    Each part is a symbol (power 1) or a ``(symbol, power)`` pair.
    """
    out = Word.identity()
    for p in parts:
        if isinstance(p, Word):
            out = out * p
        elif isinstance(p, str):
            out = out * Word.gen(p)
        else:
            sym, power = p
            out = out * Word.gen(sym, power)
    return out


def commutator(u: Word, v: Word) -> Word:
    return u * v * u.inverse() * v.inverse()


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w = conjugator * core * conjugator^-1`` with ``core`` cyclically reduced."""
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i].symbol == letters[j].symbol and letters[i].sign == -letters[j].sign:
        i += 1
        j -= 1
    return Word._raw(letters[i : j + 1]), Word._raw(letters[:i])


def is_cyclically_reduced(w: Word) -> bool:
    l = w.letters
    return len(l) < 2 or not (l[0].symbol == l[-1].symbol and l[0].sign == -l[-1].sign)


def rotations(w: Word) -> Iterator[tuple[int, Word]]:
    """Yield ``(k, rotation)`` for the cyclic rotations of a cyclically reduced word."""
    l = w.letters
    for k in range(max(len(l), 1)):
        yield k, Word._raw(l[k:] + l[:k])


def primitive_root(w: Word) -> tuple[Word, int]:
    """For cyclically reduced ``w`` return ``(r, m)`` with ``w = r^m`` and ``r`` not a proper power."""
    n = len(w)
    if n == 0:
        return w, 1
    l = w.letters
    for d in range(1, n + 1):
        if n % d == 0 and l[:d] * (n // d) == l:
            return Word._raw(l[:d]), n // d
    raise AssertionError("unreachable")


def cyclic_canonical(w: Word, key) -> Word:
    """Least cyclic rotation of ``w`` or ``w^-1`` under ``key`` (after cyclic reduction)."""
    core, _ = cyclic_reduce(w)
    best = None
    for cand in (core, core.inverse()):
        for _, rot in rotations(cand):
            if best is None or key(rot) < key(best):
                best = rot
    return best if best is not None else core
