"""Group presentations and the two word-problem backends.

``Backend.FREE`` is a free group (no relators) and every decision is exact.
``Backend.DEHN`` runs Dehn's algorithm over the symmetrized relators; the
word problem is exact provided the presentation really is a Dehn
presentation (the caller's responsibility), while conjugacy questions are
answered by bounded search and may come back undecided.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

from ..errors import AlphabetError, PreconditionError, ResourceLimitError
from .snf import LatticeQuotient
from .words import (
    Letter,
    Word,
    cyclic_reduce,
    format_word,
    primitive_root,
    rotations,
)

DEFAULT_BALL_CAP = 200_000


class _Undecided:
    """Third truth value for bounded decision procedures."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDECIDED"

    def __bool__(self):
        raise TypeError("UNDECIDED has no truth value; compare with `is UNDECIDED`")

    def __reduce__(self):
        return (_Undecided, ())


UNDECIDED = _Undecided()


class Backend(str, enum.Enum):
    FREE = "free"
    DEHN = "dehn"


def letter_order(generators: Sequence[str]) -> list[Letter]:
    """Letters in normal-form order: each generator followed by its inverse."""
    out = []
    for g in generators:
        out.append(Letter(g, 1))
        out.append(Letter(g, -1))
    return out


def shortlex_key(generators: Sequence[str]) -> Callable[[Word], tuple]:
    rank = {l: i for i, l in enumerate(letter_order(generators))}

    def key(w: Word) -> tuple:
        return (len(w), tuple(rank[l] for l in w.letters))

    return key


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise AlphabetError(f"duplicate generators in {gens}")
        allowed = set(gens)
        rels = []
        for r in self.relators:
            bad = r.symbols() - allowed
            if bad:
                raise AlphabetError(f"relator {r} uses unknown symbols {sorted(bad)}")
            core, _ = cyclic_reduce(r)
            if core:
                rels.append(core)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", tuple(rels))

    def exponent_matrix(self, generators: Sequence[str] | None = None) -> list[list[int]]:
        gens = self.generators if generators is None else generators
        return [[r.exponent_sum(g) for g in gens] for r in self.relators]

    def to_text(self, backend: str | None = None) -> str:
        lines = []
        if backend is not None:
            lines.append(f"backend: {backend}")
        lines.append("gens: " + " ".join(self.generators))
        lines.extend(f"rel: {format_word(r)}" for r in self.relators)
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        rels = ", ".join(format_word(r) for r in self.relators)
        return f"<{', '.join(self.generators)} | {rels}>"


def symmetrize(relators: Iterable[Word]) -> tuple[Word, ...]:
    """All cyclic rotations of each relator and of its inverse, deduplicated."""
    seen: dict[Word, None] = {}
    for r in relators:
        core, _ = cyclic_reduce(r)
        for cand in (core, core.inverse()):
            for _, rot in rotations(cand):
                if rot:
                    seen.setdefault(rot)
    return tuple(seen)


@dataclass(frozen=True)
class GroupContext:
    presentation: GroupPresentation
    backend: Backend = Backend.FREE
    ball_cap: int = DEFAULT_BALL_CAP
    symmetrized: tuple[Word, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        backend = Backend(self.backend)
        object.__setattr__(self, "backend", backend)
        if backend is Backend.FREE and self.presentation.relators:
            raise PreconditionError("the free backend requires an empty relator list")
        object.__setattr__(self, "symmetrized", symmetrize(self.presentation.relators))

    @classmethod
    def free(cls, *generators: str) -> "GroupContext":
        return cls(GroupPresentation(tuple(generators)), Backend.FREE)

    @classmethod
    def dehn(cls, generators: Sequence[str], relators: Sequence[Word]) -> "GroupContext":
        return cls(GroupPresentation(tuple(generators), tuple(relators)), Backend.DEHN)

    @property
    def generators(self) -> tuple[str, ...]:
        return self.presentation.generators

    @property
    def exact(self) -> bool:
        return self.backend is Backend.FREE

    @cached_property
    def letters(self) -> list[Letter]:
        return letter_order(self.generators)

    @cached_property
    def word_key(self) -> Callable[[Word], tuple]:
        return shortlex_key(self.generators)

    def check_word(self, w: Word) -> None:
        bad = w.symbols() - set(self.generators)
        if bad:
            raise AlphabetError(f"word {w} uses symbols {sorted(bad)} outside the group alphabet")

    # -- word problem -------------------------------------------------------

    @cached_property
    def _dehn_index(self) -> dict[Letter, list[tuple[tuple[Letter, ...], Word]]]:
        index: dict[Letter, list[tuple[tuple[Letter, ...], Word]]] = {}
        for s in self.symmetrized:
            L = len(s)
            for p in range(L, L // 2, -1):
                u = s.letters[:p]
                repl = Word._raw(s.letters[p:]).inverse()
                index.setdefault(u[0], []).append((u, repl))
        for entries in index.values():
            entries.sort(key=lambda e: -len(e[0]))
        return index

    def dehn_reduce(self, w: Word) -> Word:
        """Greedy Dehn's algorithm: shorten by replacing long relator pieces."""
        index = self._dehn_index
        if not index:
            return w
        changed = True
        while changed and w:
            changed = False
            l = w.letters
            for i in range(len(l)):
                for u, repl in index.get(l[i], ()):
                    if i + len(u) <= len(l) and l[i : i + len(u)] == u:
                        w = Word._raw(l[:i]) * repl * Word._raw(l[i + len(u) :])
                        changed = True
                        break
                if changed:
                    break
        return w

    def is_trivial(self, w: Word) -> bool:
        if self.backend is Backend.FREE:
            return not w
        return not self.dehn_reduce(w)

    def equal(self, u: Word, v: Word) -> bool:
        return self.is_trivial(u * v.inverse())

    def commute(self, u: Word, v: Word) -> bool:
        return self.is_trivial(u * v * u.inverse() * v.inverse())

    # -- abelianization -------------------------------------------------------

    @cached_property
    def abelianization(self) -> LatticeQuotient:
        return LatticeQuotient(self.presentation.exponent_matrix(), len(self.generators))

    def abelian_key(self, w: Word) -> tuple[int, ...]:
        return self.abelianization.key([w.exponent_sum(g) for g in self.generators])

    # -- balls ------------------------------------------------------------------

    def ball_size_free(self, r: int) -> int:
        k = len(self.generators)
        if k == 0:
            return 1
        return 1 + sum(2 * k * (2 * k - 1) ** (i - 1) for i in range(1, r + 1))

    def ball(self, r: int, cap: int | None = None) -> list[Word]:
        """Shortlex-ordered normal forms of all elements of length at most ``r``."""
        if r < 0:
            raise ValueError("radius must be non-negative")
        cap = self.ball_cap if cap is None else cap
        if self.backend is Backend.FREE:
            size = self.ball_size_free(r)
            if size > cap:
                raise ResourceLimitError(f"ball of radius {r} has {size} elements (cap {cap})")
            return free_ball(self.generators, r)
        return self._dehn_ball(r, cap)

    def _dehn_ball(self, r: int, cap: int) -> list[Word]:
        kept: list[Word] = [Word.identity()]
        buckets: dict[tuple, list[Word]] = {self.abelian_key(Word.identity()): [Word.identity()]}
        layer = [Word.identity()]
        for L in range(1, r + 1):
            nxt: list[Word] = []
            for w in layer:
                for x in self.letters:
                    if w and w.letters[-1] == x.inverse():
                        continue
                    cand = Word._raw(w.letters + (x,))
                    if len(self.dehn_reduce(cand)) < L:
                        continue
                    key = self.abelian_key(cand)
                    bucket = buckets.setdefault(key, [])
                    if any(self.is_trivial(cand * k.inverse()) for k in bucket):
                        continue
                    bucket.append(cand)
                    nxt.append(cand)
                    kept.append(cand)
                    if len(kept) > cap:
                        raise ResourceLimitError(f"ball of radius {r} exceeds cap {cap}")
            layer = nxt
        return kept

    # -- conjugacy ----------------------------------------------------------------

    def are_conjugate(self, u: Word, v: Word, budget=4):
        """Return ``g`` with ``g u g^-1 = v``, ``None`` if provably not conjugate,
        or ``UNDECIDED`` (Dehn backend only)."""
        if self.backend is Backend.FREE:
            return free_conjugator(u, v)
        radius = getattr(budget, "conjugator_radius", budget)
        if self.abelian_key(u) != self.abelian_key(v):
            return None
        if self.is_trivial(u) or self.is_trivial(v):
            return Word.identity() if self.is_trivial(u) and self.is_trivial(v) else None
        cu, pu = cyclic_reduce(u)
        cv, pv = cyclic_reduce(v)
        g = free_conjugator(cu, cv)
        if g is not None:
            return pv * g * pu.inverse()
        for g in self.ball(radius):
            if self.equal(g * u * g.inverse(), v):
                return g
        return UNDECIDED


def free_ball(generators: Sequence[str], r: int) -> list[Word]:
    letters = letter_order(generators)
    out = [Word.identity()]
    layer = [Word.identity()]
    for _ in range(r):
        nxt = []
        for w in layer:
            last = w.letters[-1] if w.letters else None
            for x in letters:
                if last is not None and last.symbol == x.symbol and last.sign == -x.sign:
                    continue
                nxt.append(Word._raw(w.letters + (x,)))
        out.extend(nxt)
        layer = nxt
    return out


def free_conjugator(u: Word, v: Word) -> Word | None:
    """Exact conjugacy in a free group: ``g`` with ``g u g^-1 = v`` or ``None``."""
    cu, pu = cyclic_reduce(u)
    cv, pv = cyclic_reduce(v)
    if len(cu) != len(cv):
        return None
    if not cu:
        return pv * pu.inverse()
    for k, rot in rotations(cu):
        if rot == cv:
            # cu = p q, rot = q p = p^-1 cu p
            p = Word._raw(cu.letters[:k])
            return pv * p.inverse() * pu.inverse()
    return None


def free_centralizer_root(u: Word) -> Word:
    """Generator of the (cyclic) centralizer of a non-trivial ``u`` in a free group."""
    core, conj = cyclic_reduce(u)
    root, _ = primitive_root(core)
    return conj * root * conj.inverse()
