"""Immutability of finitely generated subgroups.

A subgroup ``H = <g_1, ..., g_n>`` is immutable when it has only finitely
many conjugacy classes of embeddings into the ambient group.  The checker
builds the ball group of ``H`` at growing radii (free on ``s_1..s_n``
modulo the loops of the Cayley ball), asks for the maps injective on the
ball, and certifies once the orbit-listing procedure proves its list
complete.  Non-immutability is never decided.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .certifiers.finite import FinitenessReport, check_finitely_many_orbits
from .eqsys import Assignment, EquationSystem, is_solution
from .errors import PreconditionError
from .group_core import (
    Backend,
    GroupContext,
    GroupPresentation,
    Word,
    cyclic_canonical,
    format_word,
    free_ball,
    letter_order,
    shortlex_key,
)
from .search import SearchBudget, as_budget, past, simultaneous_conjugacy

TREE = "tree"
EXHAUSTIVE = "exhaustive"
IMMUTABLE_BALL_K = 2


class _ElementIndex:
    """Lookup of group elements up to equality in ``ctx``."""

    def __init__(self, ctx: GroupContext):
        self.ctx = ctx
        self._exact: dict[Word, int] = {}
        self._buckets: dict[tuple, list[tuple[Word, int]]] = {}

    def find(self, w: Word) -> int | None:
        if self.ctx.backend is Backend.FREE:
            return self._exact.get(w)
        for other, idx in self._buckets.get(self.ctx.abelian_key(w), ()):
            if self.ctx.equal(w, other):
                return idx
        return None

    def add(self, w: Word, idx: int) -> None:
        if self.ctx.backend is Backend.FREE:
            self._exact[w] = idx
        else:
            self._buckets.setdefault(self.ctx.abelian_key(w), []).append((w, idx))


def canonical_generators(gens: Sequence[Word], ctx: GroupContext) -> tuple[Word, ...]:
    """Drop trivial and repeated elements and sort shortlex (set semantics)."""
    key = ctx.word_key
    kept: list[Word] = []
    index = _ElementIndex(ctx)
    for g in sorted(gens, key=key):
        if ctx.is_trivial(g) or index.find(g) is not None:
            continue
        index.add(g, len(kept))
        kept.append(g)
    return tuple(kept)


def symbol_names(n: int, avoid: Sequence[str]) -> tuple[str, ...]:
    for prefix in ("s", "y", "z"):
        names = tuple(f"{prefix}{i}" for i in range(1, n + 1))
        if not set(names) & set(avoid):
            return names
    names = tuple(f"s{i}_" for i in range(1, n + 1))
    if set(names) & set(avoid):
        raise PreconditionError("cannot choose symbols disjoint from the group generators")
    return names


@dataclass(frozen=True)
class BallGroup:
    """Free group on ``symbols`` modulo the loops seen in the radius-``D`` ball of ``H``.

    ``words[i]`` is the shortlex-first path to the ``i``-th ball element and
    ``elements[i]`` is its value in the ambient group.
    """

    generators: tuple[Word, ...]
    D: int
    presentation: GroupPresentation
    words: tuple[Word, ...]
    elements: tuple[Word, ...]
    edge_count: int
    loop_count: int
    """Edges outside the spanning tree, before relators are deduplicated."""
    mode: str = TREE
    dropped: tuple[Word, ...] = ()

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.presentation.generators

    @property
    def vertex_count(self) -> int:
        return len(self.words)

    def image(self, w: Word) -> Word:
        return w.substitute(dict(zip(self.symbols, self.generators)))


def ball_group(gens: Sequence[Word], D: int, ctx: GroupContext, mode: str = TREE) -> BallGroup:
    """Cayley ball of ``<gens>`` to radius ``D`` with its loop relators.

    Tree mode keeps one relator per edge outside a breadth-first spanning
    tree.  Exhaustive mode keeps every cyclically reduced word of length at
    most ``2D + 1`` that is trivial in the group, up to rotation and inversion.
    """
    if D < 0:
        raise ValueError("D must be non-negative")
    if mode not in (TREE, EXHAUSTIVE):
        raise ValueError(f"unknown mode {mode!r}")
    kept = [g for g in gens if not ctx.is_trivial(g)]
    dropped = tuple(g for g in gens if ctx.is_trivial(g))
    symbols = symbol_names(len(kept), ctx.generators)
    letters = letter_order(symbols)
    value_of = {s: g for s, g in zip(symbols, kept)}

    def value(letter) -> Word:
        v = value_of[letter.symbol]
        return v if letter.sign > 0 else v.inverse()

    words, elements, dist = [Word.identity()], [Word.identity()], [0]
    index = _ElementIndex(ctx)
    index.add(Word.identity(), 0)
    frontier = [0]
    for d in range(1, D + 1):
        nxt = []
        for i in frontier:
            for letter in letters:
                el = _normal(elements[i] * value(letter), ctx)
                if index.find(el) is not None:
                    continue
                idx = len(words)
                index.add(el, idx)
                words.append(words[i] * Word._raw((letter,)))
                elements.append(el)
                dist.append(d)
                nxt.append(idx)
        frontier = nxt

    # every edge of the ball graph, each undirected edge once
    edges = set()
    loops = []
    for i in range(len(words)):
        for letter in letters:
            j = index.find(_normal(elements[i] * value(letter), ctx))
            if j is None:
                continue
            back = (j, letter.symbol, -letter.sign, i)
            if back in edges:
                continue
            edges.add((i, letter.symbol, letter.sign, j))
            is_tree_edge = words[j] == words[i] * Word._raw((letter,)) and dist[j] == dist[i] + 1
            if not is_tree_edge:
                loops.append(words[i] * Word._raw((letter,)) * words[j].inverse())
    if mode == TREE:
        relators = loops
    else:
        relators = _exhaustive_loops(symbols, value_of, D, ctx)
    key = shortlex_key(symbols)
    seen, unique = set(), []
    for r in relators:
        c = cyclic_canonical(r, key)
        if c and c not in seen:
            seen.add(c)
            unique.append(c)
    unique.sort(key=key)
    return BallGroup(tuple(kept), D, GroupPresentation(symbols, tuple(unique)), tuple(words),
                     tuple(elements), len(edges), len(loops), mode, dropped)


def _normal(w: Word, ctx: GroupContext) -> Word:
    return w if ctx.backend is Backend.FREE else ctx.dehn_reduce(w)


def _exhaustive_loops(symbols, value_of, D, ctx) -> list[Word]:
    out = []
    for w in free_ball(symbols, 2 * D + 1):
        if not w or w.letters[0].symbol == w.letters[-1].symbol and w.letters[0].sign == -w.letters[-1].sign:
            continue
        if ctx.is_trivial(w.substitute(value_of)):
            out.append(w)
    return out


def injectivity_system(bg: BallGroup) -> EquationSystem:
    """Maps from the ball group that kill its relators and separate the ball's points."""
    key = shortlex_key(bg.symbols)
    seen, neqs = set(), []
    for u, v in itertools.combinations(bg.words, 2):
        c = cyclic_canonical(u * v.inverse(), key)
        if c not in seen:
            seen.add(c)
            neqs.append(c)
    neqs.sort(key=key)
    return EquationSystem(bg.symbols, None, bg.presentation.relators, tuple(neqs))


@dataclass
class ImmutabilityCertificate:
    generators: tuple[Word, ...]
    D: int
    ball: BallGroup | None
    system: EquationSystem | None
    report: FinitenessReport | None
    orbit_representatives: list[Assignment] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "generators": [format_word(g) for g in self.generators],
            "D": self.D,
            "ball_presentation": None if self.ball is None else {
                "generators": list(self.ball.symbols),
                "relators": [format_word(r) for r in self.ball.presentation.relators],
            },
            "verdict": "complete-by-oracle" if self.report is None else self.report.verdict.value,
            "reason": "trivial subgroup" if self.report is None else self.report.reason,
            "orbits": [a.to_json() for a in self.orbit_representatives],
        }

    def verify(self, ctx: GroupContext) -> bool:
        """Representatives solve the system and are pairwise non-conjugate; the verdict replays."""
        if self.system is None:
            return not self.generators
        if not all(is_solution(self.system, a, ctx) for a in self.orbit_representatives):
            return False
        for s, t in itertools.combinations(self.orbit_representatives, 2):
            if simultaneous_conjugacy(s.values, t.values, ctx) is not None:
                return False
        return True


def _immutable_budget(budget: SearchBudget) -> SearchBudget:
    return SearchBudget(min(budget.variable_radius, 2), budget.step_cap, min(budget.conjugator_radius, 2),
                        budget.rounds, budget.seconds, budget.family_size, budget.skip_budget)


def check_immutable(gens: Sequence[Word], ctx: GroupContext, budget=None, *, ball_k: int = IMMUTABLE_BALL_K,
                    mode: str = TREE, deadline: float | None = None) -> ImmutabilityCertificate | None:
    """Try radii ``D = 1 .. rounds``; certify when the orbit listing is proved complete."""
    budget = as_budget(budget)
    deadline = deadline if deadline is not None else budget.deadline()
    canon = canonical_generators(gens, ctx)
    if not canon:
        return ImmutabilityCertificate((), 0, None, None, None, [])
    inner = _immutable_budget(budget)
    for D in range(1, budget.rounds + 1):
        if past(deadline):
            return None
        bg = ball_group(canon, D, ctx, mode)
        sys = injectivity_system(bg)
        report = check_finitely_many_orbits(sys, ctx, budget=inner, ball_k=ball_k)
        if report.complete:
            return ImmutabilityCertificate(canon, D, bg, sys, report, list(report.items))
    return None


def enumerate_immutable(ctx: GroupContext, budget=None, *, max_size: int = 2,
                        ball_k: int = IMMUTABLE_BALL_K) -> Iterator[tuple[tuple[Word, ...], ImmutabilityCertificate]]:
    """Dovetail :func:`check_immutable` over finite subsets of the group.

    Stage ``n`` covers subsets of at most ``min(n, max_size)`` elements of
    length at most ``n``, each checked with ``n`` radii.  Each certified
    subset is emitted once, the empty set first.
    """
    budget = as_budget(budget)
    deadline = budget.deadline()
    emitted: set[tuple[Word, ...]] = set()
    empty = check_immutable((), ctx, budget)
    emitted.add(())
    yield (), empty
    key = ctx.word_key
    for stage in range(1, budget.rounds + 1):
        elements = [w for w in ctx.ball(stage) if w]
        stage_budget = SearchBudget(budget.variable_radius, budget.step_cap, budget.conjugator_radius, stage,
                                    None, budget.family_size, budget.skip_budget)
        for size in range(1, min(stage, max_size) + 1):
            for subset in itertools.combinations(elements, size):
                if past(deadline):
                    return
                canon = canonical_generators(subset, ctx)
                if canon in emitted or tuple(sorted(canon, key=key)) != canon:
                    continue
                cert = check_immutable(canon, ctx, stage_budget, ball_k=ball_k, deadline=deadline)
                if cert is not None:
                    emitted.add(canon)
                    yield canon, cert


__all__ = [
    "BallGroup",
    "EXHAUSTIVE",
    "ImmutabilityCertificate",
    "TREE",
    "ball_group",
    "canonical_generators",
    "check_immutable",
    "enumerate_immutable",
    "injectivity_system",
]
