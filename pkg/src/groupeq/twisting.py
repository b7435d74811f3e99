"""Twist automorphisms of exhibited splittings and the solution families they generate."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .eqsys import Assignment, EquationSystem, is_solution
from .errors import GroupEqError, PreconditionError
from .group_core import UNDECIDED, GroupContext, GroupPresentation, Word, commutator, format_word
from .search import simultaneous_conjugacy
from .splittings import SplitKind, SplittingShape, is_visibly_abelian


class TwistKind(str, enum.Enum):
    PARTIAL_CONJUGATION = "partial-conjugation"
    DEHN_TWIST = "dehn-twist"
    GENERALIZED_DEHN_TWIST = "generalized-dehn-twist"
    HNN_DEHN_TWIST = "hnn-dehn-twist"


@dataclass(frozen=True)
class TwistAutomorphism:
    kind: TwistKind
    action: dict = field(hash=False)
    """Images of the generators it moves; every other generator is fixed."""
    parameter: Word = Word.identity()
    moved_vertex: int | None = None
    stable_or_t: str | None = None

    def image(self, g: str) -> Word:
        return self.action.get(g, Word.gen(g))

    def apply(self, w: Word) -> Word:
        return w.substitute(self.action)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "action": {g: format_word(w) for g, w in sorted(self.action.items())},
        }


class FamilyError(GroupEqError):
    """The skip budget ran out before enough family members passed."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise PreconditionError(msg)


def make_twist(s: SplittingShape, kind: TwistKind | str, *, anchor: Word | None = None,
               vertex: int | None = None, t: str | None = None) -> TwistAutomorphism:
    """Build a twist of the given kind.

    ``anchor`` is the conjugating element of a partial conjugation;
    ``vertex`` picks the moved vertex (Dehn twist) or the abelian vertex
    (generalized twist); ``t`` is the generator a generalized twist moves.
    """
    kind = TwistKind(kind)
    if kind is TwistKind.PARTIAL_CONJUGATION:
        _require(s.kind is SplitKind.FREE_PRODUCT, "partial conjugation needs a free splitting")
        _require(anchor is not None and bool(anchor), "partial conjugation needs a non-trivial anchor")
        sides = {s.vertex_of(l.symbol) for l in anchor.letters}
        _require(len(sides) == 1 and None not in sides, "anchor must lie in one vertex")
        home = sides.pop()
        moved = 1 - home
        action = {g: anchor * Word.gen(g) * anchor.inverse() for g in s.vertices[moved].generators}
        return TwistAutomorphism(kind, action, anchor, moved)
    if kind is TwistKind.DEHN_TWIST:
        _require(s.kind is SplitKind.CYCLIC_AMALGAM, "a Dehn twist needs a cyclic amalgam")
        moved = 1 if vertex is None else vertex
        e = s.edge_element()
        action = {g: e * Word.gen(g) * e.inverse() for g in s.vertices[moved].generators}
        return TwistAutomorphism(kind, action, e, moved)
    if kind is TwistKind.GENERALIZED_DEHN_TWIST:
        _require(s.kind is SplitKind.CYCLIC_AMALGAM, "a generalized Dehn twist needs a cyclic amalgam")
        _require(vertex is not None and t is not None, "choose the abelian vertex and the generator t")
        v = s.vertices[vertex]
        _require(is_visibly_abelian(v), "the twisted vertex must be visibly abelian")
        _require(t in v.generators, f"{t} is not a generator of vertex {vertex}")
        e = s.edge_word_in(vertex)
        _require(direct_summand_ok(v, e, t), f"{t} does not split off a direct summand avoiding the edge")
        return TwistAutomorphism(kind, {t: Word.gen(t) * e}, e, vertex, t)
    _require(s.kind is SplitKind.CYCLIC_HNN, "an HNN twist needs a cyclic HNN splitting")
    u = s.edge_words[0]
    t_sym = s.stable_letter
    return TwistAutomorphism(kind, {t_sym: Word.gen(t_sym) * u}, u, None, t_sym)


def direct_summand_ok(v: GroupPresentation, edge: Word, t: str) -> bool:
    """``v = v0 + <t>`` with the edge in ``v0``: ``t`` has zero exponent sum in the
    edge word and in every relator other than a generator commutator."""
    if edge.exponent_sum(t) != 0:
        return False
    comms = set()
    for a, b in itertools.combinations(v.generators, 2):
        c = commutator(Word.gen(a), Word.gen(b))
        comms.add(c)
        comms.add(c.inverse())
    for r in v.relators:
        if r.exponent_sum(t) != 0 and not _is_commutator_rotation(r, comms):
            return False
    return True


def _is_commutator_rotation(r: Word, comms: set) -> bool:
    l = r.letters
    return any(Word._raw(l[k:] + l[:k]) in comms for k in range(len(l)))


def generalized_twist_choices(s: SplittingShape, vertex: int, fixed: Sequence[str] = ()) -> list[str]:
    v = s.vertices[vertex]
    if not is_visibly_abelian(v):
        return []
    e = s.edge_word_in(vertex)
    return [t for t in v.generators if t not in fixed and direct_summand_ok(v, e, t)]


# -- families ------------------------------------------------------------------------


def compose(h: Assignment, tau: TwistAutomorphism) -> Assignment:
    """``h o tau`` on the generators listed in ``h`` (other letters evaluate to themselves)."""
    images = h.as_dict()
    return Assignment(h.variables, tuple(tau.image(g).substitute(images) for g in h.variables))


def power_member(h: Assignment, generators: Sequence[str], n: int) -> Assignment:
    gs = set(generators)
    return Assignment(h.variables, tuple(v ** n if x in gs else v for x, v in zip(h.variables, h.values)))


def twist_iterates(h: Assignment, tau: TwistAutomorphism, n_max: int) -> list[Assignment]:
    """``[h o tau^1, ..., h o tau^n_max]``."""
    out = []
    cur = h
    for _ in range(n_max):
        cur = compose(cur, tau)
        out.append(cur)
    return out


def twist_power_family(h: Assignment, tau: TwistAutomorphism, sys: EquationSystem, ctx: GroupContext,
                       count: int, skip_budget: int = 32) -> list[Assignment]:
    """The first ``count`` maps ``h o tau^n`` (n = 1, 2, ...) that solve ``sys``."""
    return [m for _, m in twist_power_family_indexed(h, tau, sys, ctx, count, skip_budget)]


def twist_power_family_indexed(h, tau, sys, ctx, count, skip_budget=32) -> list[tuple[int, Assignment]]:
    out: list[tuple[int, Assignment]] = []
    skipped = 0
    cur = h
    n = 0
    while len(out) < count:
        n += 1
        cur = compose(cur, tau)
        if is_solution(sys, cur, ctx):
            out.append((n, cur))
        else:
            skipped += 1
            if skipped > skip_budget:
                raise FamilyError(f"skip budget {skip_budget} exhausted after {len(out)} members")
    return out


def power_family_indexed(h: Assignment, generators: Sequence[str], sys: EquationSystem, ctx: GroupContext,
                         count: int, skip_budget: int = 32) -> list[tuple[int, Assignment]]:
    """Members ``g -> h(g)^n`` on ``generators`` (n = 1, 2, ...) that solve ``sys``.

    Valid as homomorphisms when the moved generators span an abelian free
    factor (or the whole group is abelian)."""
    out = []
    skipped = 0
    n = 0
    while len(out) < count:
        n += 1
        m = power_member(h, generators, n)
        if is_solution(sys, m, ctx):
            out.append((n, m))
        else:
            skipped += 1
            if skipped > skip_budget:
                raise FamilyError(f"skip budget {skip_budget} exhausted after {len(out)} members")
    return out


def pairwise_nonconjugate(fam: Sequence[Assignment], ctx: GroupContext, budget=None):
    """``True``, ``False`` or ``UNDECIDED``."""
    undecided = False
    for s, t in itertools.combinations(fam, 2):
        g = simultaneous_conjugacy(s.values, t.values, ctx, budget)
        if g is UNDECIDED:
            undecided = True
        elif g is not None:
            return False
    return UNDECIDED if undecided else True


def baumslag_word(a_list: Sequence[Word], z: Word, m_list: Sequence[int], ctx: GroupContext | None = None) -> Word:
    """``a_1 z^m_1 ... a_n z^m_n``; every ``a_i`` must fail to commute with ``z``."""
    if len(a_list) != len(m_list):
        raise PreconditionError("a_list and m_list differ in length")
    for a in a_list:
        c = commutator(a, z)
        trivial = ctx.is_trivial(c) if ctx is not None else not c
        if trivial:
            raise PreconditionError(f"{a} commutes with {z}")
    out = Word.identity()
    for a, m in zip(a_list, m_list):
        out = out * a * z ** m
    return out
