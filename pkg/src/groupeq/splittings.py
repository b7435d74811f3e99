"""Exhibited splittings, witness systems and proof-carrying quotient maps.

A presentation *exhibits* a splitting when its relators visibly separate:

* free product: the generators fall into two blocks and every relator
  lives in one block;
* cyclic amalgam: either an edge generator ``c`` with exactly two
  defining relators ``c = w_A``, ``c = w_B``, or a single gluing relator
  ``w_A w_B^-1`` once everything else separates;
* cyclic HNN: a stable letter ``t`` occurring only in one relator
  ``t u t^-1 v^-1``.

Detection uses connected components of the "shares a relator" relation,
so it is polynomial and needs no bipartition search.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .eqsys import EquationSystem, presentation_of_H
from .errors import ContradictionError, PreconditionError
from .group_core import (
    GroupContext,
    GroupPresentation,
    Letter,
    Word,
    commutator,
    cyclic_canonical,
    cyclic_reduce,
    rotations,
    shortlex_key,
    smith_normal_form,
)


class SplitKind(str, enum.Enum):
    FREE_PRODUCT = "free-product"
    CYCLIC_AMALGAM = "cyclic-amalgam"
    CYCLIC_HNN = "cyclic-hnn"


@dataclass(frozen=True)
class SplittingShape:
    kind: SplitKind
    vertices: tuple[GroupPresentation, ...]
    edge_words: tuple[Word, Word] | None = None
    edge_generator: str | None = None
    stable_letter: str | None = None
    coefficient_vertex: int | None = None
    glue: tuple[Word, ...] = ()
    """Relators of the whole presentation that are not vertex relators."""

    def vertex_of(self, symbol: str) -> int | None:
        for i, v in enumerate(self.vertices):
            if symbol in v.generators:
                return i
        return None

    def edge_element(self) -> Word | None:
        """A word for the edge group generator (``c`` itself, or ``w_A``/``u``)."""
        if self.kind is SplitKind.FREE_PRODUCT:
            return None
        if self.edge_generator is not None:
            return Word.gen(self.edge_generator)
        return self.edge_words[0]

    def edge_word_in(self, vertex: int) -> Word | None:
        if self.edge_words is None:
            return None
        if self.kind is SplitKind.CYCLIC_HNN:
            return self.edge_words[0]
        return self.edge_words[vertex]

    def describe(self) -> str:
        parts = " * ".join(str(v) for v in self.vertices)
        if self.kind is SplitKind.FREE_PRODUCT:
            return f"free product {parts}"
        if self.kind is SplitKind.CYCLIC_AMALGAM:
            a, b = self.edge_words
            return f"amalgam {parts} over {a} = {b}"
        u, v = self.edge_words
        return f"HNN of {parts} with {self.stable_letter} {u} {self.stable_letter}^-1 = {v}"


# -- components ----------------------------------------------------------------


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def components(generators: Sequence[str], relators: Iterable[Word], merged: Sequence[str] = ()) -> dict[str, int]:
    """Component index (numbered by first generator) of each generator."""
    uf = _UnionFind(generators)
    for r in relators:
        syms = [l.symbol for l in r.letters]
        for s in syms[1:]:
            uf.union(syms[0], s)
    for s in merged[1:]:
        uf.union(merged[0], s)
    ids: dict[str, int] = {}
    out: dict[str, int] = {}
    for g in generators:
        root = uf.find(g)
        out[g] = ids.setdefault(root, len(ids))
    return out


def _vertex(gens: Sequence[str], relators: Iterable[Word]) -> GroupPresentation:
    gs = set(gens)
    return GroupPresentation(tuple(gens), tuple(r for r in relators if r.symbols() <= gs))


def _coefficient_side(comp: dict[str, int], coefficient_gens: Sequence[str]) -> int | None:
    return comp[coefficient_gens[0]] if coefficient_gens else None


# -- detection -------------------------------------------------------------------


def detect_free_product(p: GroupPresentation, coefficient_gens: Sequence[str] = ()) -> SplittingShape | None:
    comp = components(p.generators, p.relators, coefficient_gens)
    if len(set(comp.values())) < 2:
        return None
    anchor = _coefficient_side(comp, coefficient_gens)
    if anchor is None:
        anchor = comp[p.generators[0]]
    a_gens = [g for g in p.generators if comp[g] == anchor]
    b_gens = [g for g in p.generators if comp[g] != anchor]
    return SplittingShape(
        SplitKind.FREE_PRODUCT,
        (_vertex(a_gens, p.relators), _vertex(b_gens, p.relators)),
        coefficient_vertex=0 if coefficient_gens else None,
    )


def _defining_word(r: Word, c: str) -> Word:
    """For a relator containing ``c`` once, the word ``w`` with ``c = w``."""
    pos = next(i for i, l in enumerate(r.letters) if l.symbol == c)
    rot = Word(r.letters[pos:] + r.letters[:pos])
    if rot.letters[0].sign < 0:
        rot = Word(rot.inverse().letters[-1:] + rot.inverse().letters[:-1])
    return rot[1:].inverse()


def _two_sides(gens, comp, side_a: set[int], side_b: set[int], coefficient_gens):
    """Assign stray components to the coefficient side (or side A)."""
    coef = _coefficient_side(comp, coefficient_gens)
    if coef is not None and coef in side_b:
        side_a, side_b = side_b, side_a
        swapped = True
    else:
        swapped = False
    a = [g for g in gens if comp[g] not in side_b]
    b = [g for g in gens if comp[g] in side_b]
    return a, b, swapped


def detect_amalgam_edge_generator(p: GroupPresentation, coefficient_gens: Sequence[str] = ()) -> Iterator[SplittingShape]:
    coefs = set(coefficient_gens)
    for c in p.generators:
        if c in coefs:
            continue
        holders = [r for r in p.relators if c in r.symbols()]
        if len(holders) != 2 or any(r.occurrences(c) != 1 for r in holders):
            continue
        w1, w2 = (_defining_word(r, c) for r in holders)
        if not w1 or not w2:
            continue
        rest_gens = [g for g in p.generators if g != c]
        rest_rels = [r for r in p.relators if c not in r.symbols()]
        comp = components(rest_gens, rest_rels, coefficient_gens)
        s1 = {comp[s] for s in w1.symbols()}
        s2 = {comp[s] for s in w2.symbols()}
        if s1 & s2:
            continue
        a_gens, b_gens, swapped = _two_sides(rest_gens, comp, s1, s2, coefficient_gens)
        if swapped:
            w1, w2 = w2, w1
        yield SplittingShape(
            SplitKind.CYCLIC_AMALGAM,
            (_vertex(a_gens, rest_rels), _vertex(b_gens, rest_rels)),
            edge_words=(w1, w2),
            edge_generator=c,
            coefficient_vertex=0 if coefficient_gens else None,
            glue=tuple(holders),
        )


def detect_amalgam_glue_relator(p: GroupPresentation, coefficient_gens: Sequence[str] = ()) -> Iterator[SplittingShape]:
    for idx, rho in enumerate(p.relators):
        rest_rels = p.relators[:idx] + p.relators[idx + 1:]
        comp = components(p.generators, rest_rels, coefficient_gens)
        seen = set()
        for _, rot in rotations(rho):
            for s in range(1, len(rot)):
                w1, w2 = rot[:s], rot[s:]
                s1 = {comp[l.symbol] for l in w1.letters}
                s2 = {comp[l.symbol] for l in w2.letters}
                if s1 & s2:
                    continue
                key = (frozenset(s1), frozenset(s2))
                if key in seen:
                    continue
                seen.add(key)
                a_gens, b_gens, swapped = _two_sides(p.generators, comp, s1, s2, coefficient_gens)
                # rho = w1 w2, so w1 = w2^-1
                edge = (w2.inverse(), w1) if swapped else (w1, w2.inverse())
                yield SplittingShape(
                    SplitKind.CYCLIC_AMALGAM,
                    (_vertex(a_gens, rest_rels), _vertex(b_gens, rest_rels)),
                    edge_words=edge,
                    coefficient_vertex=0 if coefficient_gens else None,
                    glue=(rho,),
                )
                break


def _hnn_form(r: Word, t: str) -> tuple[Word, Word] | None:
    """``(u, v)`` if ``r`` is a rotation of ``t u t^-1 v^-1`` or its inverse."""
    if r.occurrences(t) != 2 or r.exponent_sum(t) != 0:
        return None
    for cand in (r, r.inverse()):
        for _, rot in rotations(cand):
            l = rot.letters
            if l[0] != Letter(t, 1):
                continue
            j = next(i for i in range(1, len(l)) if l[i].symbol == t)
            u = Word._raw(l[1:j])
            v = Word._raw(l[j + 1:]).inverse()
            if u and v:
                return u, v
    return None


def detect_hnn(p: GroupPresentation, coefficient_gens: Sequence[str] = ()) -> Iterator[SplittingShape]:
    coefs = set(coefficient_gens)
    for t in p.generators:
        if t in coefs:
            continue
        holders = [r for r in p.relators if t in r.symbols()]
        if len(holders) != 1:
            continue
        form = _hnn_form(holders[0], t)
        if form is None:
            continue
        rest_gens = [g for g in p.generators if g != t]
        rest_rels = [r for r in p.relators if r is not holders[0]]
        yield SplittingShape(
            SplitKind.CYCLIC_HNN,
            (_vertex(rest_gens, rest_rels),),
            edge_words=form,
            stable_letter=t,
            coefficient_vertex=0 if coefficient_gens else None,
            glue=(holders[0],),
        )


def detect_all_splittings(p: GroupPresentation, coefficient_gens: Sequence[str] = ()) -> list[SplittingShape]:
    """Every exhibited splitting found, in a fixed order of preference."""
    out: list[SplittingShape] = []
    fp = detect_free_product(p, coefficient_gens)
    if fp is not None:
        out.append(fp)
    out.extend(detect_amalgam_edge_generator(p, coefficient_gens))
    out.extend(detect_amalgam_glue_relator(p, coefficient_gens))
    out.extend(detect_hnn(p, coefficient_gens))
    return [s for s in out if _coefficients_elliptic(s, coefficient_gens)]


def _coefficients_elliptic(s: SplittingShape, coefficient_gens: Sequence[str]) -> bool:
    if not coefficient_gens:
        return True
    sides = {s.vertex_of(g) for g in coefficient_gens}
    return len(sides) == 1 and None not in sides


def detect_exhibited_splitting(p: GroupPresentation, coefficient_gens: Sequence[str] | None = None) -> SplittingShape | None:
    found = detect_all_splittings(p, tuple(coefficient_gens or ()))
    return found[0] if found else None


def check_shape(shape: SplittingShape, p: GroupPresentation, coefficient_gens: Sequence[str] = ()) -> str | None:
    """Re-verify that ``shape`` is exhibited by ``p``; return a failure reason or ``None``."""
    gens = set(p.generators)
    vertex_gens = [set(v.generators) for v in shape.vertices]
    extra = set()
    if shape.kind is SplitKind.FREE_PRODUCT:
        if len(shape.vertices) != 2 or shape.edge_words is not None:
            return "free product needs two vertices and no edge"
    elif shape.kind is SplitKind.CYCLIC_AMALGAM:
        if len(shape.vertices) != 2 or shape.edge_words is None:
            return "amalgam needs two vertices and edge words"
        if shape.edge_generator is not None:
            extra = {shape.edge_generator}
    else:
        if len(shape.vertices) != 1 or shape.stable_letter is None or shape.edge_words is None:
            return "HNN needs one vertex, a stable letter and edge words"
        extra = {shape.stable_letter}
    union = set().union(*vertex_gens) | extra
    if union != gens or sum(len(v) for v in vertex_gens) + len(extra) != len(gens):
        return "vertex generators do not partition the generators"
    if any(not v for v in vertex_gens):
        return "empty vertex"
    vertex_rels = [set(cyclic_canonical(r, _canon_key) for r in v.relators) for v in shape.vertices]
    for i, v in enumerate(shape.vertices):
        for r in v.relators:
            if not r.symbols() <= vertex_gens[i]:
                return f"vertex {i} relator {r} leaves the vertex"
    expected = []
    if shape.kind is SplitKind.CYCLIC_AMALGAM:
        a, b = shape.edge_words
        if not a or not b:
            return "edge words must be non-trivial"
        if not a.symbols() <= vertex_gens[0] or not b.symbols() <= vertex_gens[1]:
            return "edge words must lie in their vertices"
        if shape.edge_generator is not None:
            c = Word.gen(shape.edge_generator)
            expected = [c * a.inverse(), c * b.inverse()]
        else:
            expected = [a * b.inverse()]
    elif shape.kind is SplitKind.CYCLIC_HNN:
        u, v = shape.edge_words
        if not u or not v or not (u.symbols() | v.symbols()) <= vertex_gens[0]:
            return "HNN edge words must be non-trivial words in the vertex"
        t = Word.gen(shape.stable_letter)
        expected = [t * u * t.inverse() * v.inverse()]
    want = {}
    for r in expected:
        k = cyclic_canonical(r, _canon_key)
        want[k] = want.get(k, 0) + 1
    for r in p.relators:
        k = cyclic_canonical(r, _canon_key)
        if any(k in vr for vr in vertex_rels):
            continue
        if want.get(k, 0) > 0:
            want[k] -= 1
            continue
        return f"relator {r} is neither a vertex relator nor a gluing relator"
    if any(n > 0 for n in want.values()):
        return "a gluing relator is missing"
    for i, v in enumerate(shape.vertices):
        got = {cyclic_canonical(r, _canon_key) for r in p.relators if r.symbols() <= vertex_gens[i]}
        if not vertex_rels[i] <= got:
            return f"vertex {i} lists relators absent from the presentation"
    if coefficient_gens and not _coefficients_elliptic(shape, coefficient_gens):
        return "coefficient generators are split across vertices"
    return None


def _canon_key(w: Word) -> tuple:
    return (len(w), tuple((l.symbol, l.sign) for l in w.letters))


# -- abelian vertices ---------------------------------------------------------------


def is_visibly_abelian(v: GroupPresentation) -> bool:
    """Every pair of generators has its commutator (up to rotation/inverse) as a relator."""
    present = {cyclic_canonical(r, _canon_key) for r in v.relators}
    for g, h in itertools.combinations(v.generators, 2):
        if cyclic_canonical(commutator(Word.gen(g), Word.gen(h)), _canon_key) not in present:
            return False
    return True


def free_rank(v: GroupPresentation) -> int:
    return smith_normal_form(v.exponent_matrix(), len(v.generators)).rank


def is_essential_exhibit(s: SplittingShape) -> bool:
    """Visibly abelian vertices must have free rank at least two."""
    if s.kind is SplitKind.FREE_PRODUCT:
        return True
    return all(free_rank(v) >= 2 for v in s.vertices if is_visibly_abelian(v))


# -- witnesses -------------------------------------------------------------------------


@dataclass(frozen=True)
class NamedConstraint:
    name: str
    members: tuple[Word, ...]
    """At least one member must be non-trivial (a plain inequation when single)."""


@dataclass(frozen=True)
class WitnessConstraints:
    system: EquationSystem
    named: tuple[NamedConstraint, ...]


def pairwise_commutators(gens: Sequence[str]) -> tuple[Word, ...]:
    return tuple(commutator(Word.gen(g), Word.gen(h)) for g, h in itertools.combinations(gens, 2))


def quotient_system(p: GroupPresentation, coefficient_gens: Sequence[str], pulled_inequations=(),
                    pulled_clauses=()) -> EquationSystem:
    coefs = tuple(coefficient_gens)
    variables = tuple(g for g in p.generators if g not in set(coefs))
    return EquationSystem(variables, coefs if coefs else None, p.relators,
                          tuple(pulled_inequations), tuple(pulled_clauses))


def witness_constraints(s: SplittingShape, p: GroupPresentation, coefficient_gens: Sequence[str] = (),
                        pulled_inequations: Sequence[Word] = (),
                        pulled_clauses: Sequence[Sequence[Word]] = ()) -> WitnessConstraints:
    """The system whose solutions are witnesses for ``s`` satisfying the pulled-back inequations.

    Raises :class:`ContradictionError` when a constraint is unsatisfiable on
    its face (e.g. a non-abelian requirement on a cyclic group).
    """
    named: list[NamedConstraint] = []
    edge = s.edge_element()
    if edge is not None:
        named.append(NamedConstraint("edge-injective", (edge,)))
    named.append(NamedConstraint("non-abelian", pairwise_commutators(p.generators)))
    if s.kind is not SplitKind.FREE_PRODUCT:
        for i, v in enumerate(s.vertices):
            if is_visibly_abelian(v):
                continue
            e = s.edge_word_in(i)
            named.append(NamedConstraint(
                f"non-central[{i}]",
                tuple(commutator(e, Word.gen(g)) for g in v.generators),
            ))
    else:
        for i, v in enumerate(s.vertices):
            named.append(NamedConstraint(f"vertex-nontrivial[{i}]", tuple(Word.gen(g) for g in v.generators)))
            if not is_visibly_abelian(v):
                named.append(NamedConstraint(f"vertex-non-abelian[{i}]", pairwise_commutators(v.generators)))
    if s.stable_letter is not None:
        named.append(NamedConstraint("stable-nontrivial", (Word.gen(s.stable_letter),)))
    inequations = [c.members[0] for c in named if len(c.members) == 1]
    clauses = [c.members for c in named if len(c.members) != 1]
    base = quotient_system(p, coefficient_gens, pulled_inequations, pulled_clauses)
    return WitnessConstraints(base.with_constraints(inequations=inequations, clauses=clauses), tuple(named))


# -- approximations --------------------------------------------------------------------------


@dataclass(frozen=True)
class Approximation:
    presentation: GroupPresentation
    renaming: dict = field(default_factory=dict)


def _fresh(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    for i in itertools.count(1):
        name = f"{base}{i}"
        if name not in taken:
            return name
    raise AssertionError("unreachable")


def amalgam_approximation(a: GroupPresentation, b: GroupPresentation, edge_a: Word, edge_b: Word) -> Approximation:
    if not edge_a.symbols() <= set(a.generators) or not edge_b.symbols() <= set(b.generators):
        raise PreconditionError("edge words must lie in their vertex alphabets")
    taken = set(a.generators)
    renaming = {}
    for g in b.generators:
        if g in taken:
            renaming[g] = _fresh(g, taken | set(b.generators))
        taken.add(renaming.get(g, g))
    images = {g: Word.gen(n) for g, n in renaming.items()}
    b_gens = tuple(renaming.get(g, g) for g in b.generators)
    b_rels = tuple(r.substitute(images) for r in b.relators)
    eb = edge_b.substitute(images)
    gens = a.generators + b_gens
    rels = a.relators + b_rels
    if not edge_a and not eb:
        return Approximation(GroupPresentation(gens, rels), renaming)
    c = _fresh("c", set(gens))
    cw = Word.gen(c)
    return Approximation(
        GroupPresentation(gens + (c,), rels + (cw * edge_a.inverse(), cw * eb.inverse())),
        renaming,
    )


def hnn_approximation(a: GroupPresentation, edge: Word, edge_prime: Word) -> Approximation:
    if not (edge.symbols() | edge_prime.symbols()) <= set(a.generators):
        raise PreconditionError("edge words must lie in the vertex alphabet")
    t = _fresh("t", set(a.generators))
    tw = Word.gen(t)
    return Approximation(
        GroupPresentation(a.generators + (t,), a.relators + (tw * edge * tw.inverse() * edge_prime.inverse(),)),
    )


# -- quotient maps ------------------------------------------------------------------------------


ProofTerm = tuple[Word, int, int]
"""``(conjugator, target relator index, sign)`` standing for ``q r^s q^-1``."""


def proof_product(terms: Sequence[ProofTerm], relators: Sequence[Word]) -> Word:
    out = Word.identity()
    for q, idx, sign in terms:
        out = out * q * relators[idx] ** sign * q.inverse()
    return out


@dataclass(frozen=True)
class QuotientMap:
    """A map from ``source`` onto ``target`` with proofs that relators go to relators.

    ``relator_proofs[i]`` expresses the image of source relator ``i`` as a
    product of conjugates of target relators, equal in the free group.
    """

    source: GroupPresentation
    target: GroupPresentation
    generator_images: dict
    relator_proofs: tuple[tuple[ProofTerm, ...], ...]
    fixed: tuple[str, ...] = ()
    moves: tuple[str, ...] = ()

    @classmethod
    def identity(cls, p: GroupPresentation, fixed: Sequence[str] = ()) -> "QuotientMap":
        return cls(
            p, p, {g: Word.gen(g) for g in p.generators},
            tuple(((Word.identity(), i, 1),) for i in range(len(p.relators))),
            tuple(fixed),
        )

    def image(self, w: Word) -> Word:
        return w.substitute(self.generator_images)

    # moves

    def add_relator(self, r: Word) -> "QuotientMap":
        target = GroupPresentation(self.target.generators, self.target.relators + (r,))
        if len(target.relators) == len(self.target.relators):
            return self
        return QuotientMap(self.source, target, self.generator_images, self.relator_proofs,
                           self.fixed, self.moves + (f"add {r}",))

    def eliminate(self, x: str, index: int) -> "QuotientMap":
        """Drop generator ``x`` using relator ``index``, in which it occurs exactly once."""
        if x in self.fixed:
            raise PreconditionError(f"cannot eliminate fixed generator {x}")
        rel = self.target.relators[index]
        if rel.occurrences(x) != 1:
            raise PreconditionError(f"{x} must occur exactly once in relator {rel}")
        pos = next(i for i, l in enumerate(rel.letters) if l.symbol == x)
        before, after = rel[:pos], rel[pos + 1:]
        value = before.inverse() * after.inverse()
        if rel.letters[pos].sign < 0:
            value = value.inverse()
        phi = {x: value}
        new_gens = tuple(g for g in self.target.generators if g != x)
        new_rels: list[Word] = []
        index_map: dict[int, tuple[int, Word]] = {}
        for k, r in enumerate(self.target.relators):
            if k == index:
                continue
            core, q = cyclic_reduce(r.substitute(phi))
            if core:
                index_map[k] = (len(new_rels), q)
                new_rels.append(core)
        proofs = []
        for terms in self.relator_proofs:
            new_terms = []
            for q, k, s in terms:
                if k not in index_map:
                    continue
                j, qk = index_map[k]
                new_terms.append((q.substitute(phi) * qk, j, s))
            proofs.append(tuple(new_terms))
        images = {g: w.substitute(phi) for g, w in self.generator_images.items()}
        target = GroupPresentation(new_gens, tuple(new_rels))
        assert target.relators == tuple(new_rels)
        return QuotientMap(self.source, target, images, tuple(proofs), self.fixed,
                           self.moves + (f"eliminate {x}",))

    def introduce(self, name: str, w: Word, indices: Iterable[int]) -> "QuotientMap":
        """Add generator ``name = w`` and rewrite ``w`` into it inside the chosen relators."""
        if name in self.target.generators:
            raise PreconditionError(f"generator {name} already exists")
        if not w:
            raise PreconditionError("cannot introduce a name for the identity")
        c = Word.gen(name)
        rho = c * w.inverse()
        rels = list(self.target.relators)
        rho_index = len(rels)
        chosen = set(indices)
        expansions: dict[int, tuple[list[ProofTerm], int, Word]] = {}
        new_rels = list(rels)
        for k in sorted(chosen):
            rewritten, terms = _rewrite_occurrences(rels[k], w, c, rho_index)
            core, q = cyclic_reduce(rewritten)
            new_rels[k] = core
            expansions[k] = (terms, k, q)
        new_rels.append(rho)
        proofs = []
        for old in self.relator_proofs:
            out: list[ProofTerm] = []
            for q, k, s in old:
                if k not in expansions:
                    out.append((q, k, s))
                    continue
                terms, kk, qk = expansions[k]
                # old r_k = (product of terms) * qk core qk^-1
                if s > 0:
                    out.extend((q * p, i, e) for p, i, e in terms)
                    out.append((q * qk, kk, 1))
                else:
                    out.append((q * qk, kk, -1))
                    out.extend((q * p, i, -e) for p, i, e in reversed(terms))
            proofs.append(tuple(out))
        target = GroupPresentation(self.target.generators + (name,), tuple(new_rels))
        assert target.relators == tuple(new_rels)
        return QuotientMap(self.source, target, dict(self.generator_images), tuple(proofs),
                           self.fixed, self.moves + (f"introduce {name} = {w}",))

    # checks

    def check_proofs(self) -> int | None:
        """Index of the first source relator whose proof fails, else ``None``."""
        if len(self.relator_proofs) != len(self.source.relators):
            return len(self.relator_proofs)
        for i, (r, terms) in enumerate(zip(self.source.relators, self.relator_proofs)):
            if any(not 0 <= k < len(self.target.relators) or s not in (1, -1) for _, k, s in terms):
                return i
            if proof_product(terms, self.target.relators) != self.image(r):
                return i
        return None

    def is_surjective(self) -> bool:
        """Structural check: every target generator is reached from exact images by
        solving relators in which it occurs once among already reached letters."""
        reached = {
            w.letters[0].symbol
            for w in self.generator_images.values()
            if len(w) == 1 and w.letters[0].symbol in self.target.generators
        }
        changed = True
        while changed:
            changed = False
            for r in self.target.relators:
                missing = r.symbols() - reached
                if len(missing) == 1:
                    y = next(iter(missing))
                    if r.occurrences(y) == 1:
                        reached.add(y)
                        changed = True
        return reached >= set(self.target.generators)


def _rewrite_occurrences(r: Word, w: Word, c: Word, rho_index: int) -> tuple[Word, list[ProofTerm]]:
    """Replace occurrences of ``w``/``w^-1`` in ``r`` by ``c``/``c^-1``.

    Returns the rewritten word and terms with ``r = (prod terms) * rewritten``.
    """
    lw = w.letters
    lwi = w.inverse().letters
    n = len(lw)
    letters = r.letters
    prefix = Word.identity()
    terms: list[ProofTerm] = []
    i = 0
    while i < len(letters):
        if letters[i:i + n] == lw:
            terms.append((prefix, rho_index, -1))
            prefix = prefix * c
            i += n
        elif letters[i:i + n] == lwi:
            terms.append((prefix * c.inverse(), rho_index, 1))
            prefix = prefix * c.inverse()
            i += n
        else:
            prefix = prefix * Word._raw((letters[i],))
            i += 1
    return prefix, terms


def greedy_eliminate(qm: QuotientMap) -> QuotientMap:
    """Eliminate non-fixed generators occurring once in some relator, until none remain."""
    while True:
        for idx, r in enumerate(qm.target.relators):
            x = next((g for g in qm.target.generators
                      if g not in qm.fixed and r.occurrences(g) == 1), None)
            if x is not None:
                qm = qm.eliminate(x, idx)
                break
        else:
            return qm


def base_quotient(sys: EquationSystem, ctx: GroupContext | None = None) -> QuotientMap:
    p, coefs = presentation_of_H(sys, ctx)
    return QuotientMap.identity(p, coefs)


def _short_words(gens: Sequence[str], max_len: int) -> Iterator[Word]:
    from .group_core import free_ball

    yield from (w for w in free_ball(gens, max_len) if w)


def enumerate_quotients(base: QuotientMap, max_extra_len: int = 2, max_subsets: int = 4) -> Iterator[QuotientMap]:
    """Deterministic stream of proof-carrying quotients of ``base.source``.

    For each extra relator (none, then short words), emit the raw and the
    greedily eliminated quotient, then Tietze introductions of short
    subwords of their relators.
    """
    fixed = set(base.fixed)
    gens = base.target.generators
    key = shortlex_key(gens)
    extras: list[Word | None] = [None]
    seen_extra = set()
    for w in _short_words(gens, max_extra_len):
        if w.symbols() <= fixed:
            continue
        k = cyclic_canonical(w, key)
        if k in seen_extra:
            continue
        seen_extra.add(k)
        extras.append(w)
    emitted = set()

    def fingerprint(qm: QuotientMap):
        return (qm.target.generators, tuple(cyclic_canonical(r, _canon_key) for r in qm.target.relators))

    for extra in extras:
        raw = base if extra is None else base.add_relator(extra)
        elim = greedy_eliminate(raw)
        for qm in (raw, elim):
            fp = fingerprint(qm)
            if fp in emitted:
                continue
            emitted.add(fp)
            yield qm
        for qm in (raw, elim):
            yield from _introductions(qm, max_subsets, emitted, fingerprint)


def _introductions(qm: QuotientMap, max_subsets: int, emitted: set, fingerprint) -> Iterator[QuotientMap]:
    rels = qm.target.relators
    key = shortlex_key(qm.target.generators)
    words: list[Word] = []
    seen = set()
    for r in rels:
        for n in (1, 2):
            for i in range(len(r) - n + 1):
                w = r[i:i + n]
                canon = min(w, w.inverse(), key=key)
                if canon not in seen:
                    seen.add(canon)
                    words.append(canon)
    words.sort(key=key)
    name = _fresh("c", set(qm.target.generators) | set(qm.source.generators))
    for w in words:
        holders = [i for i, r in enumerate(rels) if _contains(r, w)]
        subsets = [s for n in range(1, len(holders) + 1) for s in itertools.combinations(holders, n)]
        for subset in subsets[:max_subsets]:
            try:
                cand = qm.introduce(name, w, subset)
            except PreconditionError:
                continue
            fp = fingerprint(cand)
            if fp in emitted:
                continue
            emitted.add(fp)
            yield cand


def _contains(r: Word, w: Word) -> bool:
    a, b, n = r.letters, w.letters, len(w)
    bi = w.inverse().letters
    return any(a[i:i + n] in (b, bi) for i in range(len(a) - n + 1))


def pull_back(words: Iterable[Word], qm: QuotientMap) -> list[Word]:
    return [qm.image(w) for w in words]


def pulled_constraints(sys: EquationSystem, qm: QuotientMap) -> tuple[list[Word], list[tuple[Word, ...]]]:
    """Images of the inequations and clauses under the quotient map.

    Raises :class:`ContradictionError` when an image is freely trivial.
    """
    neqs = pull_back(sys.inequations, qm)
    if any(not w for w in neqs):
        raise ContradictionError("an inequation maps to the identity")
    clauses = [tuple(w for w in pull_back(c, qm) if w) for c in sys.clauses]
    if any(not c for c in clauses):
        raise ContradictionError("a clause maps to the identity")
    return neqs, clauses
