"""Semi-decision procedures certifying infinitely many solutions or orbits.

Both procedures walk a dovetailed stream of proof-carrying quotients of
the system's group.  A candidate quotient succeeds when it exhibits a
splitting (or, for orbits, is visibly abelian), a witness homomorphism
exists, and a twist family built from the witness yields at least
``family_size`` verified, distinct (and for orbits pairwise
non-conjugate) solutions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from ..eqsys import Assignment, EquationSystem, is_solution
from ..errors import ContradictionError, PreconditionError
from ..group_core import GroupContext, Word
from ..search import SearchBudget, as_budget, iter_solutions, past
from ..splittings import (
    QuotientMap,
    SplitKind,
    SplittingShape,
    base_quotient,
    detect_all_splittings,
    enumerate_quotients,
    is_essential_exhibit,
    is_visibly_abelian,
    pairwise_commutators,
    pulled_constraints,
    quotient_system,
    witness_constraints,
)
from ..twisting import (
    FamilyError,
    TwistAutomorphism,
    TwistKind,
    generalized_twist_choices,
    make_twist,
    pairwise_nonconjugate,
    power_family_indexed,
    twist_power_family_indexed,
)

MODE_SOLUTIONS = "solutions"
MODE_ORBITS = "orbits"
WITNESS_ATTEMPTS = 6


@dataclass(frozen=True)
class FamilyDerivation:
    """How members arise from the witness: twist iterates or generator powers."""

    kind: str  # "twist" or "power"
    twist: TwistAutomorphism | None = None
    generators: tuple[str, ...] = ()

    def member(self, witness: Assignment, n: int) -> Assignment:
        from ..twisting import power_member, twist_iterates

        if self.kind == "power":
            return power_member(witness, self.generators, n)
        return twist_iterates(witness, self.twist, n)[-1]

    def members(self, witness: Assignment, exponents: Sequence[int]) -> list[Assignment]:
        from ..twisting import power_member, twist_iterates

        if not exponents:
            return []
        if self.kind == "power":
            return [power_member(witness, self.generators, n) for n in exponents]
        iterates = twist_iterates(witness, self.twist, max(exponents))
        return [iterates[n - 1] for n in exponents]

    def describe(self) -> str:
        if self.kind == "power":
            return f"powers of {', '.join(self.generators)}"
        return self.twist.kind.value


@dataclass
class InfinitudeCertificate:
    mode: str
    ctx: GroupContext
    system: EquationSystem
    quotient: QuotientMap
    branch: str  # "splitting" or "abelian"
    splitting: SplittingShape | None
    witness: Assignment
    vertex_witnesses: list[tuple[int, Assignment]]
    derivation: FamilyDerivation
    exponents: list[int]
    members: list[Assignment]
    candidate_index: int = 0
    round: int = 0

    @property
    def abelian_case_flag(self) -> bool:
        return self.branch == "abelian"


def to_solution(member: Assignment, qm: QuotientMap, variables: Sequence[str]) -> Assignment:
    """``member o eta``: the system solution induced by a map on the quotient."""
    images = member.as_dict()
    return Assignment(tuple(variables), tuple(qm.generator_images[x].substitute(images) for x in variables))


@dataclass
class _Candidate:
    index: int
    qm: QuotientMap
    shapes: list[SplittingShape] | None = None
    pulled: tuple | None = None
    dead: bool = False
    tried_radius: int = 0


@dataclass
class InfinitudeSearch:
    sys: EquationSystem
    ctx: GroupContext
    budget: SearchBudget
    mode: str
    steps: int = 0
    candidates_seen: int = 0
    _deadline: float | None = field(default=None, repr=False)

    def run(self) -> InfinitudeCertificate | None:
        self._deadline = self.budget.deadline()
        base = base_quotient(self.sys, self.ctx)
        stream = enumerate_quotients(base)
        cache: list[_Candidate] = []
        for rnd in range(1, self.budget.rounds + 1):
            want = 8 * 4 ** (rnd - 1)
            while len(cache) < want:
                qm = next(stream, None)
                if qm is None:
                    break
                cache.append(_Candidate(len(cache), qm))
            self.candidates_seen = len(cache)
            radius = min(rnd, self.budget.variable_radius)
            for cand in cache[:want]:
                if past(self._deadline):
                    return None
                if cand.dead or cand.tried_radius >= radius:
                    continue
                cand.tried_radius = radius
                cert = self._try(cand, radius)
                if cert is not None:
                    cert.round = rnd
                    return cert
        return None

    # -- per candidate -------------------------------------------------------------

    def _search_budget(self, radius: int) -> SearchBudget:
        b = self.budget
        return SearchBudget(radius, b.step_cap, b.conjugator_radius, b.rounds, None, b.family_size, b.skip_budget)

    def _prepare(self, cand: _Candidate) -> bool:
        if cand.pulled is not None:
            return True
        qm = cand.qm
        if qm.check_proofs() is not None or not qm.is_surjective():
            cand.dead = True
            return False
        try:
            cand.pulled = pulled_constraints(self.sys, qm)
        except ContradictionError:
            cand.dead = True
            return False
        cand.shapes = [s for s in detect_all_splittings(qm.target, qm.fixed) if is_essential_exhibit(s)]
        return True

    def _try(self, cand: _Candidate, radius: int) -> InfinitudeCertificate | None:
        self.steps += 1
        if not self._prepare(cand):
            return None
        for shape in cand.shapes:
            cert = self._try_shape(cand, shape, radius)
            if cert is not None:
                return cert
        if self.mode == MODE_ORBITS and is_visibly_abelian(cand.qm.target):
            return self._try_abelian(cand, radius)
        return None

    def _quotient_sys(self, cand: _Candidate) -> EquationSystem:
        neqs, clauses = cand.pulled
        return quotient_system(cand.qm.target, cand.qm.fixed, neqs, clauses)

    def _try_shape(self, cand: _Candidate, shape: SplittingShape, radius: int) -> InfinitudeCertificate | None:
        qm = cand.qm
        neqs, clauses = cand.pulled
        try:
            wc = witness_constraints(shape, qm.target, qm.fixed, neqs, clauses)
        except ContradictionError:
            return None
        budget = self._search_budget(radius)
        qsys = self._quotient_sys(cand)
        strategies = list(self._strategies(shape))
        if not strategies:
            return None
        witnesses = iter_solutions(wc.system, self.ctx, budget, self._deadline)
        for witness in itertools.islice(witnesses, WITNESS_ATTEMPTS):
            vws = self._vertex_witnesses(cand, shape, witness, budget)
            if vws is None:
                continue
            for derivation in strategies:
                fam = self._family(cand, qsys, witness, derivation)
                if fam is not None:
                    exps, members = fam
                    return InfinitudeCertificate(
                        self.mode, self.ctx, self.sys, qm, "splitting", shape, witness, vws,
                        derivation, exps, members, cand.index,
                    )
        return None

    def _try_abelian(self, cand: _Candidate, radius: int) -> InfinitudeCertificate | None:
        qm = cand.qm
        qsys = self._quotient_sys(cand)
        gens = tuple(g for g in qm.target.generators if g not in qm.fixed)
        if not gens:
            return None
        try:
            nontrivial = qsys.with_constraints(clauses=[tuple(Word.gen(g) for g in gens)])
        except ContradictionError:
            return None
        derivation = FamilyDerivation("power", generators=gens)
        budget = self._search_budget(radius)
        for witness in itertools.islice(iter_solutions(nontrivial, self.ctx, budget, self._deadline), WITNESS_ATTEMPTS):
            fam = self._family(cand, qsys, witness, derivation)
            if fam is not None:
                exps, members = fam
                return InfinitudeCertificate(
                    self.mode, self.ctx, self.sys, qm, "abelian", None, witness, [],
                    derivation, exps, members, cand.index,
                )
        return None

    def _vertex_witnesses(self, cand, shape, witness, budget) -> list[tuple[int, Assignment]] | None:
        """One map per non-visibly-abelian vertex whose image of that vertex is non-abelian."""
        out = []
        for i, v in enumerate(shape.vertices):
            if is_visibly_abelian(v):
                continue
            comms = pairwise_commutators(v.generators)
            images = witness.as_dict()
            if any(not self.ctx.is_trivial(c.substitute(images)) for c in comms):
                out.append((i, witness))
                continue
            try:
                vsys = quotient_system(cand.qm.target, cand.qm.fixed).with_constraints(clauses=[comms])
            except ContradictionError:
                return None
            found = next(iter_solutions(vsys, self.ctx, budget, self._deadline), None)
            if found is None:
                return None
            out.append((i, found))
        return out

    def _strategies(self, shape: SplittingShape) -> Iterator[FamilyDerivation]:
        fixed = set(self._fixed())
        orbits = self.mode == MODE_ORBITS
        if shape.kind is SplitKind.FREE_PRODUCT:
            for home in (0, 1):
                v = shape.vertices[home]
                if orbits and is_visibly_abelian(v):
                    continue
                moved = shape.vertices[1 - home]
                if set(moved.generators) & fixed:
                    continue
                for g in v.generators:
                    yield FamilyDerivation("twist", make_twist(shape, TwistKind.PARTIAL_CONJUGATION, anchor=Word.gen(g)))
            for i, v in enumerate(shape.vertices):
                if set(v.generators) & fixed or not is_visibly_abelian(v):
                    continue
                yield FamilyDerivation("power", generators=v.generators)
        elif shape.kind is SplitKind.CYCLIC_AMALGAM:
            for moved in ((1,) if not orbits else (1, 0)):
                if set(shape.vertices[moved].generators) & fixed:
                    continue
                yield FamilyDerivation("twist", make_twist(shape, TwistKind.DEHN_TWIST, vertex=moved))
            for i in ((1,) if not orbits else (1, 0)):
                for t in generalized_twist_choices(shape, i, tuple(fixed)):
                    yield FamilyDerivation("twist", make_twist(shape, TwistKind.GENERALIZED_DEHN_TWIST, vertex=i, t=t))
        else:
            yield FamilyDerivation("twist", make_twist(shape, TwistKind.HNN_DEHN_TWIST))

    def _fixed(self) -> tuple[str, ...]:
        return tuple(self.ctx.generators) if self.sys.has_coefficients else ()

    def _family(self, cand, qsys, witness, derivation: FamilyDerivation):
        """``(exponents, system solutions)`` or ``None`` when the family does not verify."""
        count = max(self.budget.family_size, 3)
        try:
            if derivation.kind == "power":
                indexed = power_family_indexed(witness, derivation.generators, qsys, self.ctx, count,
                                               self.budget.skip_budget)
            else:
                indexed = twist_power_family_indexed(witness, derivation.twist, qsys, self.ctx, count,
                                                     self.budget.skip_budget)
        except FamilyError:
            return None
        members = [to_solution(m, cand.qm, self.sys.variables) for _, m in indexed]
        if not all(is_solution(self.sys, m, self.ctx) for m in members):
            return None
        if len(set(members)) != len(members):
            return None
        if self.mode == MODE_ORBITS and pairwise_nonconjugate(members, self.ctx, self.budget) is not True:
            return None
        return [n for n, _ in indexed], members


def check_ihom_infinite(sys: EquationSystem, ctx: GroupContext, budget=None) -> InfinitudeCertificate | None:
    """Certify infinitely many solutions of a system with coefficients, or give up."""
    if not sys.has_coefficients:
        raise PreconditionError("counting solutions needs a system with coefficients")
    return InfinitudeSearch(sys, ctx, as_budget(budget), MODE_SOLUTIONS).run()


def check_orbits_infinite(sys: EquationSystem, ctx: GroupContext, budget=None) -> InfinitudeCertificate | None:
    """Certify infinitely many conjugacy classes of solutions (coefficient-free), or give up."""
    if sys.has_coefficients:
        raise PreconditionError("counting orbits needs a coefficient-free system")
    return InfinitudeSearch(sys, ctx, as_budget(budget), MODE_ORBITS).run()
