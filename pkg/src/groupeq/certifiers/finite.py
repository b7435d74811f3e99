"""Listing procedures for systems with finitely many solutions or orbits.

Both loops ask an oracle for a solution avoiding everything found so far.
A refutation proves the list complete; an inconclusive answer ends the
run with the list found so far and the search radius that was exhausted.
"""
from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .. import kernels
from ..eqsys import Assignment, EquationSystem, is_solution, not_on_list_constraint
from ..errors import ContradictionError, PreconditionError
from ..group_core import Backend, GroupContext, Word, format_word
from ..search import (
    OracleVerdict,
    SearchBudget,
    VerdictKind,
    as_budget,
    dedup_orbits,
    iter_solutions,
    past,
    refute,
    satisfiability_oracle,
    simultaneous_conjugacy,
)

DEFAULT_BALL_K = 8
BALL_CAP = 200_000

Oracle = Callable[[EquationSystem, GroupContext, SearchBudget], OracleVerdict]


class FinitenessVerdict(str, enum.Enum):
    COMPLETE_BY_ORACLE = "complete-by-oracle"
    EXHAUSTED_BUDGET = "exhausted-budget"


@dataclass
class FinitenessReport:
    mode: str
    items: list[Assignment]
    verdict: FinitenessVerdict
    radius: int | None = None
    """Search radius that was exhausted (only for ``EXHAUSTED_BUDGET``)."""
    reason: str = ""
    forced_subsets_visited: list[str] = field(default_factory=list)
    oracle_calls: int = 0

    @property
    def complete(self) -> bool:
        return self.verdict is FinitenessVerdict.COMPLETE_BY_ORACLE

    def verdict_label(self) -> str:
        if self.complete:
            return self.verdict.value
        return f"{self.verdict.value}({self.radius})"

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "verdict": self.verdict.value,
            "radius": self.radius,
            "reason": self.reason,
            "items": [a.to_json() for a in self.items],
            "forced_subsets_visited": list(self.forced_subsets_visited),
            "oracle_calls": self.oracle_calls,
        }


def _exhausted(mode, items, budget, reason, calls, forced=()) -> FinitenessReport:
    return FinitenessReport(mode, items, FinitenessVerdict.EXHAUSTED_BUDGET, budget.variable_radius,
                            reason, list(forced), calls)


def _complete(mode, items, reason, calls, forced=()) -> FinitenessReport:
    return FinitenessReport(mode, items, FinitenessVerdict.COMPLETE_BY_ORACLE, None, reason, list(forced), calls)


def check_finitely_many_solutions(sys: EquationSystem, ctx: GroupContext, oracle: Oracle | None = None,
                                  budget=None) -> FinitenessReport:
    """List solutions one oracle query at a time until the oracle refutes or gives up."""
    if not sys.has_coefficients:
        raise PreconditionError("listing solutions needs a system with coefficients")
    budget = as_budget(budget)
    oracle = oracle or satisfiability_oracle
    deadline = budget.deadline()
    found: list[Assignment] = []
    calls = 0
    while True:
        try:
            query = not_on_list_constraint(sys, found)
        except ContradictionError as exc:
            return _complete("solutions", found, f"structural: {exc}", calls)
        if past(deadline):
            return _exhausted("solutions", found, budget, "time budget spent", calls)
        calls += 1
        verdict = oracle(query, ctx, budget)
        if verdict.kind is VerdictKind.UNSATISFIABLE:
            return _complete("solutions", found, verdict.reason, calls)
        if verdict.kind is VerdictKind.UNKNOWN:
            return _exhausted("solutions", found, budget, verdict.reason, calls)
        witness = verdict.witness
        if not is_solution(query, witness, ctx):
            raise PreconditionError(f"oracle returned a non-solution {witness}")
        found.append(witness)


# -- ball forcing ----------------------------------------------------------------------


@dataclass(frozen=True)
class BallForcing:
    """The words of ``B_{F(X)}(k)`` a solution sends to the identity.

    ``trivial`` is ``S``; ``nontrivial`` is the rest of the ball.
    """

    k: int
    variables: tuple[str, ...]
    trivial: tuple[Word, ...]
    nontrivial: tuple[Word, ...]

    def forced_system(self, sys: EquationSystem) -> EquationSystem:
        """``Sigma_S = Sigma + S`` and ``Lambda_S = Lambda + (B - S)``."""
        return sys.with_constraints(equations=[w for w in self.trivial if w], inequations=self.nontrivial)

    def admits(self, sol: Assignment, sys: EquationSystem, ctx: GroupContext) -> bool:
        return is_solution(self.forced_system(sys), sol, ctx)

    def digest(self) -> str:
        text = "|".join(format_word(w) for w in self.trivial)
        return hashlib.sha256(f"{self.k};{','.join(self.variables)};{text}".encode()).hexdigest()[:16]


def _trivial_flags(words: Sequence[Word], sol: Assignment, ctx: GroupContext) -> list[bool]:
    if ctx.backend is not Backend.FREE:
        images = sol.as_dict()
        return [ctx.is_trivial(w.substitute(images)) for w in words]
    n_gens = len(ctx.generators)
    codes = {g: i + 1 for i, g in enumerate(ctx.generators)}
    for j, x in enumerate(sol.variables):
        codes[x] = n_gens + 1 + j
    value_letters, value_lens = kernels.encode_words(list(sol.values), codes)
    word_letters, word_lens = kernels.encode_words(list(words), codes)
    longest = int(value_lens.max()) if len(value_lens) else 0
    stack_size = int(word_lens.max(initial=0)) * max(longest, 1) + 1
    out = np.zeros(len(words), dtype=np.uint8)
    kernels.trivial_mask(value_letters, value_lens, word_letters, word_lens, n_gens, stack_size, out)
    return [bool(f) for f in out]


def force_ball_subset(sol: Assignment, sys: EquationSystem, k: int = DEFAULT_BALL_K,
                      ctx: GroupContext | None = None, cap: int = BALL_CAP) -> BallForcing:
    """The unique ``S`` in ``B_{F(X)}(k)`` whose forced system ``sol`` satisfies."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if ctx is None:
        raise PreconditionError("ball forcing needs a group context")
    ball = GroupContext.free(*sys.variables).ball(k, cap)
    flags = _trivial_flags(ball, sol, ctx)
    trivial = tuple(w for w, f in zip(ball, flags) if f)
    nontrivial = tuple(w for w, f in zip(ball, flags) if not f)
    return BallForcing(k, tuple(sys.variables), trivial, nontrivial)


# -- orbits --------------------------------------------------------------------------


def is_short(sol: Assignment, ctx: GroupContext, radius: int) -> bool:
    """No conjugate by an element of the radius ball is shortlex-smaller."""
    key = ctx.word_key
    own = sol.key(key)
    for g in ctx.ball(radius):
        if g and sol.conjugate(g).key(key) < own:
            return False
    return True


def default_short_oracle(sys: EquationSystem, ctx: GroupContext, budget: SearchBudget) -> OracleVerdict:
    """First solution in search order that is shortlex-least among its nearby conjugates."""
    reason = refute(sys, ctx)
    if reason is not None:
        return OracleVerdict.unsatisfiable(reason)
    for sol in iter_solutions(sys, ctx, budget, budget.deadline()):
        if is_short(sol, ctx, budget.conjugator_radius):
            return OracleVerdict.satisfiable(sol)
    return OracleVerdict.unknown(f"no short solution within radius {budget.variable_radius}")


def check_finitely_many_orbits(sys: EquationSystem, ctx: GroupContext, short_oracle: Oracle | None = None,
                               budget=None, ball_k: int = DEFAULT_BALL_K) -> FinitenessReport:
    """List one representative per conjugacy class of solutions.

    Every short solution found is excluded from later queries; it joins the
    list unless it is conjugate to a listed representative.  Each solution's
    forced ball subset is recorded as the branch it lives in.
    """
    if sys.has_coefficients:
        raise PreconditionError("listing orbits needs a coefficient-free system")
    budget = as_budget(budget)
    short_oracle = short_oracle or default_short_oracle
    deadline = budget.deadline()
    seen: list[Assignment] = []
    reps: list[Assignment] = []
    branches: list[str] = []
    calls = 0
    while True:
        try:
            query = not_on_list_constraint(sys, seen)
        except ContradictionError as exc:
            return _complete("orbits", _pare(reps, ctx, budget), f"structural: {exc}", calls, branches)
        if past(deadline):
            return _exhausted("orbits", _pare(reps, ctx, budget), budget, "time budget spent", calls, branches)
        calls += 1
        verdict = short_oracle(query, ctx, budget)
        if verdict.kind is VerdictKind.UNSATISFIABLE:
            return _complete("orbits", _pare(reps, ctx, budget), verdict.reason, calls, branches)
        if verdict.kind is VerdictKind.UNKNOWN:
            return _exhausted("orbits", _pare(reps, ctx, budget), budget, verdict.reason, calls, branches)
        sol = verdict.witness
        if not is_solution(query, sol, ctx):
            raise PreconditionError(f"short oracle returned a non-solution {sol}")
        seen.append(sol)
        forcing = force_ball_subset(sol, sys, ball_k, ctx)
        digest = forcing.digest()
        if digest not in branches:
            branches.append(digest)
        # an undecided comparison keeps the solution: completeness over uniqueness
        if not any(isinstance(simultaneous_conjugacy(r.values, sol.values, ctx, budget), Word) for r in reps):
            reps.append(sol)


def _pare(reps: list[Assignment], ctx: GroupContext, budget: SearchBudget) -> list[Assignment]:
    return dedup_orbits(reps, ctx, budget)
