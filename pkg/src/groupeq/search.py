"""Bounded solution search, simultaneous conjugacy and the satisfiability oracle.

Enumeration order is lexicographic over assignment tuples, each
coordinate ordered shortlex, so every stream is deterministic.
"""
from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence

import numpy as np

from . import kernels
from .eqsys import Assignment, EquationSystem, is_solution
from .errors import ContradictionError, PreconditionError
from .group_core import (
    UNDECIDED,
    Backend,
    GroupContext,
    Word,
    cyclic_reduce,
    free_centralizer_root,
    free_conjugator,
    primitive_root,
    solve_integer_system,
)

CHUNK = 8192


@dataclass(frozen=True)
class SearchBudget:
    variable_radius: int = 3
    step_cap: int = 2_000_000
    conjugator_radius: int = 4
    rounds: int = 4
    seconds: float | None = None
    family_size: int = 3
    skip_budget: int = 32

    def __post_init__(self):
        for name in ("variable_radius", "step_cap", "conjugator_radius", "rounds", "family_size", "skip_budget"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.seconds is not None and self.seconds < 0:
            raise ValueError("seconds must be non-negative")

    def deadline(self) -> float | None:
        return None if self.seconds is None else time.monotonic() + self.seconds


def as_budget(budget) -> SearchBudget:
    if budget is None:
        return SearchBudget()
    if isinstance(budget, SearchBudget):
        return budget
    return SearchBudget(conjugator_radius=int(budget))


def past(deadline: float | None) -> bool:
    return deadline is not None and time.monotonic() > deadline


# -- enumeration -------------------------------------------------------------


@dataclass(frozen=True)
class ExhaustionMarker:
    radius: int
    truncated: bool
    checked: int
    total: int


class SolutionStream:
    """Lazily yields solutions; ``marker`` is set once the stream is drained."""

    def __init__(self, sys: EquationSystem, ctx: GroupContext, budget: SearchBudget,
                 deadline: float | None = None):
        self.sys = sys
        self.ctx = ctx
        self.budget = budget
        self.deadline = deadline if deadline is not None else budget.deadline()
        self.marker: ExhaustionMarker | None = None
        self._gen = self._run()

    def __iter__(self) -> Iterator[Assignment]:
        return self._gen

    def __next__(self) -> Assignment:
        return next(self._gen)

    def collect(self) -> list[Assignment]:
        return list(self._gen)

    def _run(self) -> Iterator[Assignment]:
        sys, ctx = self.sys, self.ctx
        radius = self.budget.variable_radius
        ball = ctx.ball(radius)
        n = len(sys.variables)
        total = len(ball) ** n
        limit = min(total, self.budget.step_cap)
        if ctx.backend is Backend.FREE:
            checked = yield from self._run_kernel(ball, limit)
        else:
            checked = yield from self._run_python(ball, limit)
        self.marker = ExhaustionMarker(radius, checked < total, checked, total)

    def _run_kernel(self, ball: list[Word], limit: int):
        sys, ctx = self.sys, self.ctx
        n_gens = len(ctx.generators)
        codes = {g: i + 1 for i, g in enumerate(ctx.generators)}
        for j, x in enumerate(sys.variables):
            codes[x] = n_gens + 1 + j
        terms, roles = system_terms(sys)
        ball_letters, ball_lens = kernels.encode_words(ball, codes)
        tokens, starts, ends, role_arr = kernels.encode_terms(terms, roles, codes)
        maxlen = int(ball_lens.max()) if len(ball) else 0
        stack_size = max((len(t) for t in terms), default=0) * max(maxlen, 1) + 1
        n = len(sys.variables)
        out = np.zeros(CHUNK, dtype=np.uint8)
        first = 0
        while first < limit:
            count = min(CHUNK, limit - first)
            kernels.check_candidates(first, count, n, ball_letters, ball_lens, tokens,
                                     starts, ends, role_arr, len(sys.clauses), n_gens,
                                     stack_size, out)
            for i in np.flatnonzero(out[:count]):
                yield Assignment(sys.variables, decode_candidate(first + int(i), n, ball))
            first += count
            if past(self.deadline):
                break
        return first

    def _run_python(self, ball: list[Word], limit: int):
        sys, ctx = self.sys, self.ctx
        checked = 0
        for values in itertools.product(ball, repeat=len(sys.variables)):
            if checked >= limit:
                break
            checked += 1
            asg = Assignment(sys.variables, values)
            if is_solution(sys, asg, ctx):
                yield asg
            if checked % 1024 == 0 and past(self.deadline):
                break
        return checked


def system_terms(sys: EquationSystem) -> tuple[list[Word], list[int]]:
    terms: list[Word] = []
    roles: list[int] = []
    for w in sys.equations:
        terms.append(w)
        roles.append(kernels.EQ)
    for w in sys.inequations:
        terms.append(w)
        roles.append(kernels.NEQ)
    for c, clause in enumerate(sys.clauses):
        for w in clause:
            terms.append(w)
            roles.append(kernels.CLAUSE + c)
    return terms, roles


def decode_candidate(index: int, n: int, ball: Sequence[Word]) -> tuple[Word, ...]:
    digits = []
    for _ in range(n):
        index, d = divmod(index, len(ball))
        digits.append(ball[d])
    return tuple(reversed(digits))


def enumerate_solutions(sys: EquationSystem, ctx: GroupContext, budget: SearchBudget | None = None,
                        deadline: float | None = None) -> SolutionStream:
    return SolutionStream(sys, ctx, as_budget(budget), deadline)


# -- conjugacy ---------------------------------------------------------------


def _power_conjugator(root: Word, a: Word, w: Word) -> int | None:
    """The unique ``k`` with ``root^k a root^-k == w`` (``a`` not commuting with ``root``)."""
    core, c = cyclic_reduce(root)
    a1 = c.inverse() * a * c
    w1 = c.inverse() * w * c
    bound = len(a1) + len(w1) + 2
    for k in range(bound + 1):
        for s in ((k,) if k == 0 else (k, -k)):
            p = core ** s
            if p * a1 * p.inverse() == w1:
                return s
    return None


def free_simultaneous_conjugator(u: Sequence[Word], v: Sequence[Word]) -> Word | None:
    idx = next((i for i, a in enumerate(u) if a), None)
    if idx is None:
        return Word.identity() if not any(v) else None
    g0 = free_conjugator(u[idx], v[idx])
    if g0 is None:
        return None
    root = free_centralizer_root(u[idx])
    k_fixed: int | None = None
    for a, b in zip(u, v):
        target = g0.inverse() * b * g0
        if not (root * a * root.inverse() * a.inverse()):
            if a != target:
                return None
            continue
        k = _power_conjugator(root, a, target)
        if k is None or (k_fixed is not None and k != k_fixed):
            return None
        k_fixed = k
    return g0 * root ** (k_fixed or 0)


def simultaneous_conjugacy(u: Sequence[Word], v: Sequence[Word], ctx: GroupContext, budget=None):
    """``g`` with ``g u_i g^-1 = v_i`` for all ``i``, ``None``, or ``UNDECIDED``."""
    u, v = tuple(u), tuple(v)
    if len(u) != len(v) or not u:
        raise PreconditionError("simultaneous conjugacy needs two tuples of equal positive length")
    if ctx.backend is Backend.FREE:
        return free_simultaneous_conjugator(u, v)
    budget = as_budget(budget)
    for a, b in zip(u, v):
        if ctx.abelian_key(a) != ctx.abelian_key(b) or ctx.is_trivial(a) != ctx.is_trivial(b):
            return None
    for g in ctx.ball(budget.conjugator_radius):
        gi = g.inverse()
        if all(ctx.equal(g * a * gi, b) for a, b in zip(u, v)):
            return g
    return UNDECIDED


def assignments_conjugate(s: Assignment, t: Assignment, ctx: GroupContext, budget=None):
    return simultaneous_conjugacy(s.values, t.values, ctx, budget)


@dataclass
class DedupResult:
    representatives: list[Assignment]
    undecided_pairs: list[tuple[Assignment, Assignment]] = field(default_factory=list)


def dedup_orbits_report(sols: Sequence[Assignment], ctx: GroupContext, budget=None) -> DedupResult:
    key = ctx.word_key
    reps: list[Assignment] = []
    undecided = []
    for s in sols:
        for i, r in enumerate(reps):
            g = assignments_conjugate(r, s, ctx, budget)
            if g is UNDECIDED:
                undecided.append((r, s))
                continue
            if g is not None:
                if s.key(key) < r.key(key):
                    reps[i] = s
                break
        else:
            reps.append(s)
    return DedupResult(reps, undecided)


def dedup_orbits(sols: Sequence[Assignment], ctx: GroupContext, budget=None) -> list[Assignment]:
    """One shortlex-least representative per simultaneous-conjugacy class."""
    return dedup_orbits_report(sols, ctx, budget).representatives


# -- satisfiability oracle ------------------------------------------------------


class VerdictKind(str, enum.Enum):
    SATISFIABLE = "satisfiable"
    UNSATISFIABLE = "unsatisfiable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class OracleVerdict:
    kind: VerdictKind
    witness: Assignment | None = None
    reason: str = ""

    @classmethod
    def satisfiable(cls, witness: Assignment) -> "OracleVerdict":
        return cls(VerdictKind.SATISFIABLE, witness, "solution found")

    @classmethod
    def unsatisfiable(cls, reason: str) -> "OracleVerdict":
        return cls(VerdictKind.UNSATISFIABLE, None, reason)

    @classmethod
    def unknown(cls, reason: str) -> "OracleVerdict":
        return cls(VerdictKind.UNKNOWN, None, reason)


Oracle = Callable[[EquationSystem, GroupContext, SearchBudget], OracleVerdict]


@dataclass
class Reduction:
    """A system simplified by root extraction and variable elimination.

    ``eliminated`` lists ``(variable, expression)`` in elimination order;
    the expression may mention variables eliminated later.
    """

    original: EquationSystem
    system: EquationSystem
    eliminated: list[tuple[str, Word]]

    def lift(self, asg: Assignment) -> Assignment:
        values = asg.as_dict()
        for x, expr in reversed(self.eliminated):
            values[x] = expr.substitute(values)
        return Assignment.from_mapping(self.original.variables, values)


class Refuted(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def extract_roots(sys: EquationSystem) -> EquationSystem:
    """Replace each equation ``u^n`` (up to cyclic rotation, ``n >= 2``) by ``u``.

    Sound in torsion-free groups, where ``u^n = 1`` forces ``u = 1``.
    """
    eqs = []
    changed = False
    for w in sys.equations:
        core, _ = cyclic_reduce(w)
        root, m = primitive_root(core)
        if m >= 2:
            changed = True
            eqs.append(root)
        else:
            eqs.append(w)
    if not changed:
        return sys
    return replace(sys, equations=tuple(eqs))


def _eliminable(sys: EquationSystem) -> tuple[int, str] | None:
    for i, w in enumerate(sys.equations):
        for x in sys.variables:
            if w.occurrences(x) == 1:
                return i, x
    return None


def reduce_system(sys: EquationSystem, ctx: GroupContext) -> Reduction:
    """Simplify ``sys``; raise :class:`Refuted` when a sound contradiction appears."""
    eliminated: list[tuple[str, Word]] = []
    current = sys
    try:
        while True:
            current = extract_roots(current)
            _check_closed_terms(current, ctx)
            hit = _eliminable(current)
            if hit is None:
                break
            i, x = hit
            w = current.equations[i]
            pos = next(p for p, l in enumerate(w.letters) if l.symbol == x)
            rot = Word(w.letters[pos:] + w.letters[:pos])
            sign = rot.letters[0].sign
            rest = rot[1:]
            expr = rest.inverse() if sign > 0 else rest
            eliminated.append((x, expr))
            others = current.equations[:i] + current.equations[i + 1:]
            remaining = tuple(y for y in current.variables if y != x)
            current = replace(current, equations=others)
            current = current.substitute({x: expr}, variables=remaining)
    except ContradictionError as exc:
        raise Refuted(f"free contradiction: {exc}") from None
    _check_abelianization(current, ctx)
    return Reduction(sys, current, eliminated)


def _check_closed_terms(sys: EquationSystem, ctx: GroupContext) -> None:
    vars_ = set(sys.variables)
    for w in sys.equations:
        if not (w.symbols() & vars_) and not ctx.is_trivial(w):
            raise Refuted(f"variable-free equation {w} is non-trivial")
    for w in sys.inequations:
        if not (w.symbols() & vars_) and ctx.is_trivial(w):
            raise Refuted(f"variable-free inequation {w} is trivial")
    for clause in sys.clauses:
        if all(not (w.symbols() & vars_) and ctx.is_trivial(w) for w in clause):
            raise Refuted("a clause has only trivial members")


def abelianization_solvable(sys: EquationSystem, ctx: GroupContext) -> bool:
    """Whether the equations have a solution in the abelianization of the group.

    Unknowns: an exponent vector per variable and, per equation, a
    combination of group relators absorbing the difference.
    """
    if not sys.has_coefficients or not sys.equations:
        return True
    gens = list(ctx.generators)
    rel_matrix = ctx.presentation.exponent_matrix()
    n, k, m = len(sys.variables), len(gens), len(rel_matrix)
    eqs = sys.equations
    n_unknowns = n * k + len(eqs) * m
    rows, rhs = [], []
    for e_idx, w in enumerate(eqs):
        var_sums = [w.exponent_sum(x) for x in sys.variables]
        for g_idx, g in enumerate(gens):
            row = [0] * n_unknowns
            for j in range(n):
                row[j * k + g_idx] = var_sums[j]
            for r in range(m):
                row[n * k + e_idx * m + r] = -rel_matrix[r][g_idx]
            rows.append(row)
            rhs.append(-w.exponent_sum(g))
    return solve_integer_system(rows, rhs, n_unknowns) is not None


def _check_abelianization(sys: EquationSystem, ctx: GroupContext) -> None:
    if not abelianization_solvable(sys, ctx):
        raise Refuted("no solution in the abelianization")


def refute(sys: EquationSystem, ctx: GroupContext) -> str | None:
    try:
        reduce_system(sys, ctx)
    except Refuted as exc:
        return exc.reason
    return None


def find_solution(sys: EquationSystem, ctx: GroupContext, budget: SearchBudget,
                  deadline: float | None = None) -> tuple[Assignment | None, Reduction | None, str | None]:
    """Search the reduced system; return ``(witness, reduction, refutation)``."""
    try:
        red = reduce_system(sys, ctx)
    except Refuted as exc:
        return None, None, exc.reason
    for asg in enumerate_solutions(red.system, ctx, budget, deadline):
        lifted = red.lift(asg)
        if is_solution(sys, lifted, ctx):
            return lifted, red, None
    return None, red, None


def satisfiability_oracle(sys: EquationSystem, ctx: GroupContext, budget=None) -> OracleVerdict:
    """Three-valued: a verified witness, a sound refutation, or unknown."""
    budget = as_budget(budget)
    witness, _, reason = find_solution(sys, ctx, budget)
    if reason is not None:
        return OracleVerdict.unsatisfiable(reason)
    if witness is not None:
        return OracleVerdict.satisfiable(witness)
    return OracleVerdict.unknown(f"no solution within radius {budget.variable_radius}")


def iter_solutions(sys: EquationSystem, ctx: GroupContext, budget: SearchBudget,
                   deadline: float | None = None) -> Iterator[Assignment]:
    """Verified solutions of ``sys`` found by searching its reduced form."""
    try:
        red = reduce_system(sys, ctx)
    except Refuted:
        return
    for asg in enumerate_solutions(red.system, ctx, budget, deadline):
        lifted = red.lift(asg)
        if is_solution(sys, lifted, ctx):
            yield lifted
