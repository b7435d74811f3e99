"""Systems of equations and inequations, assignments and evaluation.

A system lives in the free group on the variables, or (with
coefficients) in the free product of that with the free group on the
group's generators.  Besides plain inequations it carries disjunctive
clauses: at least one member of every clause must be non-trivial.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    AlphabetError,
    ContradictionError,
    ParseError,
    UnboundVariableError,
)
from .group_core import GroupContext, GroupPresentation, Word, format_word, parse_word
from .group_core.parsing import iter_directives, parse_names


@dataclass(frozen=True, order=False)
class Assignment:
    """A total map from an ordered variable list to group words."""

    variables: tuple[str, ...]
    values: tuple[Word, ...]

    def __post_init__(self):
        if len(self.variables) != len(self.values):
            raise ValueError("variables and values differ in length")
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "values", tuple(Word(v) if not isinstance(v, Word) else v for v in self.values))

    @classmethod
    def from_mapping(cls, variables: Sequence[str], mapping: Mapping[str, Word]) -> "Assignment":
        missing = [x for x in variables if x not in mapping]
        if missing:
            raise UnboundVariableError(f"no value for {missing}")
        return cls(tuple(variables), tuple(mapping[x] for x in variables))

    def __getitem__(self, name: str) -> Word:
        return self.values[self.variables.index(name)]

    def __iter__(self) -> Iterator[Word]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def as_dict(self) -> dict[str, Word]:
        return dict(zip(self.variables, self.values))

    def conjugate(self, g: Word) -> "Assignment":
        return Assignment(self.variables, tuple(g * v * g.inverse() for v in self.values))

    def key(self, word_key) -> tuple:
        return tuple(word_key(v) for v in self.values)

    def to_json(self) -> dict[str, str]:
        return {x: format_word(v) for x, v in zip(self.variables, self.values)}

    def __str__(self) -> str:
        return ", ".join(f"{x} -> {format_word(v)}" for x, v in zip(self.variables, self.values))


def _check_symbols(w: Word, allowed: set[str], what: str) -> None:
    bad = w.symbols() - allowed
    if bad:
        raise AlphabetError(f"{what} {format_word(w)} uses undeclared symbols {sorted(bad)}")


@dataclass(frozen=True)
class EquationSystem:
    variables: tuple[str, ...]
    coefficients: tuple[str, ...] | None = None
    equations: tuple[Word, ...] = ()
    inequations: tuple[Word, ...] = ()
    clauses: tuple[tuple[Word, ...], ...] = ()
    constants: tuple[str, ...] = ()
    """Group letters allowed in constraint terms of a coefficient-free system."""
    _alphabet: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        variables = tuple(self.variables)
        if len(set(variables)) != len(variables):
            raise AlphabetError(f"duplicate variables in {variables}")
        coeffs = None if self.coefficients is None else tuple(self.coefficients)
        if coeffs is not None and set(coeffs) & set(variables):
            raise AlphabetError("variables and coefficient generators must be disjoint")
        constants = tuple(self.constants)
        if set(constants) & set(variables):
            raise AlphabetError("variables and constants must be disjoint")
        allowed = set(variables) | set(coeffs or ()) | set(constants)
        eqs = []
        for w in self.equations:
            _check_symbols(w, allowed, "equation")
            if w:
                eqs.append(w)
        neqs = []
        for w in self.inequations:
            _check_symbols(w, allowed, "inequation")
            if not w:
                raise ContradictionError("an inequation is freely trivial")
            neqs.append(w)
        clauses = []
        for clause in self.clauses:
            members = []
            for w in clause:
                _check_symbols(w, allowed, "clause member")
                if w:
                    members.append(w)
            if not members:
                raise ContradictionError("a disjunctive clause has no non-trivial member")
            clauses.append(tuple(members))
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "equations", tuple(eqs))
        object.__setattr__(self, "inequations", tuple(neqs))
        object.__setattr__(self, "clauses", tuple(clauses))
        object.__setattr__(self, "constants", constants)
        object.__setattr__(self, "_alphabet", frozenset(allowed))

    @property
    def has_coefficients(self) -> bool:
        return self.coefficients is not None

    @property
    def alphabet(self) -> frozenset:
        return self._alphabet

    def terms(self) -> Iterator[Word]:
        yield from self.equations
        yield from self.inequations
        for clause in self.clauses:
            yield from clause

    def with_constraints(
        self,
        equations: Iterable[Word] = (),
        inequations: Iterable[Word] = (),
        clauses: Iterable[Sequence[Word]] = (),
    ) -> "EquationSystem":
        return replace(
            self,
            equations=self.equations + tuple(equations),
            inequations=self.inequations + tuple(inequations),
            clauses=self.clauses + tuple(tuple(c) for c in clauses),
        )

    def substitute(self, images: Mapping[str, Word], variables: Sequence[str] | None = None) -> "EquationSystem":
        """Apply a substitution to every term; ``variables`` replaces the variable list."""
        imgs = dict(images)
        return EquationSystem(
            tuple(self.variables if variables is None else variables),
            self.coefficients,
            tuple(w.substitute(imgs) for w in self.equations),
            tuple(w.substitute(imgs) for w in self.inequations),
            tuple(tuple(w.substitute(imgs) for w in c) for c in self.clauses),
            self.constants,
        )

    def to_text(self) -> str:
        lines = ["vars: " + " ".join(self.variables)]
        lines.append(f"coefficients: {'yes' if self.has_coefficients else 'no'}")
        lines.extend(f"eq: {format_word(w)}" for w in self.equations)
        lines.extend(f"neq: {format_word(w)}" for w in self.inequations)
        lines.extend("neq-any: " + " | ".join(format_word(w) for w in c) for c in self.clauses)
        return "\n".join(lines) + "\n"


def evaluate(t: Word, asg: Assignment | Mapping[str, Word], ctx: GroupContext | None = None) -> Word:
    """Substitute variable values into ``t``; coefficient letters stay verbatim."""
    images = asg.as_dict() if isinstance(asg, Assignment) else dict(asg)
    if ctx is not None:
        unbound = t.symbols() - set(images) - set(ctx.generators)
        if unbound:
            raise UnboundVariableError(f"unbound variables {sorted(unbound)}")
    return t.substitute(images)


def is_solution(sys: EquationSystem, asg: Assignment, ctx: GroupContext) -> bool:
    images = asg.as_dict()
    if set(images) != set(sys.variables):
        raise UnboundVariableError("assignment does not cover exactly the system's variables")
    for w in sys.equations:
        if not ctx.is_trivial(w.substitute(images)):
            return False
    for w in sys.inequations:
        if ctx.is_trivial(w.substitute(images)):
            return False
    for clause in sys.clauses:
        if all(ctx.is_trivial(w.substitute(images)) for w in clause):
            return False
    return True


def presentation_of_H(sys: EquationSystem, ctx: GroupContext | None = None):
    """``(presentation, coefficient_generators)`` of the group whose maps to the
    target group parameterize solutions.  The target's own relators are not added."""
    coeffs: tuple[str, ...] = ()
    if sys.has_coefficients:
        coeffs = tuple(ctx.generators) if ctx is not None else tuple(sys.coefficients)
    return GroupPresentation(tuple(sys.variables) + coeffs, tuple(sys.equations)), coeffs


def not_on_list_constraint(sys: EquationSystem, listed: Iterable[Assignment]) -> EquationSystem:
    """Extend ``sys`` so that none of the listed assignments remains a solution."""
    clauses = []
    letters: set[str] = set()
    for asg in listed:
        clauses.append(tuple(Word.gen(x) * asg[x].inverse() for x in sys.variables))
        for v in asg.values:
            letters |= v.symbols()
    if not clauses:
        return sys
    extra = sorted(letters - sys.alphabet)
    if extra:
        sys = replace(sys, constants=sys.constants + tuple(extra))
    return sys.with_constraints(clauses=clauses)


def parse_system(text: str, ctx: GroupContext | None = None) -> EquationSystem:
    variables: list[str] | None = None
    coeff_flag: bool | None = None
    pending: list[tuple[str, int, str, int]] = []
    for line, key, value, col in iter_directives(text):
        if key == "vars":
            if variables is not None:
                raise ParseError("variables declared twice", line, col)
            variables = parse_names(value, line, col)
        elif key == "coefficients":
            v = value.lower()
            if v not in ("yes", "no"):
                raise ParseError("coefficients must be 'yes' or 'no'", line, col)
            coeff_flag = v == "yes"
        elif key in ("eq", "neq", "neq-any"):
            pending.append((key, line, value, col))
        else:
            raise ParseError(f"unknown directive {key!r}", line, 1)
    if variables is None:
        raise ParseError("missing 'vars:' line")
    if coeff_flag is None:
        raise ParseError("missing 'coefficients:' line")
    coeffs: tuple[str, ...] | None = None
    if coeff_flag:
        if ctx is None:
            raise ParseError("a system with coefficients needs a group")
        coeffs = tuple(ctx.generators)
        clash = set(coeffs) & set(variables)
        if clash:
            raise ParseError(f"variables clash with group generators: {sorted(clash)}")
    alphabet = set(variables) | set(coeffs or ())
    eqs, neqs, clauses = [], [], []
    for key, line, value, col in pending:
        if key == "neq-any":
            members = []
            offset = 0
            for part in value.split("|"):
                lead = len(part) - len(part.lstrip())
                members.append(parse_word(part.strip(), alphabet, line=line, column=col + offset + lead))
                offset += len(part) + 1
            clauses.append(tuple(members))
        else:
            w = parse_word(value, alphabet, line=line, column=col)
            (eqs if key == "eq" else neqs).append(w)
    try:
        return EquationSystem(tuple(variables), coeffs, tuple(eqs), tuple(neqs), tuple(clauses))
    except (AlphabetError, ContradictionError) as exc:
        raise ParseError(str(exc)) from exc
