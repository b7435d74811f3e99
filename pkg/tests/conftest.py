from __future__ import annotations

import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from groupeq.eqsys import EquationSystem  # noqa: E402
from groupeq.group_core import GroupContext, Letter, Word, parse_word  # noqa: E402

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

F2 = GroupContext.free("a", "b")
COEFFS = ("a", "b")


def W(text: str, alphabet=("a", "b", "x1", "x2", "x3", "c", "t")) -> Word:
    return parse_word(text, set(alphabet))


def as_tuple(w: Word):
    return tuple((l.symbol, l.sign) for l in w.letters)


def from_tuple(t) -> Word:
    return Word(Letter(s, e) for s, e in t)


def system(variables, *, coefficients=False, eqs=(), neqs=(), clauses=()) -> EquationSystem:
    alphabet = set(variables) | (set(COEFFS) if coefficients else set())
    return EquationSystem(
        tuple(variables),
        COEFFS if coefficients else None,
        tuple(W(e, alphabet) for e in eqs),
        tuple(W(e, alphabet) for e in neqs),
        tuple(tuple(W(e, alphabet) for e in c) for c in clauses),
    )


def words(alphabet=("a", "b"), max_size=6):
    letters = st.sampled_from([Letter(s, e) for s in alphabet for e in (1, -1)])
    return st.lists(letters, max_size=max_size).map(Word)


@pytest.fixture
def f2():
    return F2


def pytest_terminal_summary(terminalreporter):
    results = sys.modules.get("test_acceptance")
    if results is None or not results.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results.RESULTS):
        terminalreporter.write_line(results.RESULTS[number])
