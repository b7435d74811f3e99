import random

import pytest
from conftest import F2, W, as_tuple, from_tuple, system
from oracles import bounded_simultaneous_conjugator, freely_conjugate, naive_solutions

from groupeq.eqsys import Assignment, is_solution
from groupeq.errors import PreconditionError
from groupeq.group_core import UNDECIDED, GroupContext
from groupeq.search import (
    SearchBudget,
    VerdictKind,
    abelianization_solvable,
    dedup_orbits,
    dedup_orbits_report,
    enumerate_solutions,
    reduce_system,
    refute,
    satisfiability_oracle,
    simultaneous_conjugacy,
)


def values(stream):
    return [tuple(a.values) for a in stream]


def tup(*texts):
    return tuple(W(t) for t in texts)


class TestEnumerate:
    def test_unique_square_root(self):
        sys = system(["x1"], coefficients=True, eqs=["x1^2 a^-2"])
        assert values(enumerate_solutions(sys, F2, SearchBudget(variable_radius=4))) == [tup("a")]

    def test_centralizer_in_shortlex_order(self):
        sys = system(["x1"], coefficients=True, eqs=["[x1,a]"], neqs=["x1"])
        got = values(enumerate_solutions(sys, F2, SearchBudget(variable_radius=3)))
        assert got == [tup(w) for w in ("a", "a^-1", "a^2", "a^-2", "a^3", "a^-3")]

    def test_contradictory(self):
        sys = system(["x1"], eqs=["x1"], neqs=["x1"])
        stream = enumerate_solutions(sys, F2, SearchBudget(variable_radius=2))
        assert stream.collect() == []
        assert stream.marker.truncated is False
        assert stream.marker.total == 17

    def test_step_cap_marks_truncation(self):
        sys = system(["x1", "x2"])
        stream = enumerate_solutions(sys, F2, SearchBudget(variable_radius=2, step_cap=10))
        assert len(stream.collect()) == 10
        assert stream.marker.truncated and stream.marker.checked == 10

    def test_radius_zero(self):
        sys = system(["x1"], eqs=["x1"])
        assert values(enumerate_solutions(sys, F2, SearchBudget(variable_radius=0))) == [tup("1")]

    def test_matches_naive_filter(self):
        rng = random.Random(3)
        for _ in range(15):
            sys = _random_system(rng)
            got = {tuple(as_tuple(v) for v in a.values)
                   for a in enumerate_solutions(sys, F2, SearchBudget(variable_radius=2))}
            expected = naive_solutions(sys.variables, [as_tuple(t) for t in sys.equations],
                                       [as_tuple(t) for t in sys.inequations], ("a", "b"), 2)
            assert got == expected

    def test_dehn_backend(self):
        z2 = GroupContext.dehn(("a", "b"), (W("[a,b]"),))
        sys = system(["x1"], coefficients=True, eqs=["[x1,a]"], neqs=["x1"])
        sols = enumerate_solutions(sys, z2, SearchBudget(variable_radius=1)).collect()
        # every nontrivial element of Z^2 commutes with a
        assert len(sols) == 4
        assert all(is_solution(sys, s, z2) for s in sols)


def _random_system(rng):
    n = rng.randint(1, 2)
    variables = ["x1", "x2"][:n]
    letters = variables + ["a", "b"]

    def term():
        return " ".join(f"{rng.choice(letters)}^{rng.choice([1, -1])}" for _ in range(rng.randint(1, 4)))

    eqs = [term() for _ in range(rng.randint(0, 2))]
    neqs = [term() for _ in range(rng.randint(0, 1))]
    return system(variables, coefficients=True, eqs=eqs, neqs=neqs)


class TestSimultaneousConjugacy:
    def test_second_coordinate_conjugated(self):
        assert simultaneous_conjugacy(tup("a", "b"), tup("a", "a b a^-1"), F2) == W("a")

    def test_swapped(self):
        assert simultaneous_conjugacy(tup("a", "b"), tup("b", "a"), F2) is None

    def test_centralizing_conjugator(self):
        # a^-1 conjugates a b to b a and also fixes a
        assert simultaneous_conjugacy(tup("a b", "a"), tup("b a", "a"), F2) == W("a^-1")

    def test_no_common_conjugator(self):
        us, vs = tup("a b", "b a"), tup("b a", "a b")
        assert simultaneous_conjugacy(us, vs, F2) is None
        assert bounded_simultaneous_conjugator([as_tuple(u) for u in us], [as_tuple(v) for v in vs], ("a", "b"), 5) is None

    def test_trivial_tuples(self):
        with pytest.raises(PreconditionError):
            simultaneous_conjugacy((), (), F2)
        assert simultaneous_conjugacy(tup("1"), tup("1"), F2) == W("1")

    def test_random_positive_and_negative(self):
        rng = random.Random(5)
        letters = [("a", 1), ("a", -1), ("b", 1), ("b", -1)]
        for _ in range(60):
            n = rng.randint(1, 3)
            us = tuple(from_tuple([rng.choice(letters) for _ in range(rng.randint(0, 4))]) for _ in range(n))
            g = from_tuple([rng.choice(letters) for _ in range(rng.randint(0, 4))])
            vs = tuple(g * u * g.inverse() for u in us)
            h = simultaneous_conjugacy(us, vs, F2)
            assert h is not None and h is not UNDECIDED
            assert all(h * u * h.inverse() == v for u, v in zip(us, vs))
            ws = tuple(from_tuple([rng.choice(letters) for _ in range(rng.randint(0, 4))]) for _ in range(n))
            if any(not freely_conjugate(as_tuple(u), as_tuple(w)) for u, w in zip(us, ws)):
                assert simultaneous_conjugacy(us, ws, F2) is None

    def test_dehn_backend(self):
        surface = GroupContext.dehn(("a", "b", "c", "d"), (W("[a,b][c,d]", "abcd"),))
        u = (W("a", "abcd"), W("b", "abcd"))
        g = W("c d", "abcd")
        v = tuple(g * x * g.inverse() for x in u)
        h = simultaneous_conjugacy(u, v, surface, SearchBudget(conjugator_radius=2))
        assert h is not None and h is not UNDECIDED
        assert all(surface.equal(h * x * h.inverse(), y) for x, y in zip(u, v))


class TestDedup:
    def pair(self, x, y):
        return Assignment(("x1", "x2"), tup(x, y))

    def test_conjugate_pair_collapses(self):
        sols = [self.pair("a", "b"), self.pair("a", "a b a^-1")]
        assert dedup_orbits(sols, F2) == [self.pair("a", "b")]

    def test_distinct_orbits_kept(self):
        sols = [self.pair("a", "b"), self.pair("b", "a")]
        assert dedup_orbits(sols, F2) == sols

    def test_empty(self):
        assert dedup_orbits([], F2) == []
        assert dedup_orbits_report([], F2).undecided_pairs == []


class TestOracle:
    def test_abelianization_refutes(self):
        sys = system(["x1"], coefficients=True, eqs=["x1 a x1^-1 b^-1"])
        verdict = satisfiability_oracle(sys, F2, SearchBudget(variable_radius=3))
        assert verdict.kind is VerdictKind.UNSATISFIABLE
        assert naive_solutions(("x1",), [as_tuple(W("x1 a x1^-1 b^-1"))], [], ("a", "b"), 3) == set()

    def test_satisfiable_centralizer(self):
        sys = system(["x1"], coefficients=True, eqs=["[x1,a]"], neqs=["x1"])
        verdict = satisfiability_oracle(sys, F2)
        assert verdict.kind is VerdictKind.SATISFIABLE
        assert verdict.witness == Assignment(("x1",), tup("a"))

    def test_unknown_when_abelianization_passes(self):
        sys = system(["x1"], coefficients=True, eqs=["x1^2 a^-2 b^-2"])
        assert abelianization_solvable(sys, F2) is False or refute(sys, F2) is None
        verdict = satisfiability_oracle(sys, F2, SearchBudget(variable_radius=4))
        assert verdict.kind is not VerdictKind.SATISFIABLE

    def test_parity_refutation(self):
        f1 = GroupContext.free("a")
        sys = system(["x1"], coefficients=True, eqs=["x1^2 a^-1"])
        sys = type(sys)(sys.variables, ("a",), sys.equations)
        assert satisfiability_oracle(sys, f1).kind is VerdictKind.UNSATISFIABLE

    def test_reduction_lifts_witness(self):
        sys = system(["x1", "x2"], coefficients=True, eqs=["x2 a^-1 x1^-1", "[x1,b]"], neqs=["x1"])
        red = reduce_system(sys, F2)
        assert len(red.system.variables) < 2
        verdict = satisfiability_oracle(sys, F2)
        assert verdict.kind is VerdictKind.SATISFIABLE
        assert is_solution(sys, verdict.witness, F2)

    def test_free_triviality_refutation(self):
        sys = system(["x1"], coefficients=True, eqs=["x1 a^-1"], neqs=["x1 a^-1"])
        assert refute(sys, F2) is not None

    @pytest.mark.parametrize("eq", ["x1^2", "x1^3"])
    def test_root_extraction(self, eq):
        sys = system(["x1"], eqs=[eq], neqs=["x1"])
        assert satisfiability_oracle(sys, F2).kind is VerdictKind.UNSATISFIABLE
