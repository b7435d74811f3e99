"""Randomized invariants checked with hypothesis (derandomized profile in conftest)."""
import itertools
import json

from conftest import F2, W, as_tuple, system, words
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from oracles import (
    bounded_simultaneous_conjugator,
    determinantal_invariants,
    naive_solutions,
    reduce_letters,
)

from groupeq.certifiers import (
    check_finitely_many_orbits,
    check_finitely_many_solutions,
    force_ball_subset,
)
from groupeq.cli import run
from groupeq.eqsys import (
    Assignment,
    EquationSystem,
    evaluate,
    is_solution,
    not_on_list_constraint,
    presentation_of_H,
)
from groupeq.errors import ContradictionError
from groupeq.group_core import (
    UNDECIDED,
    GroupPresentation,
    Word,
    are_conjugate,
    ball,
    free_reduce,
    is_trivial,
    smith_normal_form,
)
from groupeq.immutable import ball_group
from groupeq.search import (
    SearchBudget,
    VerdictKind,
    dedup_orbits,
    enumerate_solutions,
    satisfiability_oracle,
    simultaneous_conjugacy,
)
from groupeq.splittings import (
    SplitKind,
    amalgam_approximation,
    base_quotient,
    detect_all_splittings,
    enumerate_quotients,
    is_essential_exhibit,
    witness_constraints,
)
from groupeq.twisting import TwistKind, make_twist, twist_iterates

LETTERS = [("a", 1), ("a", -1), ("b", 1), ("b", -1)]
raw_letters = st.lists(st.sampled_from(LETTERS), max_size=10)
short_words = words(max_size=4)


def term(variables):
    letters = [(s, e) for s in (*variables, "a", "b") for e in (1, -1)]
    return st.lists(st.sampled_from(letters), min_size=1, max_size=4).map(lambda t: free_reduce(t))


@st.composite
def systems(draw, max_vars=2):
    n = draw(st.integers(1, max_vars))
    variables = ("x1", "x2")[:n]
    eqs = draw(st.lists(term(variables), max_size=2))
    neqs = draw(st.lists(term(variables).filter(bool), max_size=1))
    return EquationSystem(variables, ("a", "b"), tuple(eqs), tuple(neqs))


def assignments(variables):
    return st.tuples(*[words(max_size=3) for _ in variables]).map(lambda vs: Assignment(tuple(variables), vs))


# -- group core ---------------------------------------------------------------------------


@given(raw_letters)
def test_free_reduce_idempotent_and_shrinking(letters):
    w = free_reduce(letters)
    assert free_reduce([(l.symbol, l.sign) for l in w.letters]) == w
    assert len(w) <= len(letters)
    assert as_tuple(w) == reduce_letters(tuple(letters))


@given(short_words, short_words)
def test_product_length_bound(u, v):
    assert len(u * v) <= len(u) + len(v)


@given(raw_letters)
def test_is_trivial_matches_free_reduction(letters):
    assert is_trivial(free_reduce(letters), F2) == (reduce_letters(tuple(letters)) == ())


@given(short_words, short_words)
def test_conjugator_verifies(u, g):
    v = g * u * g.inverse()
    h = are_conjugate(u, v, F2)
    assert h is not None and h is not UNDECIDED
    assert h * u * h.inverse() == v


@given(st.integers(0, 4))
def test_ball_size_formula(r):
    assert len(ball(F2, r)) == 1 + sum(4 * 3 ** (i - 1) for i in range(1, r + 1))


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_normal_form_matches_minors(matrix):
    assert smith_normal_form(matrix, 3).invariant_factors == determinantal_invariants(matrix)


# -- systems -----------------------------------------------------------------------------------


@given(term(("x1", "x2")), term(("x1", "x2")), assignments(("x1", "x2")))
def test_evaluate_is_homomorphism(t1, t2, asg):
    assert evaluate(t1 * t2, asg, F2) == evaluate(t1, asg, F2) * evaluate(t2, asg, F2)


@given(systems(), st.data())
def test_not_on_list_excludes_exactly_the_list(sys, data):
    listed = data.draw(st.lists(assignments(sys.variables), max_size=3))
    asg = data.draw(st.one_of(st.sampled_from(listed), assignments(sys.variables)) if listed
                    else assignments(sys.variables))
    extended = not_on_list_constraint(sys, listed)
    assert is_solution(extended, asg, F2) == (is_solution(sys, asg, F2) and asg not in listed)


@given(systems())
def test_found_solutions_satisfy_presentation(sys):
    p, coeffs = presentation_of_H(sys, F2)
    for asg in enumerate_solutions(sys, F2, SearchBudget(variable_radius=1)):
        images = {**asg.as_dict(), **{c: Word.gen(c) for c in coeffs}}
        assert all(F2.is_trivial(r.substitute(images)) for r in p.relators)


# -- search ---------------------------------------------------------------------------------


@settings(max_examples=25)
@given(systems())
def test_enumeration_matches_naive_filter(sys):
    got = {tuple(as_tuple(v) for v in a.values)
           for a in enumerate_solutions(sys, F2, SearchBudget(variable_radius=2))}
    expected = naive_solutions(sys.variables, [as_tuple(t) for t in sys.equations],
                               [as_tuple(t) for t in sys.inequations], ("a", "b"), 2)
    assert got == expected


@given(st.lists(short_words, min_size=1, max_size=3), short_words)
def test_simultaneous_conjugator_verifies(us, g):
    vs = [g * u * g.inverse() for u in us]
    h = simultaneous_conjugacy(us, vs, F2)
    assert h is not None and h is not UNDECIDED
    assert all(h * u * h.inverse() == v for u, v in zip(us, vs))


@settings(max_examples=30)
@given(st.lists(assignments(("x1", "x2")), max_size=5))
def test_dedup_idempotent_and_separating(sols):
    out = dedup_orbits(sols, F2)
    assert dedup_orbits(out, F2) == out
    for s, t in itertools.combinations(out, 2):
        conj = bounded_simultaneous_conjugator([as_tuple(v) for v in s.values], [as_tuple(v) for v in t.values],
                                               ("a", "b"), 2)
        assert conj is None


@settings(max_examples=30)
@given(systems(max_vars=1))
def test_oracle_sound(sys):
    verdict = satisfiability_oracle(sys, F2, SearchBudget(variable_radius=2))
    if verdict.kind is VerdictKind.SATISFIABLE:
        assert is_solution(sys, verdict.witness, F2)
    if verdict.kind is VerdictKind.UNSATISFIABLE:
        assert naive_solutions(sys.variables, [as_tuple(t) for t in sys.equations],
                               [as_tuple(t) for t in sys.inequations], ("a", "b"), 3) == set()


# -- splittings -----------------------------------------------------------------------------


cyclic_words = st.integers(1, 3).flatmap(lambda n: st.sampled_from([n, -n]))


@given(cyclic_words, cyclic_words)
def test_amalgam_round_trip(m, n):
    a, b = GroupPresentation(("a",), ()), GroupPresentation(("b",), ())
    edge_a, edge_b = Word.gen("a") ** m, Word.gen("b") ** n
    p = amalgam_approximation(a, b, edge_a, edge_b).presentation
    shapes = [s for s in detect_all_splittings(p) if s.kind is SplitKind.CYCLIC_AMALGAM]
    assert any(s.edge_words == (edge_a, edge_b) for s in shapes)


@settings(max_examples=20)
@given(systems())
def test_quotient_proofs_verify(sys):
    for qm in itertools.islice(enumerate_quotients(base_quotient(sys, F2)), 12):
        assert qm.check_proofs() is None


@settings(max_examples=15)
@given(systems())
def test_witness_solutions_meet_every_clause(sys):
    for qm in itertools.islice(enumerate_quotients(base_quotient(sys, F2)), 4):
        for shape in detect_all_splittings(qm.target, qm.fixed):
            if not is_essential_exhibit(shape):
                continue
            try:
                wc = witness_constraints(shape, qm.target, qm.fixed)
            except ContradictionError:
                continue
            for h in itertools.islice(enumerate_solutions(wc.system, F2, SearchBudget(variable_radius=1)), 3):
                images = h.as_dict()
                for clause in wc.named:
                    assert any(not F2.is_trivial(w.substitute(images)) for w in clause.members)


# -- twisting --------------------------------------------------------------------------------


FREE_SHAPE = detect_all_splittings(GroupPresentation(("x1", "x2"), ()))[0]


@given(assignments(("x1", "x2")), st.integers(1, 3), st.integers(1, 3))
def test_twist_composition_law(h, n, m):
    tau = make_twist(FREE_SHAPE, TwistKind.PARTIAL_CONJUGATION, anchor=Word.gen("x1"))
    iterates = twist_iterates(h, tau, n + m)
    assert twist_iterates(iterates[n - 1], tau, m)[-1] == iterates[n + m - 1]


@given(st.integers(-3, 3))
def test_hnn_twist_respects_relator(power):
    p = GroupPresentation(("x1", "a", "b"), (W("[x1,a]"),))
    shape = next(s for s in detect_all_splittings(p, ("a", "b")) if s.kind is SplitKind.CYCLIC_HNN)
    tau = make_twist(shape, TwistKind.HNN_DEHN_TWIST)
    h = {"x1": Word.gen("a") ** power, "a": W("a"), "b": W("b")}
    for r in p.relators:
        assert F2.is_trivial(tau.apply(r).substitute(h))


@given(assignments(("x1", "x2")))
def test_partial_conjugation_members_distinct(h):
    assume(not F2.is_trivial(W("[x1,x2]").substitute(h.as_dict())))
    tau = make_twist(FREE_SHAPE, TwistKind.PARTIAL_CONJUGATION, anchor=Word.gen("x1"))
    members = twist_iterates(h, tau, 5)
    assert len(set(members)) == 5


# -- certifiers --------------------------------------------------------------------------------


@settings(max_examples=15)
@given(systems(max_vars=1))
def test_finite_listing_monotone_in_radius(sys):
    small = check_finitely_many_solutions(sys, F2, budget=SearchBudget(variable_radius=1))
    large = check_finitely_many_solutions(sys, F2, budget=SearchBudget(variable_radius=2))
    assert set(small.items) <= set(large.items) or large.complete
    assert all(is_solution(sys, s, F2) for s in large.items)


@settings(max_examples=15)
@given(st.sampled_from(["[x1,x2]", "x1 x2^-1", "x1^2 x2^-2", "x1 x2 x1^-1 x2^-2"]))
def test_orbit_representatives_pairwise_nonconjugate(eq):
    report = check_finitely_many_orbits(system(["x1", "x2"], eqs=[eq]), F2,
                                        budget=SearchBudget(variable_radius=1, conjugator_radius=2))
    for s, t in itertools.combinations(report.items, 2):
        assert simultaneous_conjugacy(s.values, t.values, F2) is None


@given(assignments(("x1", "x2")))
def test_ball_forcing_partition(sol):
    sys = system(["x1", "x2"])
    f = force_ball_subset(sol, sys, 2, F2)
    assert f.admits(sol, sys, F2)
    assert set(f.trivial).isdisjoint(f.nontrivial)
    assert len(f.trivial) + len(f.nontrivial) == 17


# -- immutable ---------------------------------------------------------------------------------


@settings(max_examples=20)
@given(st.lists(words(max_size=2).filter(bool), min_size=1, max_size=2), st.integers(0, 2))
def test_ball_group_injective_on_ball(gens, radius):
    bg = ball_group(gens, radius, F2)
    assert len(set(bg.elements)) == bg.vertex_count
    assert all(bg.image(w) == e for w, e in zip(bg.words, bg.elements))
    assert all(F2.is_trivial(bg.image(r)) for r in bg.presentation.relators)


# -- cli ---------------------------------------------------------------------------------------


@settings(max_examples=10)
@given(radius=st.integers(0, 2))
def test_cli_json_round_trip(tmp_path_factory, radius):
    path = tmp_path_factory.mktemp("cli")
    grp = path / "g.grp"
    grp.write_text("gens: a b\n")
    eqs = path / "s.eqs"
    eqs.write_text("vars: x1\ncoefficients: yes\neq: [x1, a]\n")
    status, out, _ = run(["solve", "--group", str(grp), "--system", str(eqs), "--radius", str(radius),
                          "--format", "json"])
    report = json.loads(out)
    assert json.dumps(report, indent=2, sort_keys=True) + "\n" == out
    assert status == 0

