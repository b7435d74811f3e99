import itertools

import pytest
from conftest import F2, W, system

from groupeq.eqsys import Assignment, is_solution
from groupeq.errors import ContradictionError, PreconditionError
from groupeq.group_core import GroupPresentation
from groupeq.search import SearchBudget, iter_solutions
from groupeq.splittings import (
    QuotientMap,
    SplitKind,
    amalgam_approximation,
    base_quotient,
    check_shape,
    detect_all_splittings,
    detect_exhibited_splitting,
    enumerate_quotients,
    free_rank,
    hnn_approximation,
    is_essential_exhibit,
    is_visibly_abelian,
    pulled_constraints,
    witness_constraints,
)

ALPHABET = ("x1", "x2", "a", "b", "c", "t", "x", "y")


def P(gens, *rels):
    return GroupPresentation(tuple(gens.split()), tuple(W(r, ALPHABET) for r in rels))


class TestDetection:
    def test_free_product_of_cyclics(self):
        s = detect_exhibited_splitting(P("x1 x2"))
        assert s.kind is SplitKind.FREE_PRODUCT
        assert [v.generators for v in s.vertices] == [("x1",), ("x2",)]

    def test_malformed_glue_not_detected(self):
        # c is glued to three different things: no amalgam or HNN pattern fits
        p = P("x1 a b c", "[x1,c]", "c a^-1 b^-1", "c x1^-1 a^-1")
        assert detect_exhibited_splitting(p, ("a", "b")) is None

    def test_amalgam_with_edge_generator(self):
        p = P("x1 a b c", "c a^-1", "c x1^-2")
        shapes = detect_all_splittings(p, ("a", "b"))
        amalgams = [s for s in shapes if s.kind is SplitKind.CYCLIC_AMALGAM]
        assert amalgams
        first = amalgams[0]
        assert first.vertices[0].generators == ("a", "b")
        assert first.edge_words == (W("a"), W("x1^2"))
        assert first.edge_generator == "c"

    def test_hnn_over_centralizer(self):
        s = detect_exhibited_splitting(P("x1 a b", "[x1,a]"), ("a", "b"))
        assert s.kind is SplitKind.CYCLIC_HNN
        assert s.stable_letter == "x1"
        assert s.edge_words == (W("a"), W("a"))

    def test_coefficients_stay_in_one_vertex(self):
        for s in detect_all_splittings(P("x1 a b"), ("a", "b")):
            assert len({s.vertex_of(g) for g in ("a", "b")}) == 1

    def test_every_detected_shape_rechecks(self):
        cases = [
            (P("x1 x2"), ()),
            (P("x1 a b c", "c a^-1", "c x1^-2"), ("a", "b")),
            (P("x1 a b c", "[x1,c]", "c a^-1"), ("a", "b")),
            (P("a t", "t a^2 t^-1 a^-3"), ()),
        ]
        for p, coeffs in cases:
            shapes = detect_all_splittings(p, coeffs)
            assert shapes
            assert all(check_shape(s, p, coeffs) is None for s in shapes)

    def test_connected_presentation_has_no_free_product(self):
        shapes = detect_all_splittings(P("x y", "x y x^-1 y^-2"))
        assert all(s.kind is not SplitKind.FREE_PRODUCT for s in shapes)


class TestVisiblyAbelian:
    def test_commutator_relator(self):
        assert is_visibly_abelian(P("x y", "[x,y]"))

    def test_rotated_commutator(self):
        assert is_visibly_abelian(P("x y", "y^-1 x y x^-1"))

    def test_free(self):
        assert not is_visibly_abelian(P("x y"))

    def test_cyclic_vacuous(self):
        assert is_visibly_abelian(P("x"))


class TestEssential:
    def shape(self, vertex):
        return detect_all_splittings(hnn_approximation(vertex, W("x", ALPHABET), W("x", ALPHABET)).presentation)

    def test_rank_two_passes(self):
        v = P("x y", "[x,y]")
        assert free_rank(v) == 2
        assert any(is_essential_exhibit(s) for s in self.shape(v) if v in s.vertices)

    def test_rank_one_cyclic_fails(self):
        v = P("x")
        shapes = [s for s in self.shape(v) if v in s.vertices]
        assert shapes and not any(is_essential_exhibit(s) for s in shapes)

    def test_rank_one_with_torsion_relator_fails(self):
        v = P("x y", "[x,y]", "x^2 y^4")
        assert free_rank(v) == 1
        shapes = [s for s in self.shape(v) if v in s.vertices]
        assert shapes and not any(is_essential_exhibit(s) for s in shapes)

    def test_free_product_always_essential(self):
        assert is_essential_exhibit(detect_exhibited_splitting(P("x1 x2")))


class TestWitnessConstraints:
    def test_free_product(self):
        p = P("x1 x2")
        wc = witness_constraints(detect_exhibited_splitting(p), p)
        names = {c.name: c.members for c in wc.named}
        assert names["vertex-nontrivial[0]"] == (W("x1"),)
        assert names["vertex-nontrivial[1]"] == (W("x2"),)
        assert names["non-abelian"] == (W("[x1,x2]"),)
        assert is_solution(wc.system, Assignment(("x1", "x2"), (W("a"), W("b"))), F2)
        assert not is_solution(wc.system, Assignment(("x1", "x2"), (W("a"), W("a^2"))), F2)

    def test_inessential_amalgam_filtered(self):
        p = P("x1 a b c", "c a^-1", "c x1^-2")
        first = detect_all_splittings(p, ("a", "b"))[0]
        assert first.vertices[1] == P("x1")
        assert not is_essential_exhibit(first)

    def test_amalgam_with_abelian_rank_two_vertex(self):
        p = P("x1 a b c", "[x1,c]", "c a^-1")
        shape = next(s for s in detect_all_splittings(p, ("a", "b")) if s.kind is SplitKind.CYCLIC_AMALGAM)
        assert is_essential_exhibit(shape)
        wc = witness_constraints(shape, p, ("a", "b"))
        witness = next(iter_solutions(wc.system, F2, SearchBudget(variable_radius=2)))
        images = witness.as_dict()
        assert not F2.is_trivial(W("c").substitute(images))
        assert is_solution(wc.system, witness, F2)

    def test_trivial_pulled_inequation_is_contradictory(self):
        p = P("x1 x2")
        with pytest.raises(ContradictionError):
            witness_constraints(detect_exhibited_splitting(p), p, (), [W("1")])


class TestApproximations:
    def test_amalgam_of_cyclics(self):
        approx = amalgam_approximation(P("a"), P("b"), W("a^2"), W("b^3"))
        assert approx.presentation == P("a b c", "c a^-2", "c b^-3")

    def test_trivial_edge_gives_free_product(self):
        approx = amalgam_approximation(P("a"), P("b"), W("1"), W("1"))
        assert approx.presentation == P("a b")
        assert detect_exhibited_splitting(approx.presentation).kind is SplitKind.FREE_PRODUCT

    def test_amalgam_with_abelian_vertex(self):
        approx = amalgam_approximation(P("a b", "[a,b]"), P("x"), W("a"), W("x", ALPHABET))
        assert approx.presentation == P("a b x c", "[a,b]", "c a^-1", "c x^-1")

    def test_amalgam_renames_clashes(self):
        approx = amalgam_approximation(P("a"), P("a"), W("a"), W("a"))
        assert approx.renaming == {"a": "a1"}
        assert len(set(approx.presentation.generators)) == 3

    def test_amalgam_edge_outside_vertex(self):
        with pytest.raises(PreconditionError):
            amalgam_approximation(P("a"), P("b"), W("b"), W("b"))

    def test_hnn_abelian(self):
        assert hnn_approximation(P("a"), W("a"), W("a")).presentation == P("a t", "t a t^-1 a^-1")

    def test_baumslag_solitar(self):
        p = hnn_approximation(P("a"), W("a^2"), W("a^3")).presentation
        assert p == P("a t", "t a^2 t^-1 a^-3")
        s = detect_exhibited_splitting(p)
        assert s.kind is SplitKind.CYCLIC_HNN and s.edge_words == (W("a^2"), W("a^3"))

    def test_hnn_two_generators(self):
        assert hnn_approximation(P("a b"), W("a"), W("b")).presentation == P("a b t", "t a t^-1 b^-1")


class TestQuotients:
    def test_identity_proofs(self):
        qm = QuotientMap.identity(P("x1 x2", "[x1,x2]"))
        assert qm.check_proofs() is None and qm.is_surjective()

    def test_stream_carries_valid_proofs(self):
        sys = system(["x1", "x2"], coefficients=True, eqs=["[x1,a]", "x2 x1 b^-1"])
        for qm in itertools.islice(enumerate_quotients(base_quotient(sys, F2)), 40):
            assert qm.check_proofs() is None
            assert qm.is_surjective()
            assert set(qm.fixed) <= set(qm.target.generators)

    def test_stream_is_deterministic(self):
        base = base_quotient(system(["x1", "x2"]), F2)
        first = [q.target for q in itertools.islice(enumerate_quotients(base), 30)]
        second = [q.target for q in itertools.islice(enumerate_quotients(base), 30)]
        assert first == second

    def test_eliminate_and_introduce(self):
        qm = QuotientMap.identity(P("x1 x2 a b", "x2 x1^-1 a^-1"), ("a", "b"))
        elim = qm.eliminate("x2", 0)
        assert elim.target.generators == ("x1", "a", "b")
        assert elim.image(W("x2")) == W("a x1")
        assert elim.check_proofs() is None
        intro = qm.introduce("c", W("x1^-1 a^-1"), [0])
        assert intro.check_proofs() is None

    def test_cannot_eliminate_fixed(self):
        qm = QuotientMap.identity(P("x1 a b", "x1 a^-1"), ("a", "b"))
        with pytest.raises(PreconditionError):
            qm.eliminate("a", 0)

    def test_tampered_proof_detected(self):
        qm = QuotientMap.identity(P("x1 x2", "[x1,x2]", "x1^2"))
        bad = QuotientMap(qm.source, qm.target, qm.generator_images, (qm.relator_proofs[1], qm.relator_proofs[0]))
        assert bad.check_proofs() == 0

    def test_pulled_constraints_contradiction(self):
        sys = system(["x1", "x2"], eqs=["x2 x1^-1"], neqs=["x2 x1^-1"])
        qm = next(q for q in enumerate_quotients(base_quotient(sys)) if len(q.target.generators) == 1)
        with pytest.raises(ContradictionError):
            pulled_constraints(sys, qm)
