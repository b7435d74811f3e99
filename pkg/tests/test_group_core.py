import random

import pytest
import sympy
from conftest import F2, W, as_tuple
from oracles import all_reduced_words, determinantal_invariants
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from groupeq.errors import (
    AlphabetError,
    ParseError,
    PreconditionError,
    ResourceLimitError,
)
from groupeq.group_core import (
    UNDECIDED,
    Backend,
    GroupContext,
    GroupPresentation,
    Letter,
    Word,
    are_conjugate,
    ball,
    cyclic_reduce,
    format_group,
    free_reduce,
    is_trivial,
    parse_group,
    parse_word,
    primitive_root,
    smith_normal_form,
    solve_integer_system,
)

SURFACE = GroupContext.dehn(("a", "b", "c", "d"), (W("[a,b][c,d]", "abcd"),))


class TestFreeReduce:
    def test_cancellation(self):
        assert free_reduce([("a", 1), ("a", -1)]) == Word.identity()

    def test_middle_cancellation(self):
        assert free_reduce([("a", 1), ("b", 1), ("b", -1), ("a", 1)]) == W("a^2")

    def test_nested_cancellation(self):
        assert free_reduce([("b", -1), ("a", -1), ("a", 1), ("b", 1)]) == Word.identity()

    def test_unknown_symbol(self):
        with pytest.raises(AlphabetError):
            free_reduce([("z", 1)], alphabet="ab")

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            free_reduce([("a", 2)])


class TestCyclicReduce:
    @pytest.mark.parametrize("text, core, conj", [("a b a^-1", "b", "a"), ("a b", "a b", "1"), ("1", "1", "1")])
    def test_examples(self, text, core, conj):
        assert cyclic_reduce(W(text)) == (W(core), W(conj))

    def test_reassembles(self):
        w = W("a b a b^-1 a^-1")
        core, g = cyclic_reduce(w)
        assert g * core * g.inverse() == w

    def test_primitive_root(self):
        assert primitive_root(W("a b a b a b")) == (W("a b"), 3)
        assert primitive_root(W("a b a")) == (W("a b a"), 1)


class TestWordProblem:
    def test_commutator_nontrivial_in_free_group(self):
        assert is_trivial(W("[a,b]"), F2) is False

    def test_surface_relator_trivial(self):
        assert is_trivial(W("[a,b][c,d]", "abcd"), SURFACE) is True

    def test_freely_trivial_product(self):
        # a b a^-1 b^-1 . b a b^-1 a^-1 reduces to the empty word
        assert is_trivial(W("a b a^-1 b^-1 b a b^-1 a^-1"), F2) is True

    def test_surface_nontrivial(self):
        assert not SURFACE.is_trivial(W("a b", "abcd"))
        assert not SURFACE.is_trivial(W("[a,b]", "abcd"))

    def test_surface_conjugated_relator(self):
        r = W("[a,b][c,d]", "abcd")
        g = W("a c^-1 b", "abcd")
        assert SURFACE.is_trivial(g * r * g.inverse())
        assert SURFACE.is_trivial(r.inverse() * g * r * g.inverse())

    def test_free_backend_rejects_relators(self):
        with pytest.raises(PreconditionError):
            GroupContext(GroupPresentation(("a",), (W("a^2", "a"),)), Backend.FREE)


class TestConjugacy:
    def test_rotation(self):
        g = are_conjugate(W("a b"), W("b a"), F2)
        assert g == W("a^-1")
        assert g * W("a b") * g.inverse() == W("b a")

    def test_distinct_generators(self):
        assert are_conjugate(W("a"), W("b"), F2) is None

    def test_inverse_not_conjugate(self):
        assert are_conjugate(W("a"), W("a^-1"), F2) is None

    def test_dehn_conjugator_found(self):
        u = W("a b", "abcd")
        g = W("c", "abcd")
        h = are_conjugate(u, g * u * g.inverse(), SURFACE, budget=2)
        assert h is not None and h is not UNDECIDED
        assert SURFACE.equal(h * u * h.inverse(), g * u * g.inverse())

    def test_dehn_abelianization_mismatch(self):
        assert are_conjugate(W("a", "abcd"), W("b", "abcd"), SURFACE) is None


class TestBall:
    def test_radius_one(self):
        assert ball(F2, 1) == [W("1"), W("a"), W("a^-1"), W("b"), W("b^-1")]

    @pytest.mark.parametrize("r, size", [(0, 1), (1, 5), (2, 17), (3, 53), (4, 161)])
    def test_sizes_match_formula(self, r, size):
        assert len(ball(F2, r)) == size == 1 + sum(4 * 3 ** (i - 1) for i in range(1, r + 1))

    def test_rank_one(self):
        assert len(ball(GroupContext.free("a"), 3)) == 7

    def test_matches_brute_force(self):
        assert {as_tuple(w) for w in ball(F2, 3)} == all_reduced_words("ab", 3)

    def test_shortlex_order(self):
        words = ball(F2, 3)
        keys = [F2.word_key(w) for w in words]
        assert keys == sorted(keys)

    def test_cap(self):
        with pytest.raises(ResourceLimitError):
            ball(F2, 6, cap=100)

    def test_surface_ball(self):
        assert len(SURFACE.ball(2)) == 65

    def test_dehn_ball_deduplicates(self):
        ctx = GroupContext.dehn(("a", "b"), (W("[a,b]"),))
        # Z^2: elements of word length <= 2
        assert len(ctx.ball(2)) == 13


class TestSmithNormalForm:
    @pytest.mark.parametrize("matrix, ncols, factors, rank", [
        ([[0, 0]], 2, (), 2),
        ([[2]], 1, (2,), 0),
        ([[0, 0], [2, 4]], 2, (2,), 1),
        ([], 3, (), 3),
        ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], 3, (2, 6, 12), 0),
    ])
    def test_examples(self, matrix, ncols, factors, rank):
        snf = smith_normal_form(matrix, ncols)
        assert snf.invariant_factors == factors
        assert snf.rank == rank

    def test_against_determinantal_divisors(self):
        rng = random.Random(7)
        for _ in range(150):
            m = [[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)]
            assert smith_normal_form(m, 3).invariant_factors == determinantal_invariants(m)

    def test_against_sympy(self):
        rng = random.Random(11)
        for _ in range(40):
            rows, cols = rng.randint(1, 4), rng.randint(1, 4)
            m = [[rng.randint(-5, 5) for _ in range(cols)] for _ in range(rows)]
            d = sympy_snf(sympy.Matrix(m), domain=sympy.ZZ)
            expected = tuple(abs(int(d[i, i])) for i in range(min(rows, cols)) if d[i, i] != 0)
            assert smith_normal_form(m, cols).invariant_factors == expected

    def test_integer_system(self):
        assert solve_integer_system([[2, 4]], [6], 2) is not None
        assert solve_integer_system([[2, 4]], [3], 2) is None
        z = solve_integer_system([[1, 1], [1, -1]], [4, 2], 2)
        assert z == [3, 1]


class TestParsing:
    def test_grammar(self):
        assert parse_word("a^-2 b") == W("a^-1 a^-1 b")
        assert parse_word("[a, b]") == W("a b a^-1 b^-1")
        assert parse_word("(a b)^2") == W("a b a b")
        assert parse_word("1") == Word.identity()
        assert parse_word("a b = b a") == W("a b a^-1 b^-1")
        assert parse_word("[a b, b]^-1") == W("[a b, b]").inverse()

    def test_primes_and_underscores(self):
        w = parse_word("x_1 x' x_1^-1")
        assert [l.symbol for l in w.letters] == ["x_1", "x'", "x_1"]

    def test_error_position(self):
        with pytest.raises(ParseError) as info:
            parse_word("a ^ b", line=4)
        assert info.value.line == 4 and info.value.column == 5

    def test_unknown_symbol(self):
        with pytest.raises(ParseError):
            parse_word("a c", {"a", "b"})

    def test_group_file(self):
        ctx = parse_group("# surface\ngens: a b c d\nrel: [a,b][c,d]\n")
        assert ctx.backend is Backend.DEHN
        assert ctx.generators == ("a", "b", "c", "d")
        assert parse_group(format_group(ctx)).presentation == ctx.presentation

    def test_group_file_defaults_to_free(self):
        assert parse_group("gens: a b").backend is Backend.FREE

    def test_group_file_errors(self):
        with pytest.raises(ParseError) as info:
            parse_group("gens: a b\nrel: a c\n")
        assert info.value.line == 2
        with pytest.raises(ParseError):
            parse_group("backend: free\ngens: a\nrel: a^2\n")
        with pytest.raises(ParseError):
            parse_group("rel: a\n")
        with pytest.raises(ParseError):
            parse_group("gens: a\nbogus: 1\n")

    def test_letter_inverse(self):
        assert Letter("a", 1).inverse() == Letter("a", -1)
