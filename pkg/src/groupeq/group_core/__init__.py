"""Words, presentations, word and conjugacy problems, Smith normal form."""
from .context import (
    UNDECIDED,
    Backend,
    GroupContext,
    GroupPresentation,
    free_ball,
    free_centralizer_root,
    free_conjugator,
    letter_order,
    shortlex_key,
    symmetrize,
)
from .parsing import format_group, parse_group, parse_word
from .snf import (
    LatticeQuotient,
    SmithNormalForm,
    smith_normal_form,
    smith_with_transforms,
    solve_integer_system,
)
from .words import (
    Letter,
    Word,
    commutator,
    cyclic_canonical,
    cyclic_reduce,
    format_word,
    free_reduce,
    is_cyclically_reduced,
    primitive_root,
    rotations,
    word,
)


def is_trivial(w: Word, ctx: GroupContext) -> bool:
    return ctx.is_trivial(w)


def are_conjugate(u: Word, v: Word, ctx: GroupContext, budget=4):
    return ctx.are_conjugate(u, v, budget)


def ball(ctx: GroupContext, r: int, cap: int | None = None) -> list[Word]:
    return ctx.ball(r, cap)


__all__ = [
    "UNDECIDED", "Backend", "GroupContext", "GroupPresentation", "LatticeQuotient",
    "Letter", "SmithNormalForm", "Word", "are_conjugate", "ball", "commutator",
    "cyclic_canonical", "cyclic_reduce", "format_group", "format_word", "free_ball",
    "free_centralizer_root", "free_conjugator", "free_reduce", "is_cyclically_reduced",
    "is_trivial", "letter_order", "parse_group", "parse_word", "primitive_root",
    "rotations", "shortlex_key", "smith_normal_form", "smith_with_transforms",
    "solve_integer_system", "symmetrize", "word",
]
