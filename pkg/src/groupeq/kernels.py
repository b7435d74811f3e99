"""Hot loops of the brute-force search, on integer-encoded words.

Encoding: group generator ``i`` is ``i + 1`` and its inverse ``-(i + 1)``;
variable ``j`` is ``G + 1 + j`` (negated for the inverse), where ``G`` is
the number of group generators.  A *ball* is a padded 2-D array of group
words with a length vector; a candidate picks one ball row per variable.

Term roles: ``EQ`` must reduce to the identity, ``NEQ`` must not, and a
role ``>= CLAUSE`` marks membership in clause ``role - CLAUSE`` (at least
one member per clause must be non-trivial).
"""
from __future__ import annotations

import numpy as np

from ._jit import njit

EQ = 0
NEQ = 1
CLAUSE = 2


@njit
def reduced_length(choice, ball_letters, ball_lens, tokens, start, end, n_gens, stack):
    """Free-reduce one term under a choice of ball rows; return its length."""
    top = 0
    for p in range(start, end):
        t = tokens[p]
        a = t if t > 0 else -t
        if a <= n_gens:
            if top > 0 and stack[top - 1] == -t:
                top -= 1
            else:
                stack[top] = t
                top += 1
        else:
            row = choice[a - n_gens - 1]
            length = ball_lens[row]
            for q in range(length):
                if t > 0:
                    x = ball_letters[row, q]
                else:
                    x = -ball_letters[row, length - 1 - q]
                if top > 0 and stack[top - 1] == -x:
                    top -= 1
                else:
                    stack[top] = x
                    top += 1
    return top


@njit
def check_candidates(first, count, n_vars, ball_letters, ball_lens, tokens,
                     starts, ends, roles, n_clauses, n_gens, stack_size, out):
    """Test candidates ``first .. first + count - 1`` in mixed-radix order.

    Candidate ``c`` assigns variable ``j`` the ball row given by digit ``j``
    of ``c`` in base ``len(ball)``, most significant digit first.  Writes
    1 into ``out[i]`` when candidate ``first + i`` satisfies every term.
    """
    n_ball = ball_lens.shape[0]
    choice = np.zeros(max(n_vars, 1), dtype=np.int64)
    stack = np.zeros(stack_size, dtype=np.int64)
    hit = np.zeros(max(n_clauses, 1), dtype=np.uint8)
    n_terms = starts.shape[0]
    for i in range(count):
        c = first + i
        for j in range(n_vars - 1, -1, -1):
            choice[j] = c % n_ball
            c //= n_ball
        for q in range(n_clauses):
            hit[q] = 0
        ok = True
        for k in range(n_terms):
            role = roles[k]
            if role >= CLAUSE and hit[role - CLAUSE]:
                continue
            length = reduced_length(choice, ball_letters, ball_lens, tokens,
                                    starts[k], ends[k], n_gens, stack)
            if role == EQ:
                if length != 0:
                    ok = False
                    break
            elif role == NEQ:
                if length == 0:
                    ok = False
                    break
            elif length != 0:
                hit[role - CLAUSE] = 1
        if ok:
            for q in range(n_clauses):
                if not hit[q]:
                    ok = False
                    break
        out[i] = 1 if ok else 0


@njit
def trivial_mask(value_letters, value_lens, words, word_lens, n_gens, stack_size, out):
    """For each variable word (row of ``words``) decide whether it evaluates
    to the identity under the values in ``value_letters``."""
    n_vars = value_lens.shape[0]
    choice = np.arange(max(n_vars, 1))
    stack = np.zeros(stack_size, dtype=np.int64)
    for i in range(words.shape[0]):
        length = reduced_length(choice, value_letters, value_lens, words[i],
                                0, word_lens[i], n_gens, stack)
        out[i] = 1 if length == 0 else 0


def encode_words(words, codes: dict) -> tuple[np.ndarray, np.ndarray]:
    """Pack words into a padded ``(len(words), maxlen)`` array plus lengths.

    ``codes`` maps a symbol to its positive integer code.
    """
    maxlen = max((len(w) for w in words), default=0)
    letters = np.zeros((len(words), max(maxlen, 1)), dtype=np.int64)
    lens = np.zeros(len(words), dtype=np.int64)
    for i, w in enumerate(words):
        lens[i] = len(w)
        for q, l in enumerate(w.letters):
            letters[i, q] = codes[l.symbol] * l.sign
    return letters, lens


def encode_terms(terms, roles, codes: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Concatenate terms into one token array with start/end offsets."""
    tokens = []
    starts = np.zeros(len(terms), dtype=np.int64)
    ends = np.zeros(len(terms), dtype=np.int64)
    for k, t in enumerate(terms):
        starts[k] = len(tokens)
        tokens.extend(codes[l.symbol] * l.sign for l in t.letters)
        ends[k] = len(tokens)
    return (
        np.asarray(tokens if tokens else [0], dtype=np.int64),
        starts,
        ends,
        np.asarray(roles, dtype=np.int64),
    )
