from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from geoforge.statements import PREDICATES, Statement, canonicalize


def S(text, literal=None):
    parts = text.split()
    lit = Fraction(literal) if literal is not None else None
    return Statement(parts[0], tuple(parts[1:]), lit)


def test_cong_sorts_pairs_and_sides():
    assert canonicalize(S("cong g e f e")) == S("cong e f e g")
    assert canonicalize(S("cong b a d c")) == S("cong a b c d")


def test_para_perp_same_group():
    assert canonicalize(S("perp f e a b")) == canonicalize(S("perp a b e f"))
    assert canonicalize(S("para d c b a")) == canonicalize(S("para a b c d"))


def test_coll_cyclic_sorted():
    assert canonicalize(S("coll c a b")).args == ("a", "b", "c")
    assert canonicalize(S("cyclic d c b a")).args == ("a", "b", "c", "d")


def test_midp_keeps_midpoint_first():
    assert canonicalize(S("midp m b a")) == S("midp m a b")


def test_eqangle_symmetries():
    base = canonicalize(S("eqangle a b c d e f g h"))
    # swap both sides simultaneously
    assert canonicalize(S("eqangle b a d c f e h g")) == base
    assert canonicalize(S("eqangle c d a b g h e f")) == base
    # swap the two angles
    assert canonicalize(S("eqangle e f g h a b c d")) == base


def test_eqangle_means_exchange_not_a_symmetry():
    base = canonicalize(S("eqangle a b c d e f g h"))
    assert canonicalize(S("eqangle a b e f c d g h")) != base


def test_eqratio_swap_ratios():
    a = canonicalize(S("eqratio h e g e e d e d"))
    b = canonicalize(S("eqratio d e d e h e g e"))
    assert a == b


def test_simtri_simultaneous_permutation():
    base = canonicalize(S("simtrir a f e a h e"))
    assert canonicalize(S("simtrir a e f a e h")) == base
    assert canonicalize(S("simtrir f e a h e a")) == base
    assert canonicalize(S("simtrir a h e a f e")) == base
    # permuting only one triangle changes the correspondence
    assert canonicalize(S("simtrir a f e a e h")) != base


def test_sameclock_rotations_and_double_reversal():
    base = canonicalize(S("sameclock a f e a e h"))
    assert canonicalize(S("sameclock f e a e h a")) == base
    assert canonicalize(S("sameclock e f a h e a")) == base  # reverse both
    assert canonicalize(S("sameclock a e h a f e")) == base  # swap triples


def test_aconst_pair_swap_flips_literal():
    a = canonicalize(Statement("aconst", ("c", "d", "a", "b"), Fraction(30)))
    b = canonicalize(Statement("aconst", ("a", "b", "c", "d"), Fraction(150)))
    assert a == b
    assert a.literal in (Fraction(30), Fraction(150))


def test_rconst_pair_swap_inverts_literal():
    a = canonicalize(Statement("rconst", ("c", "d", "a", "b"), Fraction(2)))
    b = canonicalize(Statement("rconst", ("a", "b", "c", "d"), Fraction(1, 2)))
    assert a == b


_names = st.sampled_from("abcdefgh")


@st.composite
def statements(draw):
    pred = draw(st.sampled_from(sorted(PREDICATES)))
    args = tuple(draw(_names) for _ in range(PREDICATES[pred]))
    lit = Fraction(draw(st.integers(1, 9))) if pred in ("aconst", "rconst") else None
    return Statement(pred, args, lit)


@given(statements())
def test_canonicalize_idempotent(stmt):
    once = canonicalize(stmt)
    assert canonicalize(once) == once
