import pytest
from hypothesis import given
from hypothesis import strategies as st

from crownlab.group import compose
from crownlab.perm import Permutation, format_cycles, parse_cycles


@st.composite
def perms(draw, min_degree=1, max_degree=9):
    n = draw(st.integers(min_degree, max_degree))
    return Permutation(draw(st.permutations(range(n))))


@st.composite
def perm_pairs(draw):
    n = draw(st.integers(1, 9))
    return (Permutation(draw(st.permutations(range(n)))),
            Permutation(draw(st.permutations(range(n)))))


def test_involution_squares_to_identity():
    t = Permutation.parse("(1,2)", 2)
    assert compose(t, t).is_identity()


def test_identity_is_neutral():
    p = Permutation.parse("(1,3)(2,4,5)", 5)
    assert compose(p, Permutation.identity(5)) == p
    assert compose(Permutation.identity(5), p) == p


def test_three_cycle_square():
    c = Permutation.parse("(1,2,3)", 3)
    assert compose(c, c) == Permutation.parse("(1,3,2)", 3)


def test_left_to_right_convention():
    # (p*q)(x) = q(p(x)): first (1,2), then (2,3) sends 1 -> 2 -> 3
    p = Permutation.parse("(1,2)", 3)
    q = Permutation.parse("(2,3)", 3)
    assert (p * q)(0) == 2
    assert str(p * q) == "(1,3,2)"


def test_degree_mismatch_raises():
    with pytest.raises(ValueError):
        compose(Permutation.identity(2), Permutation.identity(3))


def test_non_bijection_rejected():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])


def test_parse_and_format():
    p = Permutation.parse("(1,2,3)(4,5)", 6)
    assert p.degree == 6
    assert p.cycles() == [(0, 1, 2), (3, 4)]
    assert str(p) == "(1,2,3)(4,5)"
    assert str(Permutation.identity(4)) == "()"
    assert Permutation.parse("()", 3).is_identity()
    assert parse_cycles("(1, 2) (3,4)") == [(0, 1), (2, 3)]


@pytest.mark.parametrize("text", ["(1,2", "(1,1)", "(0,2)", "(1,a)", "(1,2)(2,3)"])
def test_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        Permutation.parse(text, 4)


def test_cycle_type_and_order():
    p = Permutation.parse("(1,2,3)(4,5)", 7)
    assert p.cycle_type() == (3, 2, 1, 1)
    assert p.order() == 6
    assert p.support() == [0, 1, 2, 3, 4]


def test_extend_shifts_points():
    p = Permutation.parse("(1,2)", 2).extend(6, offset=3)
    assert str(p) == "(4,5)"


def test_conjugate_relabels_cycles():
    p = Permutation.parse("(1,2,3)", 4)
    x = Permutation.parse("(3,4)", 4)
    assert str(p.conjugate(x)) == "(1,2,4)"


@given(perms())
def test_inverse_law(p):
    e = Permutation.identity(p.degree)
    assert compose(p, p.inverse()) == e
    assert compose(p.inverse(), p) == e


@given(perms())
def test_format_parse_roundtrip(p):
    assert Permutation.parse(format_cycles(p), p.degree) == p


@given(perms())
def test_order_kills(p):
    assert (p ** p.order()).is_identity()
    assert p ** -1 == p.inverse()


@given(perm_pairs())
def test_conjugation_preserves_cycle_type(pq):
    p, q = pq
    assert p.conjugate(q).cycle_type() == p.cycle_type()
    assert p.conjugate(q) == q.inverse() * p * q


@given(perm_pairs(), st.data())
def test_associativity(pq, data):
    p, q = pq
    r = Permutation(data.draw(st.permutations(range(p.degree))))
    assert (p * q) * r == p * (q * r)
