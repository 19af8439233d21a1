from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from closurelab.algebra import (
    ContextMismatch,
    PolyParseError,
    PolyRing,
    ceil_scale,
    frobenius_vector_power,
    is_power_of,
)

F2 = PolyRing(("x", "y"), 2)
F3 = PolyRing(("x", "y"), 3)
QQ = PolyRing(("x", "y"), 0)


def test_additive_inverse():
    x = QQ.var("x")
    assert (x + (-x)).is_zero()


def test_char2_square():
    f = F2.parse("x+y")
    assert f * f == F2.parse("x^2+y^2")


def test_difference_of_squares():
    assert QQ.parse("x+1") * QQ.parse("x-1") == QQ.parse("x^2-1")


def test_power_examples():
    assert F3.parse("x+y") ** 3 == F3.parse("x^3+y^3")
    assert F3.parse("x+2*y").power(0) == F3.one()
    f = F2.parse("x+y")
    assert f.power(4, fast=True) == (f.power(2, fast=False)).power(2, fast=False)


def test_frobenius_vector_examples():
    x, y = F2.gens()
    assert frobenius_vector_power((x, y), 2) == (x * x, y * y)
    z = (F2.zero(), F2.zero())
    assert frobenius_vector_power(z, 8) == z
    a = F3.parse("x+y")
    assert frobenius_vector_power((a, F3.one()), 3) == (F3.parse("x^3+y^3"), F3.one())
    with pytest.raises(ValueError):
        frobenius_vector_power((x,), 3)


def test_ceil_scale_examples():
    assert ceil_scale(Fraction(1, 2), 8) == 4
    assert ceil_scale(Fraction(2, 3), 4) == 3
    for q in (1, 2, 9, 27):
        assert ceil_scale(Fraction(1), q) == q


@given(st.integers(0, 50), st.integers(1, 50), st.integers(1, 500))
def test_ceil_scale_is_ceiling(a, b, q):
    t = Fraction(a, b)
    n = ceil_scale(t, q)
    assert n >= t * q > n - 1


def test_mixed_rings_rejected():
    with pytest.raises(ContextMismatch):
        F2.var("x") + F3.var("x")


def test_parse_errors():
    with pytest.raises(PolyParseError):
        F2.parse("x+*y")
    with pytest.raises((KeyError, PolyParseError)):
        F2.parse("z")


def test_is_power_of():
    assert is_power_of(8, 2) and is_power_of(1, 3) and not is_power_of(6, 2)


# --- properties ------------------------------------------------------------

RINGS = [PolyRing(("x", "y", "z"), 2), PolyRing(("x", "y", "z"), 3), PolyRing(("x", "y", "z"), 0)]


@st.composite
def polys(draw, ring, max_deg=4):
    n = draw(st.integers(1, ring.nvars))
    mons = ring.monomials_up_to(max_deg, n)
    terms = draw(st.dictionaries(st.sampled_from(mons), st.integers(-3, 3), max_size=5))
    return ring.from_terms(terms)


@st.composite
def triples(draw):
    ring = draw(st.sampled_from(RINGS))
    return ring, draw(polys(ring)), draw(polys(ring)), draw(polys(ring))


@settings(max_examples=1000)
@given(triples())
def test_ring_axioms(t):
    ring, a, b, c = t
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + b == b + a
    assert a * ring.one() == a
    assert (a - a).is_zero()


@settings(max_examples=200)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2), st.data())
def test_freshman_dream(p, e, data):
    ring = PolyRing(("x", "y"), p)
    f = data.draw(polys(ring, 3))
    g = data.draw(polys(ring, 3))
    q = p**e
    assert (f + g).power(q) == f.power(q) + g.power(q)
    assert (f + g).power(q, fast=False) == (f + g).power(q)


@settings(max_examples=200)
@given(st.sampled_from(RINGS), st.integers(0, 3), st.integers(0, 3), st.data())
def test_power_composition(ring, e1, e2, data):
    f = data.draw(polys(ring, 2))
    assert f.power(e1 * e2) == f.power(e1).power(e2)


@settings(max_examples=200)
@given(st.sampled_from(["grevlex", "lex"]), st.data())
def test_order_is_multiplicative(order, data):
    ring = PolyRing(("x", "y", "z"), 2, order)
    mons = ring.monomials_up_to(4)
    a, b, c = (data.draw(st.sampled_from(mons)) for _ in range(3))
    add = lambda u, v: tuple(i + j for i, j in zip(u, v))
    if ring.key(a) < ring.key(b):
        assert ring.key(add(a, c)) < ring.key(add(b, c))
    assert ring.key(add(a, c)) >= ring.key(a)


@settings(max_examples=300)
@given(st.sampled_from(RINGS), st.data())
def test_print_parse_round_trip(ring, data):
    f = data.draw(polys(ring))
    assert ring.parse(str(f)) == f
