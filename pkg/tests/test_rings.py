from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from brute import cofactor_search
from closurelab.algebra import PolyRing
from closurelab.rings import (
    InconsistentRing,
    NotAUnitCover,
    Submodule,
    canonical_map,
    chart_overlap,
    element_in_rcirc,
    is_unit_cover,
    local_membership,
    localize,
    make_ring,
)
from closurelab.sampling import random_ideal, random_poly, rng


def test_ring_specs():
    R = make_ring(2, ["x", "y"])
    assert R.assert_domain and not R.relations
    cubic = make_ring(2, ["x", "y", "z"], ["x^3+y^3+z^3"], assert_domain=True)
    assert cubic.is_zero(cubic.parse("x^3+y^3+z^3"))
    S = make_ring(2, ["x", "y"], ["x*y"], assert_reduced=True)
    assert S.assert_reduced and not S.assert_domain
    with pytest.raises(InconsistentRing):
        make_ring(2, ["x"], ["x"], assert_domain=True, assert_reduced=False)


def test_fermat_cubic_has_no_low_degree_factor():
    # a cubic over F_2 that factors has a linear factor; try all of them
    A = PolyRing(("x", "y", "z"), 2)
    f = A.parse("x^3+y^3+z^3")
    lin = [m for m in A.monomials_up_to(1)]
    quad = A.monomials_up_to(2)
    for a in product((0, 1), repeat=len(lin)):
        l = A.from_terms(dict(zip(lin, a)))
        if l.degree() != 1:
            continue
        for b in product((0, 1), repeat=len(quad)):
            q = A.from_terms(dict(zip(quad, b)))
            assert l * q != f


def test_localize_examples():
    R = make_ring(2, ["x"])
    Rx = localize(R, "x")
    assert Rx.is_zero(Rx.inverse * Rx.ambient.var("x") - 1)
    R1 = localize(R, 1)
    assert R1.is_zero(R1.inverse - 1)
    S = make_ring(2, ["x", "y"], ["x*y"], assert_reduced=True)
    Sx = localize(S, "x")
    assert Sx.is_zero(Sx.ambient.var("y"))


def test_transport_examples():
    R = make_ring(2, ["x"])
    Rx = localize(R, "x")
    assert R.ideal("x^2").transport(Rx).contains(1)
    assert not R.ideal().transport(Rx).contains(1)
    S = make_ring(2, ["x", "y"])
    assert S.ideal("x", "y").transport(localize(S, "x")).contains(1)


def test_local_membership_examples():
    R = make_ring(2, ["x", "y"])
    m = local_membership("y", R.ideal("x*y"), "x")
    assert m.member and m.exponent == 1
    assert not local_membership(1, R.ideal("x"), "y").member
    for f in ("y", "x+y", "x^2*y+1"):
        m = local_membership("x", R.ideal("x"), f)
        assert m.member and m.exponent == 0


def test_unit_cover_examples():
    R2 = make_ring(2, ["x"])
    c = is_unit_cover(R2, ["x", "x+1"])
    assert [str(a) for a in c.coefficients] == ["1", "1"]
    with pytest.raises(NotAUnitCover) as exc:
        is_unit_cover(make_ring(2, ["x", "y"]), ["x", "y"])
    assert exc.value.certificate["kind"] == "nonmembership"
    R3 = make_ring(3, ["x"])
    c = is_unit_cover(R3, ["x", "x+1"])
    x = R3.ambient.var("x")
    assert c.coefficients[0] * x + c.coefficients[1] * (x + 1) == R3.ambient.one()


def test_rcirc_examples():
    R = make_ring(2, ["x", "y"])
    assert element_in_rcirc("x", R).is_in
    S = make_ring(2, ["x", "y"], ["x*y"], assert_reduced=True)
    v = element_in_rcirc("x", S)
    assert v.is_not_in
    assert element_in_rcirc("x+y", S).is_in
    # brute force: no nonzero h of degree <= 2 mod (xy) with h*(x+y) = 0
    A = S.ambient
    mons = [e for e in A.monomials_up_to(2) if not (e[0] and e[1])]
    for bits in product((0, 1), repeat=len(mons)):
        h = A.from_terms(dict(zip(mons, bits)))
        if h.is_zero():
            continue
        assert not S.is_zero(h * A.parse("x+y"))
    U = make_ring(2, ["x", "y"], ["x^2"])
    assert element_in_rcirc("x", U).is_unknown


def test_rcirc_zero_ring():
    R = make_ring(2, ["x"], ["1"])
    assert element_in_rcirc("x", R).is_in


def test_chart_overlap_maps_agree():
    R = make_ring(2, ["x", "y"])
    Rfg, mf, mg, Rf, Rg = chart_overlap(R, "x", "y")
    # both chart maps are compatible with R -> R_{xy}
    for s in ("x", "y", "x*y+1"):
        a = mf(canonical_map(R, Rf)(R.parse(s)))
        b = mg(canonical_map(R, Rg)(R.parse(s)))
        assert Rfg.equal(a, b)
    # w_x maps to the inverse of x
    assert Rfg.equal(mf(Rf.inverse) * Rfg.ambient.var("x"), 1)


# --- properties ------------------------------------------------------------


def _sample(seed):
    r = rng(seed)
    p = r.choice([2, 3])
    R = make_ring(p, ["x", "y"])
    L = random_ideal(R, r, r.randint(1, 2), 2, 2)
    z = random_poly(R.ambient, r, 3, 3)
    f = random_poly(R.ambient, r, 2, 2)
    g = random_poly(R.ambient, r, 2, 2)
    return r, R, L, z, f, g


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_localization_at_one_preserves_membership(seed):
    _, R, L, z, _, _ = _sample(seed)
    R1 = localize(R, 1)
    phi = canonical_map(R, R1)
    assert L.contains(z) == L.transport(phi).contains(phi.vector((z,)))


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_two_step_localization(seed):
    _, R, L, z, f, g = _sample(seed)
    if f.is_zero() or g.is_zero():
        return
    Rf = localize(R, f)
    Rfg_nested = localize(Rf, canonical_map(R, Rf)(g))
    nested = canonical_map(R, Rf).then(canonical_map(Rf, Rfg_nested))
    Rfg = localize(R, f * g)
    direct = canonical_map(R, Rfg)
    a = L.transport(nested).contains(nested.vector((z,)))
    b = L.transport(direct).contains(direct.vector((z,)))
    assert a == b


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_local_membership_matches_power_search(seed):
    _, R, L, z, f, _ = _sample(seed)
    if f.is_zero():
        return
    m = local_membership(z, L, f, nmax=6)
    gens = list(L.ideal_gens)
    hits = [n for n in range(7) if cofactor_search(f.power(n) * z, gens, 8) is not None]
    if m.member and m.exponent is not None:
        assert hits and hits[0] == m.exponent
    if not m.member:
        assert not hits


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_rcirc_persists_to_charts(seed):
    r = rng(seed)
    R = make_ring(2, ["x", "y"], [r.choice(["x*y", "x*y*(x+y)", "x^2+x*y"])], assert_reduced=True)
    f = random_poly(R.ambient, r, 2, 2)
    g = random_poly(R.ambient, r, 2, 2)
    if R.is_zero(g) or not element_in_rcirc(f, R).is_in:
        return
    Rg = localize(R, g)
    if Rg.degenerate:
        return
    assert element_in_rcirc(canonical_map(R, Rg)(f), Rg).is_in
