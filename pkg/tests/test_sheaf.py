import pytest
from hypothesis import given, settings, strategies as st

from closurelab import certificates as C
from closurelab.closure import IdentityOracle, RadicalOracle, chart_verdict
from closurelab.rings import canonical_map, make_ring
from closurelab.sampling import random_ideal, random_poly, rng
from closurelab.sheaf import (
    NO_COUNTEREXAMPLE,
    NOT_SEMI_F_REGULAR,
    AffineScheme,
    CoverPresentedSubsheaf,
    QCSubsheafPair,
    Section,
    SectionMismatch,
    check_closed_subsheaf,
    check_quasicoherence,
    closure_sections_on_affine,
    compatibility_check,
    section_in_closure_sheaf,
    semi_freg_cover_probe,
    semi_freg_probe,
)
from closurelab.tight import AtTightClosureOracle, FrobeniusBoundedOracle

RAD = RadicalOracle()
ID = IdentityOracle()
CUSP = make_ring(2, ["x", "y", "z"], ["z^2+x^3+y^3"])
FERMAT = make_ring(2, ["x", "y", "z"], ["x^3+y^3+z^3"], assert_domain=True)


def test_open_set_dedup_and_cover():
    X = AffineScheme(make_ring(2, ["x"]))
    U = X.open_set(["x", "x", "x+1"])
    assert len(U) == 2 and U.is_whole()
    assert not X.open_set(["x"]).is_whole()
    assert not X.open_set([]).is_whole()


def test_compatibility_examples():
    R = make_ring(2, ["x", "y"])
    X = AffineScheme(R)
    L = R.ideal("x*y", "y^2")
    sh = CoverPresentedSubsheaf.from_generators(X, ["x", "y"], [["x*y", "y^2"], ["x*y", "y^2"]])
    assert compatibility_check(sh)["outcome"] == "pass"
    # (y) on D(x) against (y^2) on D(y): y is a unit on D(xy), so the data do agree
    sh = CoverPresentedSubsheaf.from_generators(X, ["x", "y"], [["y"], ["y^2"]])
    assert compatibility_check(sh)["outcome"] == "pass"
    # a genuine mismatch: on D(x(x+1)) the element y is not a unit
    with pytest.raises(SectionMismatch):
        CoverPresentedSubsheaf.from_generators(X, ["x", "x+1"], [["y"], ["y^2"]])
    sh = CoverPresentedSubsheaf.from_generators(X, ["x", "x+1"], [["y"], ["y^2"]], validate=False)
    rep = compatibility_check(sh)
    assert rep["outcome"] == "fail" and rep["failures"][0]["generator"] == ["y"]
    sh = CoverPresentedSubsheaf(X, [], [])
    assert compatibility_check(sh)["outcome"] == "pass"
    del L


def test_section_examples():
    R = make_ring(3, ["x"])
    X = AffineScheme(R)
    pair = QCSubsheafPair(R.ideal("x^2"))
    s = Section.from_global(X, "x", ["x", "x+1"])
    v = section_in_closure_sheaf(RAD, pair, s)
    assert v.is_in
    C.recheck(v.certificate)
    S = make_ring(2, ["x", "y"])
    Y = AffineScheme(S)
    pair = QCSubsheafPair(S.ideal("x*y"))
    assert section_in_closure_sheaf(ID, pair, Section.from_global(Y, "x*y^2", ["x", "x+1"])).is_in
    assert section_in_closure_sheaf(ID, pair, Section.from_global(Y, "y", ["x", "x+1"])).is_not_in


def test_section_overlap_mismatch():
    R = make_ring(2, ["x", "y"])
    X = AffineScheme(R)
    U = X.open_set(["x", "x+1"])
    with pytest.raises(SectionMismatch):
        Section(U, (("y",), ("y+1",)))
    # agreeing local data that is not visibly global: 1 on D(x) is w*x there
    Rx = X.chart("x")
    Section(X.open_set(["x"]), ((Rx.inverse * Rx.ambient.var("x"),),))


def test_closure_sections_on_affine_paths():
    R = make_ring(2, ["x"])
    member = closure_sections_on_affine(RAD, QCSubsheafPair(R.ideal("x^2")))
    assert member("x").is_in and member("x+1").is_not_in
    member = closure_sections_on_affine(ID, QCSubsheafPair(R.ideal("x^2")))
    assert member("x^3").is_in and member("x").is_not_in
    tc = AtTightClosureOracle(q_max=8)
    member = closure_sections_on_affine(tc, QCSubsheafPair(FERMAT.ideal("x", "y")))
    assert member("z^2").is_in


def test_quasicoherence_examples():
    R = make_ring(2, ["x", "y"])
    pair = QCSubsheafPair(R.ideal("x^2", "x*y"))
    assert check_quasicoherence(RAD, pair, ["x", "y", "x+y"], 2)["outcome"] == "pass"
    assert check_quasicoherence(ID, pair, ["x", "y"], 2)["outcome"] == "pass"
    rep = check_quasicoherence(FrobeniusBoundedOracle(4), QCSubsheafPair(R.ideal("x")), ["y", "x+1"], 2)
    assert rep["outcome"] == "pass"


def test_closed_subsheaf_examples():
    R = make_ring(2, ["x", "y"])
    rep = check_closed_subsheaf(RAD, QCSubsheafPair(R.ideal("x")), ["x", "x+1"], ["y", "x+y"])
    assert {rep["conditions"][k]["outcome"] for k in "bcd"} == {"pass"} and not rep["inconsistent"]
    rep = check_closed_subsheaf(RAD, QCSubsheafPair(R.ideal("x^2")), ["x", "x+1"], ["y"])
    d = rep["conditions"]["d"]
    assert d["outcome"] == "fail"
    assert d["charts"][0]["f"] == "1" and d["charts"][0]["witness"]["element"] == ["x"]
    rep = check_closed_subsheaf(ID, QCSubsheafPair(R.ideal("x^2", "y")), ["x", "x+1"], ["y"])
    assert {rep["conditions"][k]["outcome"] for k in "bcd"} == {"pass"}


def test_semifreg_examples():
    X = AffineScheme(make_ring(2, ["x", "y"]))
    res = semi_freg_probe(X, [["x", "y"], ["x^2", "y"], ["x*y"]], ["x", "y"])
    assert res.status == NO_COUNTEREXAMPLE and res.witness is None and res.searched == 9
    res = semi_freg_probe(AffineScheme(CUSP), [["x", "y"]], ["x"])
    assert res.status == NOT_SEMI_F_REGULAR
    w = res.witness
    assert (w["f"], w["z"], w["q"]) == ("1", "z", 2)
    C.recheck(w["certificate"]["nonmembership"])
    C.recheck(w["certificate"]["frobenius"])
    res = semi_freg_probe(AffineScheme(FERMAT), [["x", "y"]])
    assert res.witness["z"] == "z^2" and res.witness["q"] == 2


def test_semifreg_witness_tampering_detected():
    res = semi_freg_probe(AffineScheme(CUSP), [["x", "y"]])
    cert = res.witness["certificate"]
    bad = dict(cert, nonmembership=dict(cert["nonmembership"], element=["x"]))
    with pytest.raises(C.CertificateError):
        C.recheck(bad)


def test_semifreg_cover_probe():
    X = AffineScheme(make_ring(2, ["x", "y"]))
    out = semi_freg_cover_probe(X, ["x", "x+1"], [["x", "y"]], ["y"])
    assert out["status"] == NO_COUNTEREXAMPLE and out["agree"]
    out = semi_freg_cover_probe(AffineScheme(CUSP), ["x", "y", "z"], [["x", "y"]])
    assert out["status"] == NOT_SEMI_F_REGULAR
    # on each chart (x, y) becomes the unit ideal, so only the global probe hits at these bounds
    assert not out["agree"]


# --- properties ------------------------------------------------------------


def _inst(seed):
    r = rng(seed)
    R = make_ring(r.choice([2, 3]), ["x", "y"])
    L = random_ideal(R, r, r.randint(1, 2), 2, 2)
    z = random_poly(R.ambient, r, 2, 2)
    return r, R, L, z


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_cover_criterion_matches_global(seed):
    r, R, L, z = _inst(seed)
    X = AffineScheme(R)
    f = random_poly(R.ambient, r, 1, 2)
    cover = [f, f + 1] if not f.is_constant() else ["x", "x+1"]
    s = Section.from_global(X, z, cover)
    pair = QCSubsheafPair(L)
    for cl in (RAD, ID):
        assert section_in_closure_sheaf(cl, pair, s).status == closure_sections_on_affine(cl, pair)(z).status


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_restriction_stability(seed):
    r, R, L, z = _inst(seed)
    f = random_poly(R.ambient, r, 1, 2)
    g = random_poly(R.ambient, r, 1, 2)
    if R.is_zero(f) or R.is_zero(f * g):
        return
    for cl in (RAD, ID):
        if chart_verdict(cl, z, L, f).is_in:
            assert chart_verdict(cl, z, L, f * g).is_in


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_cover_refinement_invariance(seed):
    r, R, L, z = _inst(seed)
    X = AffineScheme(R)
    pair = QCSubsheafPair(L)
    a = Section.from_global(X, z, ["x", "x+1"])
    b = Section.from_global(X, z, ["x^2", "x^3+1", "x*y+x+1"])
    assert X.open_set(["x^2", "x^3+1", "x*y+x+1"]).is_whole()
    for cl in (RAD, ID):
        assert section_in_closure_sheaf(cl, pair, a).status == section_in_closure_sheaf(cl, pair, b).status
