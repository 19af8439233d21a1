import pytest
from hypothesis import given, settings, strategies as st

from brute import monomial_in_integral_closure
from closurelab import certificates as C
from closurelab.closure import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    ClosureOracle,
    IdentityOracle,
    MonomialIntegralClosureOracle,
    PreconditionError,
    RadicalOracle,
    UnsupportedInput,
    check_extensive,
    check_generator_independence,
    check_glueable,
    check_idempotent,
    check_open_persistence,
    check_order_preserving,
    global_from_unit_cover,
    gluing_certificate,
)
from closurelab.registry import make_oracle
from closurelab.rings import make_ring
from closurelab.sampling import random_monomial_ideal, rng
from closurelab.tight import FrobeniusBoundedOracle
from closurelab.verdict import UNKNOWN, Verdict

RAD = RadicalOracle()
ID = IdentityOracle()
MIC = MonomialIntegralClosureOracle()


def test_axiom_examples():
    R = make_ring(2, ["x", "y"])
    assert check_extensive(RAD, [R.ideal("x^2")]).outcome == PASS
    assert check_extensive(ID, [R.ideal("x", "y^2")]).outcome == PASS
    rep = check_order_preserving(RAD, [(R.ideal("x^2"), R.ideal("x"))])
    assert rep.outcome == PASS
    assert RAD.member("x", R.ideal("x^2")).is_in and RAD.member("x", R.ideal("x")).is_in


def test_idempotent_examples():
    R = make_ring(2, ["x", "y"])
    assert check_idempotent(RAD, [R.ideal("x^2")], 2).outcome == PASS
    assert check_idempotent(ID, [R.ideal("x*y")], 2).outcome == PASS
    cusp = make_ring(2, ["x", "y", "z"], ["z^2+x^3+y^3"])
    frob = FrobeniusBoundedOracle(8)
    assert frob.member("z", cusp.ideal("x", "y")).is_in
    rep = check_idempotent(frob, [cusp.ideal("x", "y")], 1)
    assert rep.outcome in (PASS, INCONCLUSIVE)


def test_open_persistence_examples():
    R = make_ring(2, ["x", "y"])
    assert check_open_persistence(RAD, R, "y", [("x", R.ideal("x^2"))]).outcome == PASS
    rep = check_open_persistence(ID, R, 1, [("x", R.ideal("x")), ("y", R.ideal("x"))])
    assert rep.outcome == PASS
    cusp = make_ring(2, ["x", "y", "z"], ["z^2+x^3+y^3"])
    rep = check_open_persistence(FrobeniusBoundedOracle(2), cusp, "x", [("z", cusp.ideal("x", "y"))])
    assert rep.outcome == PASS
    with pytest.raises(PreconditionError):
        check_open_persistence(RAD, R, 0, [])


def test_glueable_examples():
    R = make_ring(3, ["x"])
    assert check_glueable(RAD, R, ["x", "x+1"], 1, [("x", R.ideal("x^2"))]).outcome == PASS
    S = make_ring(2, ["x", "y"])
    assert check_glueable(ID, S, ["x"], "x", [("y", S.ideal("x*y"))]).outcome == PASS
    with pytest.raises(PreconditionError):
        check_glueable(RAD, S, ["x", "y"], "x+1", [])


def test_generator_independence_examples():
    R = make_ring(2, ["x", "y"])
    inst = [("y", R.ideal("x*y")), ("1", R.ideal("x")), ("x+y", R.ideal("y^2"))]
    assert check_generator_independence(RAD, R, ["x"], ["x^2"], inst).outcome == PASS
    assert check_generator_independence(RAD, R, ["x", "y"], ["x", "y"], inst).outcome == PASS
    assert check_generator_independence(RAD, R, ["x", "y"], ["x+y", "x*y"], inst).outcome == PASS
    with pytest.raises(PreconditionError):
        check_generator_independence(RAD, R, ["x"], ["y"], inst)


def test_global_from_unit_cover_examples():
    R = make_ring(3, ["x"])
    v = global_from_unit_cover(RAD, R, ["x", "x+1"], "x", R.ideal("x^2"))
    assert v.is_in
    C.recheck(v.certificate)
    S = make_ring(2, ["x", "y"])
    v = global_from_unit_cover(ID, S, ["x", "x+1"], "y", S.ideal("x*y", "y^2+y"))
    assert v.is_not_in
    for z in ("x", "y", "x+y"):
        assert global_from_unit_cover(RAD, S, [1], z, S.ideal("x^2")).status == RAD.member(z, S.ideal("x^2")).status
    with pytest.raises(PreconditionError):
        global_from_unit_cover(RAD, S, ["x", "y"], "x", S.ideal("x"))


def test_gluing_examples():
    R = make_ring(3, ["x"])
    c = gluing_certificate(RAD, R, ["x", "x+1"], 1, "x", R.ideal("x^2"))
    assert c.exponents == (0, 0) and c.N == 0
    S = make_ring(2, ["x", "y"])
    c = gluing_certificate(ID, S, ["x", "y"], "x+y", "y", S.ideal("x*y", "y^2"))
    assert c.exponents == (1, 1)
    # the least exponent is 1: (x+y) = 1*x + 1*y already
    assert c.N == 1 and [str(r) for r in c.coefficients] == ["1", "1"]
    C.recheck(c.to_dict())
    x, y = S.ambient.gens()
    # the square also satisfies the identity with r = (x, y)
    assert (x + y) ** 2 == x * x + y * y
    c = gluing_certificate(ID, S, ["x", "y", "x+y+1"], 1, "x", S.ideal("x"))
    assert c.N == 0 and set(c.exponents) == {0}


def test_gluing_recheck_rejects_tampering():
    S = make_ring(2, ["x", "y"])
    d = gluing_certificate(ID, S, ["x", "y"], "x+y", "y", S.ideal("x*y", "y^2")).to_dict()
    d["coefficients"] = ["1", "0"]
    with pytest.raises(C.CertificateError):
        C.recheck(d)


def test_oracle_input_restrictions():
    R = make_ring(2, ["x", "y"])
    with pytest.raises(UnsupportedInput):
        MIC.member("x", R.ideal("x+y"))
    with pytest.raises(UnsupportedInput):
        MIC.member("x", make_ring(2, ["x", "y"], ["x*y"]).ideal("x"))
    with pytest.raises(UnsupportedInput):
        RAD.member(("x", "y"), R.module(2, [("x", "0")]))
    with pytest.raises(ValueError):
        make_oracle("nonsense")


def test_integral_closure_examples():
    R = make_ring(2, ["x", "y"])
    I = R.ideal("x^2", "y^2")
    v = MIC.member("x*y", I)
    assert v.is_in and v.certificate["kind"] == "newton"
    C.recheck(v.certificate)
    v = MIC.member("x", I)
    assert v.is_not_in and v.certificate["kind"] == "newton_separation"
    C.recheck(v.certificate)


class _Shrinking(ClosureOracle):
    """Not extensive: claims nothing is in the closure."""

    name = "shrinking"

    def member(self, z, L):
        return Verdict("NotIn", {"kind": "none"}, "always out")


class _Shy(ClosureOracle):
    name = "shy"

    def member(self, z, L):
        return Verdict(UNKNOWN, None, "never sure", bound={"q_max": 0})


def test_checkers_fail_with_counterexample():
    R = make_ring(2, ["x", "y"])
    rep = check_extensive(_Shrinking(), [R.ideal("x")])
    assert rep.outcome == FAIL and rep.counterexample["element"] == ["x"]


def test_unknown_never_passes():
    R = make_ring(2, ["x", "y"])
    shy = _Shy()
    assert check_extensive(shy, [R.ideal("x")]).outcome == INCONCLUSIVE
    assert check_idempotent(shy, [R.ideal("x")], 1).outcome == INCONCLUSIVE
    assert check_open_persistence(shy, R, "y", [("x", R.ideal("x"))]).outcome == INCONCLUSIVE
    v = global_from_unit_cover(shy, R, ["x", "x+1"], "x", R.ideal("x"))
    assert v.is_unknown


def test_order_preserving_rejects_bad_samples():
    R = make_ring(2, ["x", "y"])
    with pytest.raises(ValueError):
        check_order_preserving(RAD, [(R.ideal("x"), R.ideal("y"))])


# --- properties ------------------------------------------------------------


@settings(max_examples=150)
@given(st.integers(0, 10**6))
def test_newton_matches_power_criterion(seed):
    r = rng(seed)
    R = make_ring(2, ["x", "y", "z"][: r.choice([1, 2, 3])])
    I = random_monomial_ideal(R, r, r.randint(1, 3), 3)
    G = [g.lead_exps() for g in I.ideal_gens]
    e = r.choice(R.ambient.monomials_up_to(4))
    v = MIC.member(R.ambient.monomial(e), I)
    C.recheck(v.certificate)
    # brute force: x^{k e} in I^k for some k <= 6 (k up to the dimension bound suffices here)
    assert v.is_in == monomial_in_integral_closure(e, G, 6)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_radical_certificates_recheck(seed):
    r = rng(seed)
    R = make_ring(r.choice([2, 3]), ["x", "y"])
    I = R.ideal(*(R.ambient.monomial(e) + R.ambient.monomial(f) for e, f in [(r.choice(R.ambient.monomials_up_to(3)), r.choice(R.ambient.monomials_up_to(3)))]))
    for z in R.ambient.monomials_up_to(2):
        v = RAD.member(R.ambient.monomial(z), I)
        assert v.status in ("In", "NotIn")
        C.recheck(v.certificate)
