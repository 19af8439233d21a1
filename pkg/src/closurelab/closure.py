"""Pluggable (pre)closure operations and the property checkers that audit them.

An oracle answers "is z in the closure of L inside M?" with a three-valued
:class:`~closurelab.verdict.Verdict`.  Its capability flags are claims
only; the checkers below test them and never turn ``Unknown`` into a pass.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from . import certificates as C
from .algebra import Poly
from .groebner import IdealPresentation, radical_membership
from .newton import convex_weights, separating_weights
from .rings import (
    LocalizedRing,
    NotAUnitCover,
    PresentedRing,
    Submodule,
    canonical_map,
    is_unit_cover,
    localize,
)
from .verdict import IN, NOT_IN, UNKNOWN, Verdict

__all__ = [
    "PreconditionError",
    "UnsupportedInput",
    "ClosureOracle",
    "IdentityOracle",
    "RadicalOracle",
    "MonomialIntegralClosureOracle",
    "AxiomReport",
    "check_extensive",
    "check_order_preserving",
    "check_idempotent",
    "check_open_persistence",
    "check_glueable",
    "check_generator_independence",
    "global_from_unit_cover",
    "GluingCertificate",
    "GluingFailure",
    "gluing_certificate",
    "chart_verdict",
    "parallel_map",
]


class PreconditionError(ValueError):
    """A checker's mathematical hypothesis does not hold for the given input."""


class UnsupportedInput(ValueError):
    """The oracle is not defined on this kind of input (e.g. non-monomial ideal)."""


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-preserving map, threaded up to CLOSURELAB_THREADS workers."""
    try:
        n = int(os.environ.get("CLOSURELAB_THREADS", "1"))
    except ValueError:
        n = 1
    items = list(items)
    if n <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


class ClosureOracle:
    """Base class; subclasses implement :meth:`member`."""

    name = "abstract"
    is_idempotent_claimed = False
    commutes_with_single_localization_claimed = False
    glueable_claimed = False
    exact = False

    def member(self, z, L: Submodule) -> Verdict:
        raise NotImplementedError

    def pool(self, L: Submodule, bound: int) -> List[Tuple[Poly, ...]]:
        """Candidate elements for pool probes: monomials times basis vectors."""
        out = []
        for m in L.ring.monomials(bound):
            for i in range(L.rank):
                out.append(tuple(m if k == i else L.ring.ambient.zero() for k in range(L.rank)))
        return out

    def capabilities(self) -> dict:
        return {
            "name": self.name,
            "is_idempotent_claimed": self.is_idempotent_claimed,
            "commutes_with_single_localization_claimed": self.commutes_with_single_localization_claimed,
            "glueable_claimed": self.glueable_claimed,
            "exact": self.exact,
        }

    def params(self) -> dict:
        return {}

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"


class IdentityOracle(ClosureOracle):
    """L^cl = L."""

    name = "identity"
    is_idempotent_claimed = True
    commutes_with_single_localization_claimed = True
    glueable_claimed = True
    exact = True

    def member(self, z, L):
        inside, cert = L.membership(z)
        return Verdict(IN if inside else NOT_IN, cert, "plain membership")


class RadicalOracle(ClosureOracle):
    """Radical of an ideal, decided with the auxiliary-variable trick."""

    name = "radical"
    is_idempotent_claimed = True
    commutes_with_single_localization_claimed = True
    glueable_claimed = True
    exact = True

    def __init__(self, nmax: int = 64):
        self.nmax = nmax

    def params(self):
        return {"nmax": self.nmax}

    def member(self, z, L):
        if not L.is_ideal:
            raise UnsupportedInput("the radical oracle acts on ideals only")
        R = L.ring
        (g,) = L.vector(z)
        A = R.ambient
        gens = L.ideal_gens + R.relations
        res = radical_membership(g, IdealPresentation(A, gens), nmax=self.nmax)
        if res.member and not res.degraded:
            k = len(L.gens)
            co = res.coefficients
            inner = C.membership_certificate(
                A, (g.power(res.exponent),), L.gens, (), R.relations, co[:k], (), [co[k:]]
            )
            cert = {
                "kind": "radical",
                "ring": C.ring_spec(A),
                "element": str(g),
                "exponent": res.exponent,
                "ideal": [str(h) for h in L.ideal_gens],
                "relations": [str(h) for h in R.relations],
                "power_membership": inner,
            }
            return Verdict(IN, cert, f"g^{res.exponent} in the ideal")
        # witness for the auxiliary-variable test: 1 against (I, t*g - 1)
        t = "_t"
        while t in A.variables:
            t += "_"
        E = A.extend([t], front=True)
        aux = E.var(t) * g.embed(E) - 1
        egens = tuple(h.embed(E) for h in gens) + (aux,)
        pres = IdealPresentation(E, egens)
        from .groebner import ideal_membership

        mc = ideal_membership(E.one(), pres)
        if res.member:
            cert = C.membership_certificate(
                E, (E.one(),), [(h,) for h in egens], (), (), mc.coefficients, (), [()]
            )
            return Verdict(IN, cert, f"1 in (I, t*g - 1); power above nmax={self.nmax}", bound={"nmax": self.nmax})
        cert = C.nonmembership_certificate(E, (E.one(),), [(h,) for h in egens], (), (), (mc.normal_form,))
        return Verdict(NOT_IN, cert, "1 not in (I, t*g - 1)")


class MonomialIntegralClosureOracle(ClosureOracle):
    """Integral closure of monomial ideals in a polynomial ring via the Newton polyhedron."""

    name = "monomial_integral_closure"
    is_idempotent_claimed = True
    commutes_with_single_localization_claimed = True
    glueable_claimed = True
    exact = True

    def _exponents(self, L: Submodule):
        R = L.ring
        if R.relations or isinstance(R, LocalizedRing):
            raise UnsupportedInput("monomial integral closure needs a polynomial ring")
        if not L.is_ideal:
            raise UnsupportedInput("monomial integral closure acts on ideals only")
        gens = [g for g in L.ideal_gens if not g.is_zero()]
        if not all(g.is_monomial() for g in gens):
            raise UnsupportedInput("generators must be monomials")
        return [g.lead_exps() for g in gens]

    def member(self, z, L):
        G = self._exponents(L)
        (g,) = L.vector(z)
        ring = C.ring_spec(L.ring.ambient)
        if g.is_zero():
            return Verdict(IN, {"kind": "newton", "ring": ring, "exponents": [list(x) for x in G], "terms": []}, "zero is in every ideal")
        if not G:
            return Verdict(NOT_IN, C.nonmembership_certificate(L.ring.ambient, (g,), (), (), (), (g,)), "closure of the zero ideal is zero")
        terms = []
        for e, _ in g.sorted_terms():
            sep = separating_weights(G, e)
            if sep is not None:
                cert = {
                    "kind": "newton_separation",
                    "ring": ring,
                    "monomial": list(e),
                    "exponents": [list(x) for x in G],
                    "weights": [str(x) for x in sep],
                }
                return Verdict(NOT_IN, cert, f"a term's exponent {list(e)} is cut off by a facet")
            lam = convex_weights(G, e)
            if lam is None:
                raise AssertionError(f"facet test and convex search disagree on {e}")
            terms.append({"monomial": list(e), "weights": [str(x) for x in lam]})
        return Verdict(IN, {"kind": "newton", "ring": ring, "exponents": [list(x) for x in G], "terms": terms}, "every term in the Newton polyhedron")

    def pool(self, L, bound):
        return [(m,) for m in L.ring.monomials(bound)]


# --- reports -----------------------------------------------------------------

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class AxiomReport:
    axiom: str
    outcome: str = PASS
    counterexample: Optional[dict] = None
    samples: int = 0
    probes: int = 0
    bounds: dict = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def record_unknown(self, note: str):
        if self.outcome == PASS:
            self.outcome = INCONCLUSIVE
        if len(self.notes) < 20:
            self.notes.append(note)

    def record_fail(self, counterexample: dict):
        if self.outcome != FAIL:
            self.outcome = FAIL
            self.counterexample = counterexample

    @property
    def passed(self) -> bool:
        return self.outcome == PASS

    def merge(self, other: "AxiomReport"):
        self.samples += other.samples
        self.probes += other.probes
        if other.outcome == FAIL:
            self.record_fail(other.counterexample)
        elif other.outcome == INCONCLUSIVE:
            for n in other.notes or ["inconclusive"]:
                self.record_unknown(n)

    def to_dict(self) -> dict:
        d = {
            "axiom": self.axiom,
            "outcome": self.outcome,
            "samples": self.samples,
            "probes": self.probes,
            "bounds": self.bounds,
        }
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.notes:
            d["notes"] = self.notes
        return d


def _vs(v) -> List[str]:
    return [str(c) for c in v]


def _instance(z, L: Submodule, **extra) -> dict:
    d = {"element": _vs(L.vector(z)), "submodule": [_vs(v) for v in L.gens], "ring": L.ring.spec()}
    if L.relations:
        d["relations"] = [_vs(v) for v in L.relations]
    d.update(extra)
    return d


def check_extensive(cl: ClosureOracle, samples: Sequence[Submodule]) -> AxiomReport:
    """Every generator of L lies in L^cl."""
    rep = AxiomReport("extensive")

    def one(L):
        r = AxiomReport("extensive", samples=1)
        for v in L.gens:
            r.probes += 1
            ver = cl.member(v, L)
            if ver.is_not_in:
                r.record_fail(_instance(v, L, verdict=ver.to_dict()))
            elif ver.is_unknown:
                r.record_unknown(f"unknown on generator {_vs(v)}")
        return r

    for r in parallel_map(one, samples):
        rep.merge(r)
    return rep


def check_order_preserving(cl: ClosureOracle, pairs: Sequence[Tuple[Submodule, Submodule]], pool_bound: int = 2) -> AxiomReport:
    """K <= L implies K^cl <= L^cl, probed on generators and a pool."""
    rep = AxiomReport("order_preserving", bounds={"pool_bound": pool_bound})
    for K, L in pairs:
        if K.rank != L.rank or any(not L.contains(v) for v in K.gens):
            raise ValueError("order-preservation samples must satisfy K <= L")

    def one(pair):
        K, L = pair
        r = AxiomReport("order_preserving", samples=1)
        probes = list(K.gens) + list(L.gens) + cl.pool(K, pool_bound)
        seen = set()
        for v in probes:
            if v in seen:
                continue
            seen.add(v)
            r.probes += 1
            a = cl.member(v, K)
            if a.is_unknown:
                r.record_unknown(f"unknown on {_vs(v)} for K")
                continue
            if a.is_not_in:
                continue
            b = cl.member(v, L)
            if b.is_not_in:
                r.record_fail(_instance(v, K, larger=[_vs(w) for w in L.gens], verdict_K=a.to_dict(), verdict_L=b.to_dict()))
            elif b.is_unknown:
                r.record_unknown(f"unknown on {_vs(v)} for L")
        return r

    for r in parallel_map(one, pairs):
        rep.merge(r)
    return rep


def check_idempotent(cl: ClosureOracle, samples: Sequence[Submodule], pool_bound: int = 3) -> AxiomReport:
    """Pool probe: anything in (L + P)^cl, with P the pool part of L^cl, is already in L^cl."""
    rep = AxiomReport("idempotent", bounds={"pool_bound": pool_bound})

    def one(L):
        r = AxiomReport("idempotent", samples=1)
        pool = cl.pool(L, pool_bound)
        inside, unknown = [], False
        first = {}
        for v in pool:
            r.probes += 1
            ver = cl.member(v, L)
            first[v] = ver
            if ver.is_in:
                inside.append(v)
            elif ver.is_unknown:
                unknown = True
        if unknown:
            r.record_unknown("unknown while collecting the closure pool")
        big = L.extend(inside)
        for v in pool:
            if first[v].is_in:
                continue
            r.probes += 1
            ver = cl.member(v, big)
            if ver.is_in:
                if first[v].is_not_in:
                    r.record_fail(
                        _instance(v, L, enlarged=[_vs(w) for w in big.gens], verdict_enlarged=ver.to_dict(), verdict=first[v].to_dict())
                    )
                else:
                    r.record_unknown(f"{_vs(v)} in the enlarged closure, unknown for L")
            elif ver.is_unknown:
                r.record_unknown(f"unknown on {_vs(v)} for the enlarged module")
        return r

    for r in parallel_map(one, samples):
        rep.merge(r)
    return rep


def chart_verdict(cl: ClosureOracle, z, L: Submodule, chart) -> Verdict:
    """Verdict for z/1 in (L_f)^cl over R_f; ``chart`` is f or a ready LocalizedRing."""
    Rf = chart if isinstance(chart, LocalizedRing) else localize(L.ring, chart)
    phi = canonical_map(L.ring, Rf)
    return cl.member(phi.vector(L.vector(z)), L.transport(phi))


def check_open_persistence(cl: ClosureOracle, ring: PresentedRing, f, samples) -> AxiomReport:
    """z in L^cl over R implies z/1 not NotIn (L_f)^cl over R_f."""
    f = ring._coerce(f)
    if ring.is_zero(f):
        raise PreconditionError("open persistence needs f nonzero")
    rep = AxiomReport("open_persistence", bounds={"f": str(f)})
    Rf = localize(ring, f)

    def one(inst):
        z, L = inst
        r = AxiomReport("open_persistence", samples=1)
        v = cl.member(z, L)
        r.probes += 1
        if v.is_unknown:
            r.record_unknown(f"base verdict unknown for {_vs(L.vector(z))}")
            return r
        if v.is_not_in:
            return r
        w = chart_verdict(cl, z, L, Rf)
        r.probes += 1
        if w.is_not_in:
            r.record_fail(_instance(z, L, f=str(f), base=v.to_dict(), transported=w.to_dict()))
        elif w.is_unknown:
            r.record_unknown(f"transported verdict unknown for {_vs(L.vector(z))}")
        return r

    for r in parallel_map(one, samples):
        rep.merge(r)
    return rep


def _require_radical(ring: PresentedRing, g: Poly, gens: Sequence[Poly], what: str):
    res = radical_membership(g, IdealPresentation(ring.ambient, tuple(gens) + ring.relations), nmax=ring.nmax)
    if not res.member:
        raise PreconditionError(f"{g} is not in the radical of ({', '.join(map(str, gens))}){what}")
    return res


def _all_charts(cl, z, L, fs) -> Tuple[Optional[bool], list]:
    """True if In on every chart, False if NotIn on some chart, None otherwise."""
    verdicts = [chart_verdict(cl, z, L, f) for f in fs]
    if any(v.is_not_in for v in verdicts):
        return False, verdicts
    if all(v.is_in for v in verdicts):
        return True, verdicts
    return None, verdicts


def check_glueable(cl: ClosureOracle, ring: PresentedRing, cover, g, instances) -> AxiomReport:
    """Local membership on every D(f_a) forces membership on D(g) for g in sqrt(f_a)."""
    fs = [ring._coerce(f) for f in cover]
    g = ring._coerce(g)
    _require_radical(ring, g, fs, ": glueability hypothesis fails")
    rep = AxiomReport("glueable", bounds={"cover": _vs(fs), "g": str(g)})

    def one(inst):
        z, L = inst
        r = AxiomReport("glueable", samples=1)
        local, verdicts = _all_charts(cl, z, L, fs)
        r.probes += len(fs)
        if local is None:
            r.record_unknown(f"chart verdict unknown for {_vs(L.vector(z))}")
            return r
        if not local:
            return r
        w = chart_verdict(cl, z, L, g)
        r.probes += 1
        if w.is_not_in:
            r.record_fail(_instance(z, L, cover=_vs(fs), g=str(g), verdict_g=w.to_dict()))
        elif w.is_unknown:
            r.record_unknown(f"verdict on D(g) unknown for {_vs(L.vector(z))}")
        return r

    for r in parallel_map(one, instances):
        rep.merge(r)
    return rep


def check_generator_independence(cl: ClosureOracle, ring: PresentedRing, gens_a, gens_b, instances) -> AxiomReport:
    """All-charts membership agrees for two generating sets with the same radical."""
    A = [ring._coerce(f) for f in gens_a]
    B = [ring._coerce(f) for f in gens_b]
    for g in B:
        _require_radical(ring, g, A, ": generating sets have different radicals")
    for g in A:
        _require_radical(ring, g, B, ": generating sets have different radicals")
    rep = AxiomReport("generator_independence", bounds={"A": _vs(A), "B": _vs(B)})

    def one(inst):
        z, L = inst
        r = AxiomReport("generator_independence", samples=1)
        a, _ = _all_charts(cl, z, L, A)
        b, _ = _all_charts(cl, z, L, B)
        r.probes += len(A) + len(B)
        if a is None or b is None:
            r.record_unknown(f"unknown chart verdict for {_vs(L.vector(z))}")
        elif a != b:
            r.record_fail(_instance(z, L, local_A=a, local_B=b))
        return r

    for r in parallel_map(one, instances):
        rep.merge(r)
    return rep


def global_from_unit_cover(cl: ClosureOracle, ring: PresentedRing, cover, z, L: Submodule) -> Verdict:
    """Decide z in L^cl from chart verdicts over a cover generating the unit ideal."""
    try:
        ucert = is_unit_cover(ring, cover)
    except NotAUnitCover as exc:
        raise PreconditionError(str(exc)) from exc
    fs = ucert.elements
    verdicts = parallel_map(lambda f: chart_verdict(cl, z, L, f), fs)
    charts = [{"f": str(f), "verdict": v.to_dict()} for f, v in zip(fs, verdicts)]
    bundle = {"unit_cover": ucert.to_dict(), "charts": charts}
    for f, v in zip(fs, verdicts):
        if v.is_not_in:
            return Verdict(NOT_IN, {"kind": "bundle", "parts": [ucert.to_dict()] + _certs(verdicts)}, f"NotIn on chart D({f})", data=bundle)
    if any(v.is_unknown for v in verdicts):
        return Verdict(UNKNOWN, None, "some chart verdict is unknown", bound={"charts": charts}, data=bundle)
    if not cl.glueable_claimed:
        return Verdict(UNKNOWN, None, "In on every chart, but the oracle does not claim glueability", bound={"charts": charts}, data=bundle)
    bounded = any(v.bounded for v in verdicts)
    return Verdict(
        IN,
        {"kind": "bundle", "parts": [ucert.to_dict()] + _certs(verdicts)},
        "In on every chart of a unit cover (glueable oracle)",
        bounded=bounded,
        data=bundle,
    )


def _certs(verdicts) -> list:
    return [v.certificate for v in verdicts if v.certificate is not None and v.certificate.get("kind") in C.KINDS]


class GluingFailure(RuntimeError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial or {}


@dataclass
class GluingCertificate:
    ring: PresentedRing
    g: Poly
    N: int
    cover: Tuple[Poly, ...]
    exponents: Tuple[int, ...]
    coefficients: Tuple[Poly, ...]
    relation_coefficients: Tuple[Poly, ...]
    chart_evidence: list = field(default_factory=list)
    conclusion: Optional[Verdict] = None

    def __post_init__(self):
        C.recheck(self.to_dict())

    def to_dict(self) -> dict:
        d = {
            "kind": "gluing",
            "ring": C.ring_spec(self.ring.ambient),
            "g": str(self.g),
            "N": self.N,
            "cover": [str(f) for f in self.cover],
            "exponents": list(self.exponents),
            "coefficients": [str(r) for r in self.coefficients],
            "relations": [str(h) for h in self.ring.relations],
            "relation_coefficients": [str(s) for s in self.relation_coefficients],
            "chart_evidence": [e if e and e.get("kind") in C.KINDS else None for e in self.chart_evidence],
        }
        return d


def gluing_certificate(cl: ClosureOracle, ring: PresentedRing, cover, g, z, L: Submodule, *, nmax: Optional[int] = None) -> GluingCertificate:
    """Constructive glueability: n_a with f_a^{n_a} z in L^cl, then g^N = sum r_i f_i^{n_i}."""
    if not cl.commutes_with_single_localization_claimed:
        raise PreconditionError(f"{cl.name} does not claim to commute with localization")
    nmax = ring.nmax if nmax is None else nmax
    fs = tuple(ring._coerce(f) for f in cover)
    g = ring._coerce(g)
    _require_radical(ring, g, fs, "")
    local, verdicts = _all_charts(cl, z, L, fs)
    if not local:
        raise PreconditionError("z is not In the closure on every chart")
    z = L.vector(z)
    exps, evidence = [], []
    for f in fs:
        power = ring.ambient.one()
        for n in range(nmax + 1):
            v = cl.member(tuple(power * c for c in z), L)
            if v.is_in:
                exps.append(n)
                evidence.append(v.certificate)
                break
            power = power * f
        else:
            raise GluingFailure(f"no n <= {nmax} with ({f})^n z in the closure", {"exponents": exps})
    powers = [f.power(n) for f, n in zip(fs, exps)]
    res = radical_membership(g, IdealPresentation(ring.ambient, tuple(powers) + ring.relations), nmax=nmax)
    if not res.member or res.degraded:
        raise GluingFailure(f"no N <= {nmax} with g^N in (f_a^n_a)", {"exponents": exps})
    k = len(fs)
    cert = GluingCertificate(
        ring, g, res.exponent, fs, tuple(exps), res.coefficients[:k], res.coefficients[k:], evidence
    )
    if cl.exact:
        gz = tuple(g.power(res.exponent) * c for c in z)
        cert.conclusion = cl.member(gz, L)
        if not cert.conclusion.is_in:
            raise GluingFailure("g^N z is not In the closure despite a valid identity", {"certificate": cert.to_dict()})
    return cert
