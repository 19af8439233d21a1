"""Characteristic-p machinery: bracket powers, bounded a^t-tight closure tests,
witness search, Frobenius closure certificates and spread-out checks.

Tight closure is only semi-decidable here.  Frobenius closure gives exact
``In`` answers; everything else is evidence on a finite range of q and is
labelled ``bounded``.  ``NotIn`` is never produced for tight closure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from typing import Callable, List, Optional, Sequence, Tuple

from . import certificates as C
from .algebra import Poly, ceil_scale, frobenius_vector_power, is_power_of, is_prime, parse_rational
from .closure import ClosureOracle, PreconditionError
from .groebner import IdealPresentation, SubmodulePresentation, groebner_basis, ideal_quotient, same_ideal
from .rings import (
    LocalizedRing,
    PresentedRing,
    Submodule,
    canonical_map,
    element_in_rcirc,
    localize,
)
from .verdict import IN, NOT_IN, UNKNOWN, Verdict

__all__ = [
    "bracket_power",
    "q_range",
    "TightClosureProblem",
    "Witness",
    "SearchResult",
    "at_tc_bounded_membership",
    "tc_bounded_membership",
    "candidate_multipliers",
    "witness_search",
    "plain_witness_search",
    "frobenius_closure_membership",
    "spread_out_check",
    "tc_nonclosed_certificate",
    "transport_problem",
    "check_witness_persistence",
    "FrobeniusBoundedOracle",
    "AtTightClosureOracle",
]


def _check_q(p: int, q: int):
    if not p:
        raise ValueError("Frobenius powers need positive characteristic")
    if not is_power_of(q, p):
        raise ValueError(f"q={q} is not a power of p={p}")


def bracket_power(S, q: int):
    """Frobenius bracket power: generated by q-th powers of the generators.

    For a :class:`Submodule` L of M = R^m / N the result is L^[q] with
    relations N^[q], so membership tests L^[q] + N^[q] inside R^m.
    """
    if isinstance(S, Submodule):
        _check_q(S.ring.characteristic, q)
        return Submodule(
            S.ring,
            S.rank,
            tuple(frobenius_vector_power(v, q) for v in S.gens),
            tuple(frobenius_vector_power(v, q) for v in S.relations),
        )
    if isinstance(S, IdealPresentation):
        _check_q(S.ring.p, q)
        return IdealPresentation(S.ring, tuple(g.power(q) for g in S.gens))
    if isinstance(S, SubmodulePresentation):
        _check_q(S.ring.p, q)
        return SubmodulePresentation(S.ring, S.rank, tuple(frobenius_vector_power(v, q) for v in S.gens))
    raise TypeError(f"cannot take a bracket power of {type(S).__name__}")


def q_range(p: int, q0: int, q_max: int) -> Tuple[int, ...]:
    """Powers of p in [q0, q_max]."""
    _check_q(p, q0)
    out, q = [], q0
    while q <= q_max:
        out.append(q)
        q *= p
    return tuple(out)


@dataclass
class TightClosureProblem:
    """Is z in the a^t-tight closure of L inside M = R^m / N?"""

    ring: PresentedRing
    L: Submodule
    z: Tuple[Poly, ...]
    ideals: Tuple[Tuple[Poly, ...], ...] = ()
    exponents: Tuple[Fraction, ...] = ()
    check_spread: bool = True

    def __post_init__(self):
        p = self.ring.characteristic
        if not p or not is_prime(p):
            raise PreconditionError("tight closure needs a prime characteristic")
        if self.L.ring != self.ring:
            raise ValueError("L does not live over the problem ring")
        self.z = self.L.vector(self.z)
        self.ideals = tuple(tuple(self.ring._coerce(g) for g in a) for a in self.ideals)
        self.exponents = tuple(parse_rational(t) for t in self.exponents)
        if len(self.ideals) != len(self.exponents):
            raise ValueError("one exponent t_i per coefficient ideal")
        if self.check_spread:
            for a in self.ideals:
                v = spread_out_check(a, self.ring)
                if not v.is_in:
                    raise PreconditionError(
                        f"coefficient ideal ({', '.join(map(str, a))}) is not known to avoid the minimal primes: {v.provenance}"
                    )

    @property
    def p(self) -> int:
        return self.ring.characteristic


@dataclass(frozen=True)
class Witness:
    c: Poly
    q0: int
    q_range: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {"c": str(self.c), "q0": self.q0, "q_range": list(self.q_range)}


def _qs(prob_p: int, w: Witness, q_max: Optional[int]) -> Tuple[int, ...]:
    if q_max is None:
        qs = tuple(w.q_range)
        for q in qs:
            _check_q(prob_p, q)
    else:
        if q_max < w.q0:
            raise ValueError("q_max must be at least q0")
        qs = q_range(prob_p, w.q0, q_max)
    if not qs:
        raise ValueError("empty q-range")
    return qs


def _multiplier_ok(c: Poly, R: PresentedRing) -> Optional[Verdict]:
    """None if c is usable, else an Unknown verdict explaining why not."""
    if R.is_zero(c):
        return Verdict(UNKNOWN, None, "multiplier is zero in R", bound={"c": str(c)})
    if c.is_constant():
        return None
    v = element_in_rcirc(c, R)
    if v.is_in:
        return None
    if v.is_not_in:
        raise PreconditionError(f"multiplier {c} lies in a minimal prime")
    return Verdict(UNKNOWN, None, f"cannot decide whether {c} avoids the minimal primes", bound={"c": str(c)})


def _products(ideals, exps, q):
    """Index choices for every generator product of a_1^ceil(t_1 q) ... a_n^ceil(t_n q)."""
    per = [list(combinations_with_replacement(range(len(a)), ceil_scale(t, q))) for a, t in zip(ideals, exps)]
    for combo in product(*per):
        yield [list(ix) for ix in combo]


def at_tc_bounded_membership(prob: TightClosureProblem, w: Witness, q_max: Optional[int] = None) -> Verdict:
    """Test c * a_1^ceil(t_1 q) ... a_n^ceil(t_n q) * z^q in L^[q] + N^[q] for each tested q.

    A full pass is ``In`` with ``bounded=True``; the first failing q gives
    ``Unknown`` for this witness with the non-membership fact attached.
    """
    R = prob.ring
    qs = _qs(prob.p, w, q_max)
    c = R._coerce(w.c)
    bad = _multiplier_ok(c, R)
    if bad is not None:
        return bad
    A = R.ambient
    checks = []
    for q in qs:
        Lq = bracket_power(prob.L, q)
        zq = frobenius_vector_power(prob.z, q)
        items = []
        for choice in _products(prob.ideals, prob.exponents, q):
            m = c
            for a, idx in zip(prob.ideals, choice):
                for k in idx:
                    m = m * a[k]
            elt = tuple(m * x for x in zq)
            if not Lq.contains(elt):
                _, non = Lq.membership(elt)
                return Verdict(
                    UNKNOWN,
                    non,
                    f"witness c={c} fails at q={q}",
                    bound={"failed_q": q, "witness": Witness(c, w.q0, qs).to_dict()},
                    data={"failed_q": q},
                )
            _, mem = Lq.membership(elt)
            items.append({"choice": choice, "membership": mem})
        checks.append({"q": q, "powers": [ceil_scale(t, q) for t in prob.exponents], "products": items})
    cert = {
        "kind": "tc_bounded",
        "ring": C.ring_spec(A),
        "multiplier": str(c),
        "element": [str(x) for x in prob.z],
        "coefficient_ideals": [[str(g) for g in a] for a in prob.ideals],
        "exponents": [str(t) for t in prob.exponents],
        "L": [[str(x) for x in v] for v in prob.L.gens],
        "N": [[str(x) for x in v] for v in prob.L.relations],
        "checks": checks,
    }
    wit = Witness(c, w.q0, qs)
    return Verdict(
        IN,
        cert,
        f"c={c} passes at q in {list(qs)} (bounded evidence)",
        bound={"witness": wit.to_dict()},
        bounded=True,
        data={"witness": wit},
    )


def tc_bounded_membership(R: PresentedRing, L: Submodule, z, w: Witness, q_max: Optional[int] = None) -> Verdict:
    """Plain tight closure test c z^q in L^[q] (+ N^[q]), independent of the a^t path."""
    p = R.characteristic
    qs = _qs(p, w, q_max)
    c = R._coerce(w.c)
    z = L.vector(z)
    bad = _multiplier_ok(c, R)
    if bad is not None:
        return bad
    checks = []
    for q in qs:
        gens = tuple(tuple(x.power(q) for x in v) for v in L.gens)
        rels = tuple(tuple(x.power(q) for x in v) for v in L.relations)
        target = Submodule(R, L.rank, gens, rels)
        elt = tuple(c * x.power(q) for x in z)
        inside, cert = target.membership(elt)
        if not inside:
            return Verdict(
                UNKNOWN,
                cert,
                f"witness c={c} fails at q={q}",
                bound={"failed_q": q, "witness": Witness(c, w.q0, qs).to_dict()},
                data={"failed_q": q},
            )
        checks.append({"q": q, "powers": [], "products": [{"choice": [], "membership": cert}]})
    cert = {
        "kind": "tc_bounded",
        "ring": C.ring_spec(R.ambient),
        "multiplier": str(c),
        "element": [str(x) for x in z],
        "coefficient_ideals": [],
        "exponents": [],
        "L": [[str(x) for x in v] for v in L.gens],
        "N": [[str(x) for x in v] for v in L.relations],
        "checks": checks,
    }
    wit = Witness(c, w.q0, qs)
    return Verdict(
        IN,
        cert,
        f"c={c} passes at q in {list(qs)} (bounded evidence)",
        bound={"witness": wit.to_dict()},
        bounded=True,
        data={"witness": wit},
    )


def candidate_multipliers(R: PresentedRing, d: int) -> List[Poly]:
    """Monomials of degree <= d, then sums of two distinct monomials, in degree-then-lex order."""
    mons = R.monomials(d)
    out = list(mons)
    out.extend(a + b for a, b in combinations(mons, 2))
    return out


@dataclass
class SearchResult:
    witness: Optional[Witness]
    verdict: Verdict
    tried: int
    bounds: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.witness is not None


def _search(R, test: Callable[[Witness], Verdict], d: int, q_set: Sequence[int]) -> SearchResult:
    q_set = tuple(sorted(set(q_set)))
    if not q_set:
        raise ValueError("q_set must be nonempty")
    for q in q_set:
        _check_q(R.characteristic, q)
    bounds = {"degree_bound": d, "q_set": list(q_set)}
    tried = 0
    seen = set()
    for c in candidate_multipliers(R, d):
        cn = R.element(c)
        if cn.is_zero() or cn in seen:
            continue
        seen.add(cn)
        if not cn.is_constant() and not element_in_rcirc(c, R).is_in:
            continue
        tried += 1
        v = test(Witness(c, q_set[0], q_set))
        if v.is_in:
            return SearchResult(v.data["witness"], v, tried, bounds)
    v = Verdict(UNKNOWN, None, f"no witness among {tried} candidates", bound=bounds)
    return SearchResult(None, v, tried, bounds)


def witness_search(prob: TightClosureProblem, d: int = 3, q_set: Optional[Sequence[int]] = None) -> SearchResult:
    """First multiplier c in R deg <= d passing the bounded test on q_set."""
    p = prob.p
    q_set = q_set or q_range(p, p, p**3)
    return _search(prob.ring, lambda w: at_tc_bounded_membership(prob, w), d, q_set)


def plain_witness_search(R: PresentedRing, L: Submodule, z, d: int = 3, q_set: Optional[Sequence[int]] = None) -> SearchResult:
    p = R.characteristic
    q_set = q_set or q_range(p, p, p**3)
    z = L.vector(z)
    return _search(R, lambda w: tc_bounded_membership(R, L, z, w), d, q_set)


def frobenius_closure_membership(z, L: Submodule, q_max: int) -> Verdict:
    """Least q <= q_max with z^q in L^[q] + N^[q]; exact In, else Unknown."""
    R = L.ring
    p = R.characteristic
    if not p:
        raise PreconditionError("Frobenius closure needs positive characteristic")
    z = L.vector(z)
    q = 1
    while q <= q_max:
        Lq = bracket_power(L, q)
        zq = frobenius_vector_power(z, q)
        if Lq.contains(zq):
            _, mem = Lq.membership(zq)
            cert = {
                "kind": "frobenius",
                "ring": C.ring_spec(R.ambient),
                "q": q,
                "element": [str(x) for x in z],
                "L": [[str(x) for x in v] for v in L.gens],
                "N": [[str(x) for x in v] for v in L.relations],
                "membership": mem,
            }
            return Verdict(IN, cert, f"z^{q} in the bracket power", data={"q": q})
        q *= p
    return Verdict(UNKNOWN, None, f"z^q not in L^[q] for q <= {q_max}", bound={"q_max": q_max})


def _ideal_annihilator_witness(R: PresentedRing, a: Sequence[Poly]) -> Optional[Poly]:
    """h outside J_rad with h*a in J_rad, or None if a avoids every minimal prime."""
    rad = R.J_rad
    quo = rad
    for g in a:
        quo_g = ideal_quotient(rad, g)
        from .groebner import intersect_ideals

        quo = quo_g if quo is rad else intersect_ideals(quo, quo_g)
    if same_ideal(quo, rad):
        return None
    gb = groebner_basis(rad)
    return next(h for h in quo.gens if not gb.contains(h))


def spread_out_check(a: Sequence, R: PresentedRing, d: int = 3) -> Verdict:
    """Does the ideal a contain an element avoiding every minimal prime of R?

    Searches generators, then monomial multiples and two-term combinations.
    If the search fails and a radical presentation is available, the exact
    annihilator criterion (J_rad : a) = J_rad decides.
    """
    gens = [R._coerce(g) for g in a]
    gens = [g for g in gens if not R.is_zero(g)]
    if not gens:
        return Verdict(NOT_IN, None, "the ideal is zero", data={"element": None})
    if R.assert_domain:
        return Verdict(IN, None, f"{gens[0]} is a nonzero element of a domain", data={"element": str(gens[0])})
    if R.radical is None:
        return Verdict(UNKNOWN, None, "no radical presentation available", bound={"radical": None})
    cands = list(gens)
    mons = R.monomials(d)
    cands += [m * g for g in gens for m in mons[1:]]
    cands += [gi + m * gj for gi, gj in combinations(gens, 2) for m in mons]
    seen = set()
    for c in cands:
        cn = R.element(c)
        if cn.is_zero() or cn in seen:
            continue
        seen.add(cn)
        v = element_in_rcirc(c, R)
        if v.is_in:
            return Verdict(IN, v.certificate, f"{c} lies in the ideal and avoids the minimal primes", data={"element": str(c)})
    h = _ideal_annihilator_witness(R, gens)
    if h is None:
        return Verdict(IN, None, "(J_rad : a) = J_rad: no minimal prime contains the ideal", data={"element": None})
    rad = Submodule(PresentedRing(R.ambient, R.radical, validate=False), 1, ())
    parts = [rad.membership((h * g,))[1] for g in gens]
    parts.append(rad.membership((h,))[1])
    cert = {"kind": "bundle", "parts": parts}
    return Verdict(NOT_IN, cert, f"h = {h} annihilates the ideal modulo the radical", data={"annihilator": str(h)})


def tc_nonclosed_certificate(I: Submodule, d: int = 3, q_max: Optional[int] = None):
    """First z (degree <= d) with z not in I but z in I^F, or None.

    The hit certifies z in I^* \\ I exactly.  Returns (z, q, certificate).
    """
    R = I.ring
    p = R.characteristic
    if not p:
        raise PreconditionError("needs positive characteristic")
    q_max = q_max or p**3
    for c in candidate_multipliers(R, d):
        z = (c,) + tuple(R.ambient.zero() for _ in range(I.rank - 1))
        inside, non = I.membership(z)
        if inside:
            continue
        v = frobenius_closure_membership(z, I, q_max)
        if v.is_in:
            cert = {"kind": "semifreg_witness", "ring": C.ring_spec(R.ambient), "nonmembership": non, "frobenius": v.certificate}
            return z if I.rank > 1 else c, v.data["q"], cert
    return None


def transport_problem(prob: TightClosureProblem, f) -> TightClosureProblem:
    """The same problem over R_f."""
    Rf = localize(prob.ring, f)
    phi = canonical_map(prob.ring, Rf)
    return TightClosureProblem(
        Rf,
        prob.L.transport(phi),
        phi.vector(prob.z),
        tuple(tuple(phi(g) for g in a) for a in prob.ideals),
        prob.exponents,
        check_spread=False,
    )


def check_witness_persistence(prob: TightClosureProblem, w: Witness, fs: Sequence) -> dict:
    """Re-run a passing witness over each R_f on the same q-range."""
    from .closure import AxiomReport

    rep = AxiomReport("witness_persistence", bounds={"q_range": list(w.q_range), "charts": [str(f) for f in fs]})
    base = at_tc_bounded_membership(prob, w)
    if not base.is_in:
        raise PreconditionError("the witness does not pass over R")
    charts = []
    for f in fs:
        f = prob.ring._coerce(f)
        if prob.ring.is_zero(f):
            continue
        tp = transport_problem(prob, f)
        if tp.ring.degenerate:
            continue
        rep.samples += 1
        rep.probes += len(w.q_range)
        phi = canonical_map(prob.ring, tp.ring)
        v = at_tc_bounded_membership(tp, Witness(phi(w.c), w.q0, w.q_range))
        charts.append({"f": str(f), "verdict": v.to_dict()})
        if not v.is_in:
            rep.record_fail({"f": str(f), "verdict": v.to_dict()})
    out = rep.to_dict()
    out["charts"] = charts
    return out


class FrobeniusBoundedOracle(ClosureOracle):
    """In iff z^q in L^[q] for some q <= q_max.

    NotIn only over regular rings (no relations), where L^F = L; Unknown otherwise.
    """

    name = "frobenius_bounded"
    is_idempotent_claimed = True
    commutes_with_single_localization_claimed = True
    glueable_claimed = True
    exact = False

    def __init__(self, q_max: Optional[int] = None):
        self.q_max = q_max

    def params(self):
        return {"q_max": self.q_max}

    def member(self, z, L):
        p = L.ring.characteristic
        v = frobenius_closure_membership(z, L, self.q_max or p**3)
        if v.is_unknown and _is_regular(L.ring):
            # Frobenius is flat over a regular ring, so L^F = L there
            inside, cert = L.membership(z)
            if not inside:
                return Verdict(NOT_IN, cert, "not in L, and L^F = L over a regular ring")
        return v


def _is_regular(R: PresentedRing) -> bool:
    """Polynomial rings and their iterated localizations."""
    return not R.root.relations


class AtTightClosureOracle(ClosureOracle):
    """Bounded a^t-tight closure: Frobenius certificate, else witness search."""

    name = "at_tight_closure_bounded"
    is_idempotent_claimed = False
    commutes_with_single_localization_claimed = False
    glueable_claimed = True
    exact = False

    def __init__(self, ideals=(), exponents=(), q_max: Optional[int] = None, degree_bound: int = 3, q0: Optional[int] = None):
        self.ideals = tuple(tuple(a) for a in ideals)
        self.exponents = tuple(parse_rational(t) for t in exponents)
        self.q_max = q_max
        self.degree_bound = degree_bound
        self.q0 = q0

    def params(self):
        return {
            "ideals": [[str(g) for g in a] for a in self.ideals],
            "exponents": [str(t) for t in self.exponents],
            "q_max": self.q_max,
            "degree_bound": self.degree_bound,
        }

    def problem(self, z, L) -> TightClosureProblem:
        R = L.ring
        phi = canonical_map(R.root, R) if isinstance(R, LocalizedRing) else None
        ideals = tuple(tuple(phi(R.root._coerce(g)) if phi else R._coerce(g) for g in a) for a in self.ideals)
        return TightClosureProblem(R, L, z, ideals, self.exponents)

    def member(self, z, L):
        prob = self.problem(z, L)
        p = prob.p
        q_max = self.q_max or p**3
        if not prob.ideals:
            v = frobenius_closure_membership(prob.z, L, q_max)
            if v.is_in:
                return v
        q0 = self.q0 or p
        res = witness_search(prob, self.degree_bound, q_range(p, q0, q_max) or (q0,))
        return res.verdict
