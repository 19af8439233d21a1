"""Buchberger engine for ideals and submodules of free modules.

Internally every element is a dict ``{(position, exponents): coeff}``; an
ideal is the rank-1 case.  Bases can carry *cofactors*: for each basis
element, its expression as a combination of the input generators.  Those
records are what turn a normal-form-zero into an explicit certificate.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import Poly, PolyRing

__all__ = [
    "IdealPresentation",
    "SubmodulePresentation",
    "GroebnerBasis",
    "DivisionResult",
    "MembershipCertificate",
    "NotInIdeal",
    "groebner_basis",
    "buchberger",
    "divide",
    "ideal_membership",
    "module_membership",
    "is_groebner",
    "same_ideal",
    "same_module",
    "elimination_ideal",
    "intersect_ideals",
    "ideal_quotient",
    "module_quotient",
    "saturation",
    "RadicalResult",
    "radical_membership",
    "express_in_ideal",
    "express_in_module",
]

Vec = Dict[Tuple[int, Tuple[int, ...]], object]


@dataclass(frozen=True)
class IdealPresentation:
    ring: PolyRing
    gens: Tuple[Poly, ...]

    def __post_init__(self):
        gens = tuple(self.gens)
        for g in gens:
            if g.ring.variables != self.ring.variables or g.ring.p != self.ring.p:
                raise ValueError(f"generator {g} not in {self.ring.describe()}")
        object.__setattr__(self, "gens", tuple(Poly(self.ring, g.terms) for g in gens))

    @property
    def rank(self):
        return 1

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")"


@dataclass(frozen=True)
class SubmodulePresentation:
    ring: PolyRing
    rank: int
    gens: Tuple[Tuple[Poly, ...], ...]

    def __post_init__(self):
        out = []
        for v in self.gens:
            v = tuple(v)
            if len(v) != self.rank:
                raise ValueError(f"generator of length {len(v)} in a rank-{self.rank} module")
            out.append(tuple(Poly(self.ring, c.terms) for c in v))
        object.__setattr__(self, "gens", tuple(out))

    def __str__(self):
        return "<" + ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.gens) + ">"


# --- internal vector arithmetic ---------------------------------------------

def _to_vec(x, rank1: bool) -> Vec:
    if rank1:
        return {(0, e): c for e, c in x.terms.items()}
    v: Vec = {}
    for i, comp in enumerate(x):
        for e, c in comp.terms.items():
            v[(i, e)] = c
    return v


def _from_vec(v: Vec, ring: PolyRing, rank: int, rank1: bool):
    comps: List[dict] = [dict() for _ in range(rank)]
    for (i, e), c in v.items():
        comps[i][e] = c
    polys = tuple(Poly(ring, d) for d in comps)
    return polys[0] if rank1 else polys


def _addmul(target: Vec, src: Vec, shift, c, p: int) -> None:
    """target += c * x^shift * src, in place."""
    for (pos, e), v in src.items():
        k = (pos, tuple(a + b for a, b in zip(e, shift)))
        nv = target.get(k, 0) + c * v
        if p:
            nv %= p
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def _scale(v: Vec, c, p: int) -> Vec:
    if p:
        return {k: x * c % p for k, x in v.items()}
    return {k: x * c for k, x in v.items()}


def _inv(c, p):
    return pow(c, -1, p) if p else 1 / c


def _divides(a, b) -> bool:
    return a[0] == b[0] and all(x <= y for x, y in zip(a[1], b[1]))


class _Engine:
    def __init__(self, ring: PolyRing, module_order: str):
        self.ring = ring
        self.p = ring.p
        rk = ring.key
        if module_order == "top":
            self.key = lambda m: (rk(m[1]), -m[0])
        elif module_order == "pot":
            self.key = lambda m: (-m[0], rk(m[1]))
        else:
            raise ValueError(f"unknown module order {module_order!r}")

    def lead(self, v: Vec):
        return max(v, key=self.key)

    def reduce(self, f: Vec, basis: List[Vec], leads, *, full=True, want_quotients=False):
        """Divide f by basis; returns (remainder, quotients {index: Vec})."""
        p = self.p
        f = dict(f)
        rem: Vec = {}
        quots: Dict[int, Vec] = {}
        key = self.key
        while f:
            m = max(f, key=key)
            c = f[m]
            for i, lm in enumerate(leads):
                if _divides(lm, m):
                    shift = tuple(a - b for a, b in zip(m[1], lm[1]))
                    t = c * _inv(basis[i][lm], p)
                    if p:
                        t %= p
                    _addmul(f, basis[i], shift, -t, p)
                    if want_quotients:
                        q = quots.setdefault(i, {})
                        k = (0, shift)
                        nv = q.get(k, 0) + t
                        if p:
                            nv %= p
                        if nv:
                            q[k] = nv
                        else:
                            q.pop(k, None)
                    break
            else:
                if not full:
                    rem.update(f)
                    return rem, quots
                rem[m] = c
                del f[m]
        return rem, quots

    def combine_cofactors(self, base, quots, cofs):
        """base - sum_i quots[i] * cofs[i] on cofactor dicts {input_index: Vec}."""
        p = self.p
        out = {j: dict(v) for j, v in base.items()}
        for i, q in quots.items():
            for j, cv in cofs[i].items():
                acc = out.setdefault(j, {})
                for (_, e), c in q.items():
                    _addmul(acc, cv, e, -c, p)
        return {j: v for j, v in out.items() if v}

    def scale_cofactors(self, cof, c):
        return {j: _scale(v, c, self.p) for j, v in cof.items()}


def buchberger(vecs: Sequence[Vec], ring: PolyRing, *, module_order="top", track=False, rank1=True):
    """Reduced Groebner basis of the span of ``vecs``.

    Returns (basis, cofactors) where cofactors[i] maps input index to the
    multiplier vector (rank-1) of that input.
    """
    eng = _Engine(ring, module_order)
    p = eng.p
    basis: List[Vec] = []
    leads = []
    cofs: List[dict] = []
    zero_shift = (0,) * ring.nvars

    pairs = []  # heap of (lcm degree, i, j)
    pending = set()

    def add(v: Vec, cof):
        lm = eng.lead(v)
        inv = _inv(v[lm], p)
        v = _scale(v, inv, p)
        if track:
            cof = eng.scale_cofactors(cof, inv)
        k = len(basis)
        basis.append(v)
        leads.append(lm)
        cofs.append(cof)
        for i in range(k):
            li = leads[i]
            if li[0] != lm[0]:
                continue
            if rank1 and all(a == 0 or b == 0 for a, b in zip(li[1], lm[1])):
                continue
            lcm = tuple(max(a, b) for a, b in zip(li[1], lm[1]))
            heapq.heappush(pairs, (sum(lcm), i, k))
            pending.add((i, k))

    for idx, v in enumerate(vecs):
        if not v:
            continue
        cof = {idx: {(0, zero_shift): ring.coerce(1)}} if track else {}
        if basis:
            v, q = eng.reduce(v, basis, leads, want_quotients=track)
            if not v:
                continue
            if track:
                cof = eng.combine_cofactors(cof, q, cofs)
        add(v, cof)

    while pairs:
        _, i, j = heapq.heappop(pairs)
        pending.discard((i, j))
        li, lj = leads[i], leads[j]
        lcm = tuple(max(a, b) for a, b in zip(li[1], lj[1]))
        # chain criterion
        skip = False
        for k, lk in enumerate(leads):
            if k in (i, j) or lk[0] != li[0]:
                continue
            if all(a <= b for a, b in zip(lk[1], lcm)):
                if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                    skip = True
                    break
        if skip:
            continue
        si = tuple(a - b for a, b in zip(lcm, li[1]))
        sj = tuple(a - b for a, b in zip(lcm, lj[1]))
        s: Vec = {}
        _addmul(s, basis[i], si, 1, p)
        _addmul(s, basis[j], sj, -1, p)
        if not s:
            continue
        r, q = eng.reduce(s, basis, leads, want_quotients=track)
        if not r:
            continue
        cof = {}
        if track:
            base: dict = {}
            for src, shift, c in ((i, si, 1), (j, sj, -1)):
                for jj, cv in cofs[src].items():
                    acc = base.setdefault(jj, {})
                    _addmul(acc, cv, shift, c, p)
            base = {jj: v for jj, v in base.items() if v}
            cof = eng.combine_cofactors(base, q, cofs)
        add(r, cof)

    # minimalize
    keep = []
    for i, lm in enumerate(leads):
        dominated = False
        for j, lj in enumerate(leads):
            if j == i:
                continue
            if _divides(lj, lm) and (lj != lm or j < i):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    basis = [basis[i] for i in keep]
    leads = [leads[i] for i in keep]
    cofs = [cofs[i] for i in keep]

    # interreduce tails until no basis lead divides any tail term
    order = sorted(range(len(basis)), key=lambda i: eng.key(leads[i]))
    basis = [basis[i] for i in order]
    leads = [leads[i] for i in order]
    cofs = [cofs[i] for i in order]
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            others = [b for k, b in enumerate(basis) if k != i]
            oleads = [l for k, l in enumerate(leads) if k != i]
            lm = leads[i]
            tail = {k: v for k, v in basis[i].items() if k != lm}
            r, q = eng.reduce(tail, others, oleads, want_quotients=track)
            if q:
                changed = True
                ocofs = [c for k, c in enumerate(cofs) if k != i]
                r[lm] = basis[i][lm]
                basis[i] = r
                if track:
                    cofs[i] = eng.combine_cofactors(cofs[i], q, ocofs)
    return basis, leads, (cofs if track else None)


@dataclass
class DivisionResult:
    quotients: tuple
    remainder: object

    def reconstruct(self, divisors):
        acc = None
        for q, g in zip(self.quotients, divisors):
            t = _times(q, g)
            acc = t if acc is None else _plus(acc, t)
        return _plus(acc, self.remainder) if acc is not None else self.remainder


def _times(q: Poly, g):
    if isinstance(g, Poly):
        return q * g
    return tuple(q * c for c in g)


def _plus(a, b):
    if isinstance(a, Poly):
        return a + b
    return tuple(x + y for x, y in zip(a, b))


class GroebnerBasis:
    """Reduced Groebner basis with optional transformation records."""

    def __init__(self, pres, module_order, vecs, leads, cofs):
        self.presentation = pres
        self.ring = pres.ring
        self.rank = pres.rank
        self.is_ideal = isinstance(pres, IdealPresentation)
        self.module_order = module_order
        self._vecs = vecs
        self._leads = leads
        self._cofs = cofs
        self._engine = _Engine(self.ring, module_order)
        self.elements = tuple(_from_vec(v, self.ring, self.rank, self.is_ideal) for v in vecs)

    @property
    def tracked(self) -> bool:
        return self._cofs is not None

    @property
    def order(self) -> str:
        return self.ring.order if self.is_ideal else f"{self.ring.order}/{self.module_order}"

    def is_unit(self) -> bool:
        return self.is_ideal and any(not any(lm[1]) for lm in self._leads)

    def transformation(self) -> List[Tuple[Poly, ...]]:
        """For each basis element, its coefficients on the input generators."""
        if self._cofs is None:
            raise ValueError("basis was computed without transformation tracking")
        n = len(self.presentation.gens)
        out = []
        for cof in self._cofs:
            row = [self.ring.zero()] * n
            for j, v in cof.items():
                row[j] = _from_vec(v, self.ring, 1, True)
            out.append(tuple(row))
        return out

    def normal_form(self, f):
        r, _ = self._engine.reduce(_to_vec(f, self.is_ideal), self._vecs, self._leads)
        return _from_vec(r, self.ring, self.rank, self.is_ideal)

    def contains(self, f) -> bool:
        r, _ = self._engine.reduce(_to_vec(f, self.is_ideal), self._vecs, self._leads, full=False)
        return not r

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


@lru_cache(maxsize=4096)
def groebner_basis(pres, *, track: bool = False, module_order: str = "top") -> GroebnerBasis:
    is_ideal = isinstance(pres, IdealPresentation)
    vecs = [_to_vec(g, is_ideal) for g in pres.gens]
    basis, leads, cofs = buchberger(
        vecs, pres.ring, module_order=module_order, track=track, rank1=is_ideal or pres.rank == 1
    )
    return GroebnerBasis(pres, module_order, basis, leads, cofs)


def divide(f, basis: GroebnerBasis) -> DivisionResult:
    """Multivariate division of f by the elements of ``basis``."""
    eng = basis._engine
    r, q = eng.reduce(_to_vec(f, basis.is_ideal), basis._vecs, basis._leads, want_quotients=True)
    quots = tuple(
        _from_vec(q[i], basis.ring, 1, True) if i in q else basis.ring.zero() for i in range(len(basis._vecs))
    )
    return DivisionResult(quots, _from_vec(r, basis.ring, basis.rank, basis.is_ideal))


def is_groebner(basis: GroebnerBasis) -> bool:
    """Recheck Buchberger's criterion on every same-position pair."""
    eng = basis._engine
    p = basis.ring.p
    vecs, leads = basis._vecs, basis._leads
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            li, lj = leads[i], leads[j]
            if li[0] != lj[0]:
                continue
            lcm = tuple(max(a, b) for a, b in zip(li[1], lj[1]))
            s: Vec = {}
            _addmul(s, vecs[i], tuple(a - b for a, b in zip(lcm, li[1])), _inv(vecs[i][li], p), p)
            _addmul(s, vecs[j], tuple(a - b for a, b in zip(lcm, lj[1])), -_inv(vecs[j][lj], p), p)
            r, _ = eng.reduce(s, vecs, leads)
            if r:
                return False
    return True


@dataclass
class MembershipCertificate:
    """``member`` with coefficients on the generators, or the nonzero normal form."""

    member: bool
    coefficients: Optional[tuple] = None
    normal_form: object = None

    @property
    def verdict(self) -> str:
        return "In" if self.member else "NotIn"


class NotInIdeal(ValueError):
    def __init__(self, certificate: MembershipCertificate):
        super().__init__(f"element not in the ideal/module; normal form {certificate.normal_form}")
        self.certificate = certificate


def _membership(f, pres, certificate: bool) -> MembershipCertificate:
    gb = groebner_basis(pres, track=certificate)
    div = divide(f, gb)
    rem = div.remainder
    zero = rem.is_zero() if isinstance(rem, Poly) else all(c.is_zero() for c in rem)
    if not zero:
        return MembershipCertificate(False, None, rem)
    if not certificate:
        return MembershipCertificate(True)
    trans = gb.transformation()
    n = len(pres.gens)
    coeffs = [pres.ring.zero()] * n
    for q, row in zip(div.quotients, trans):
        if q.is_zero():
            continue
        for j in range(n):
            if not row[j].is_zero():
                coeffs[j] = coeffs[j] + q * row[j]
    return MembershipCertificate(True, tuple(coeffs), None)


def ideal_membership(f: Poly, gens, ring: PolyRing | None = None, *, certificate=True) -> MembershipCertificate:
    pres = gens if isinstance(gens, IdealPresentation) else IdealPresentation(ring or f.ring, tuple(gens))
    return _membership(Poly(pres.ring, f.terms), pres, certificate)


def module_membership(z, gens, ring: PolyRing | None = None, *, certificate=True) -> MembershipCertificate:
    if isinstance(gens, SubmodulePresentation):
        pres = gens
    else:
        pres = SubmodulePresentation(ring or z[0].ring, len(z), tuple(gens))
    return _membership(tuple(Poly(pres.ring, c.terms) for c in z), pres, certificate)


def express_in_ideal(h: Poly, gens: Sequence[Poly], ring: PolyRing | None = None) -> tuple:
    """Coefficients r with h = sum r_i * gens_i exactly; raises NotInIdeal otherwise."""
    cert = ideal_membership(h, gens, ring)
    if not cert.member:
        raise NotInIdeal(cert)
    return cert.coefficients


def express_in_module(z, gens, ring: PolyRing | None = None) -> tuple:
    cert = module_membership(z, gens, ring)
    if not cert.member:
        raise NotInIdeal(cert)
    return cert.coefficients


def same_ideal(a: IdealPresentation, b: IdealPresentation) -> bool:
    return all(groebner_basis(b).contains(g) for g in a.gens) and all(
        groebner_basis(a).contains(g) for g in b.gens
    )


def same_module(a: SubmodulePresentation, b: SubmodulePresentation) -> bool:
    return all(groebner_basis(b).contains(g) for g in a.gens) and all(
        groebner_basis(a).contains(g) for g in b.gens
    )


# --- elimination, quotients, saturation --------------------------------------

def _fresh(ring: PolyRing, stem: str) -> str:
    name = stem
    k = 0
    while name in ring.variables:
        k += 1
        name = f"{stem}{k}"
    return name


def elimination_ideal(I: IdealPresentation, keep: Sequence[str]) -> IdealPresentation:
    """Generators of I intersected with k[keep], returned in I's ring."""
    ring = I.ring
    keep = list(keep)
    for v in keep:
        if v not in ring.variables:
            raise KeyError(f"{v!r} is not a variable of {ring.describe()}")
    drop = [v for v in ring.variables if v not in keep]
    kept = [v for v in ring.variables if v in keep]
    er = PolyRing(tuple(drop + kept), ring.p, f"elim:{len(drop)}")
    gb = groebner_basis(IdealPresentation(er, tuple(g.embed(er) for g in I.gens)))
    nd = len(drop)
    out = [g for g in gb.elements if all(not any(e[:nd]) for e in g.terms)]
    return IdealPresentation(ring, tuple(g.embed(ring) for g in out))


def _eliminate_first(ring: PolyRing, gens, rank1: bool, rank: int):
    """Eliminate variable 0 of ``ring`` (an elim:1 ring) from a generating set."""
    if rank1:
        gb = groebner_basis(IdealPresentation(ring, tuple(gens)))
        return [g for g in gb.elements if all(e[0] == 0 for e in g.terms)]
    gb = groebner_basis(SubmodulePresentation(ring, rank, tuple(gens)), module_order="top")
    return [v for v in gb.elements if all(e[0] == 0 for c in v for e in c.terms)]


def intersect_ideals(a: IdealPresentation, b: IdealPresentation) -> IdealPresentation:
    ring = a.ring
    t = _fresh(ring, "_t")
    er = ring.extend([t], front=True, order="elim:1")
    tv = er.var(t)
    gens = [tv * g.embed(er) for g in a.gens] + [(1 - tv) * g.embed(er) for g in b.gens]
    out = _eliminate_first(er, gens, True, 1)
    return IdealPresentation(ring, tuple(g.embed(ring) for g in out))


def _exact_div(g: Poly, f: Poly) -> Poly:
    gb = groebner_basis(IdealPresentation(f.ring, (f,)))
    d = divide(g, gb)
    if not d.remainder.is_zero():
        raise ArithmeticError(f"{f} does not divide {g}")
    # the basis element is f made monic
    return d.quotients[0] * f.ring.inv(f.lead_coeff())


def ideal_quotient(I: IdealPresentation, f: Poly) -> IdealPresentation:
    """(I : f) = {g : f*g in I}."""
    if f.is_zero():
        raise ValueError("ideal quotient by zero")
    f = Poly(I.ring, f.terms)
    inter = intersect_ideals(I, IdealPresentation(I.ring, (f,)))
    return IdealPresentation(I.ring, tuple(_exact_div(g, f) for g in inter.gens))


def module_quotient(L: SubmodulePresentation, f: Poly) -> SubmodulePresentation:
    """(L : f) = {v : f*v in L} inside the ambient free module."""
    if f.is_zero():
        raise ValueError("module quotient by zero")
    ring = L.ring
    f = Poly(ring, f.terms)
    t = _fresh(ring, "_t")
    er = ring.extend([t], front=True, order="elim:1")
    tv = er.var(t)
    fe = f.embed(er)
    gens = [tuple(tv * c.embed(er) for c in v) for v in L.gens]
    for i in range(L.rank):
        gens.append(tuple((1 - tv) * fe if k == i else er.zero() for k in range(L.rank)))
    inter = _eliminate_first(er, gens, False, L.rank)
    out = [tuple(_exact_div(c.embed(ring), f) for c in v) for v in inter]
    return SubmodulePresentation(ring, L.rank, tuple(out))


def saturation(I: IdealPresentation, f: Poly, *, max_iter: int = 256):
    """Return ((I : f^inf), N) with N the least exponent where the quotient chain stabilises."""
    if f.is_zero():
        raise ValueError("saturation by zero")
    ring = I.ring
    f = Poly(ring, f.terms)
    t = _fresh(ring, "_t")
    er = ring.extend([t], front=True, order="elim:1")
    gens = [g.embed(er) for g in I.gens] + [er.var(t) * f.embed(er) - 1]
    sat = IdealPresentation(ring, tuple(g.embed(ring) for g in _eliminate_first(er, gens, True, 1)))
    cur = I
    for n in range(max_iter + 1):
        if same_ideal(cur, sat):
            return sat, n
        cur = ideal_quotient(cur, f)
    raise RuntimeError("quotient chain did not reach the saturation")


@dataclass
class RadicalResult:
    member: bool
    exponent: Optional[int] = None
    coefficients: Optional[tuple] = None
    degraded: bool = False


def radical_membership(g: Poly, I, ring: PolyRing | None = None, *, nmax: int = 64) -> RadicalResult:
    """Decide g in sqrt(I) and report the least N <= nmax with g^N in I."""
    pres = I if isinstance(I, IdealPresentation) else IdealPresentation(ring or g.ring, tuple(I))
    ring = pres.ring
    g = Poly(ring, g.terms)
    t = _fresh(ring, "_t")
    er = ring.extend([t], front=True)
    gens = tuple(h.embed(er) for h in pres.gens) + (er.var(t) * g.embed(er) - 1,)
    if not groebner_basis(IdealPresentation(er, gens)).is_unit():
        return RadicalResult(False)
    gb = groebner_basis(pres)
    power = ring.one()
    for n in range(nmax + 1):
        if gb.contains(power):
            cert = ideal_membership(power, pres)
            return RadicalResult(True, n, cert.coefficients)
        power = power * g
    return RadicalResult(True, None, None, degraded=True)
