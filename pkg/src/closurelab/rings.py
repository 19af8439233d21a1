"""Finitely presented rings R = A/J, their localizations R_f, and submodules.

R_f is realised as A[w]/(J + (w*f - 1)) with one fresh variable per
inversion; nested localizations stack variables rather than simplifying.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from . import certificates as C
from .algebra import Poly, PolyRing
from .groebner import (
    IdealPresentation,
    SubmodulePresentation,
    groebner_basis,
    ideal_membership,
    ideal_quotient,
    radical_membership,
    same_ideal,
)
from .verdict import IN, NOT_IN, UNKNOWN, Verdict

__all__ = [
    "InconsistentRing",
    "PresentedRing",
    "LocalizedRing",
    "RingMap",
    "Submodule",
    "make_ring",
    "localize",
    "canonical_map",
    "chart_overlap",
    "transport",
    "LocalMembership",
    "local_membership",
    "UnitCoverCertificate",
    "NotAUnitCover",
    "is_unit_cover",
    "element_in_rcirc",
]

DEFAULT_NMAX = 64


class InconsistentRing(ValueError):
    pass


class PresentedRing:
    """R = ambient / (relations), with optional radical presentation of J."""

    def __init__(
        self,
        ambient: PolyRing,
        relations: Sequence = (),
        *,
        assert_domain: bool = False,
        assert_reduced: Optional[bool] = None,
        radical: Optional[Sequence] = None,
        nmax: int = DEFAULT_NMAX,
        validate: bool = True,
    ):
        if assert_domain and assert_reduced is False:
            raise InconsistentRing("a domain is reduced: assert_domain requires assert_reduced")
        self.ambient = ambient
        self.relations = tuple(self._coerce(r) for r in relations)
        # a polynomial ring over a field is a domain whatever the flags say
        self.assert_domain = bool(assert_domain) or (not self.relations and assert_reduced is not False)
        self.assert_reduced = bool(assert_reduced) or self.assert_domain
        if radical is None and self.assert_reduced:
            radical = self.relations
        self.radical = None if radical is None else tuple(self._coerce(r) for r in radical)
        self.nmax = nmax
        self.base_variables = ambient.variables
        if validate and self.radical is not None and radical is not self.relations:
            self._validate_radical()

    def _coerce(self, f) -> Poly:
        if isinstance(f, str):
            return self.ambient.parse(f)
        if isinstance(f, Poly):
            if f.ring.variables != self.ambient.variables:
                return f.embed(self.ambient)
            return Poly(self.ambient, f.terms)
        return self.ambient.const(f)

    def _validate_radical(self):
        rad = IdealPresentation(self.ambient, self.radical)
        gb = groebner_basis(rad)
        for g in self.relations:
            if not gb.contains(g):
                raise InconsistentRing(f"relation {g} is not in the supplied radical ideal")
        for h in self.radical:
            r = radical_membership(h, self.J, nmax=self.nmax)
            if not r.member:
                raise InconsistentRing(f"radical generator {h} has no power in the defining ideal")
            if r.degraded:
                raise InconsistentRing(f"radical generator {h} needs a power above {self.nmax}")

    # --- basic structure ------------------------------------------------

    @property
    def characteristic(self) -> int:
        return self.ambient.p

    @property
    def J(self) -> IdealPresentation:
        return IdealPresentation(self.ambient, self.relations)

    @property
    def J_rad(self) -> Optional[IdealPresentation]:
        return None if self.radical is None else IdealPresentation(self.ambient, self.radical)

    @property
    def root(self) -> "PresentedRing":
        return self

    def key(self):
        return (self.ambient, self.relations, self.radical, self.assert_domain, self.assert_reduced)

    def __eq__(self, other):
        return isinstance(other, PresentedRing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def describe(self) -> str:
        rel = ", ".join(str(r) for r in self.relations)
        return f"{self.ambient.describe()}/({rel})"

    def spec(self) -> dict:
        d = C.ring_spec(self.ambient)
        d["relations"] = [str(r) for r in self.relations]
        return d

    def element(self, f) -> Poly:
        """Normal form of f modulo J."""
        return self.nf(self._coerce(f))

    def parse(self, text: str) -> Poly:
        return self.ambient.parse(text)

    def nf(self, f: Poly) -> Poly:
        if not self.relations:
            return Poly(self.ambient, f.terms)
        return groebner_basis(self.J).normal_form(Poly(self.ambient, f.terms))

    def is_zero(self, f) -> bool:
        return self.element(f).is_zero()

    def equal(self, f, g) -> bool:
        return self.is_zero(self._coerce(f) - self._coerce(g))

    def is_zero_ring(self) -> bool:
        return bool(self.relations) and groebner_basis(self.J).is_unit()

    def has_radical_presentation(self) -> bool:
        return self.radical is not None

    # --- constructors ---------------------------------------------------

    def localize(self, f) -> "LocalizedRing":
        return LocalizedRing(self, f)

    def ideal(self, *gens) -> "Submodule":
        if len(gens) == 1 and isinstance(gens[0], (list, tuple)):
            gens = tuple(gens[0])
        return Submodule(self, 1, tuple((self._coerce(g),) for g in gens))

    def module(self, rank: int, gens, relations=()) -> "Submodule":
        return Submodule(
            self,
            rank,
            tuple(tuple(self._coerce(c) for c in v) for v in gens),
            tuple(tuple(self._coerce(c) for c in v) for v in relations),
        )

    def vector(self, z, rank: int = 1) -> Tuple[Poly, ...]:
        if isinstance(z, (Poly, str, int)):
            z = (z,)
        z = tuple(self._coerce(c) for c in z)
        if len(z) != rank:
            raise ValueError(f"element of length {len(z)} in a rank-{rank} module")
        return z

    def monomials(self, degree: int) -> list:
        """Monomials in the base variables of degree <= ``degree`` (degree, then lex)."""
        base = PolyRing(self.base_variables, self.ambient.p)
        return [base.monomial(e).embed(self.ambient) for e in base.monomials_up_to(degree)]


def make_ring(
    characteristic: int,
    variables: Sequence[str],
    relations: Sequence = (),
    *,
    assert_domain=False,
    assert_reduced=None,
    radical=None,
    order="grevlex",
    nmax=DEFAULT_NMAX,
) -> PresentedRing:
    ambient = PolyRing(tuple(variables), characteristic, order)
    return PresentedRing(
        ambient,
        relations,
        assert_domain=assert_domain,
        assert_reduced=assert_reduced,
        radical=radical,
        nmax=nmax,
    )


def _fresh(names: Sequence[str], stem: str = "w") -> str:
    k = 0
    name = f"_{stem}"
    while name in names:
        k += 1
        name = f"_{stem}{k}"
    return name


class LocalizedRing(PresentedRing):
    """R_f = R[w]/(w*f - 1); ``base`` is R and ``inverted`` is f (in R's ambient)."""

    def __init__(self, base: PresentedRing, f):
        f = base._coerce(f)
        w = _fresh(base.ambient.variables)
        amb = base.ambient.extend([w])
        unit = amb.var(w) * f.embed(amb) - 1
        rel = tuple(r.embed(amb) for r in base.relations) + (unit,)
        rad = None
        if base.radical is not None:
            rad = tuple(r.embed(amb) for r in base.radical) + (unit,)
        super().__init__(
            amb,
            rel,
            assert_domain=base.assert_domain,
            assert_reduced=base.assert_reduced,
            radical=rad,
            nmax=base.nmax,
            validate=False,
        )
        self.base = base
        self.inverted = f
        self.aux = w
        self.base_variables = base.base_variables
        self.degenerate = self.is_zero_ring()

    @property
    def root(self) -> PresentedRing:
        return self.base.root

    @property
    def inverse(self) -> Poly:
        return self.ambient.var(self.aux)

    def key(self):
        return super().key() + (self.aux,)

    def canonical_map(self) -> "RingMap":
        return canonical_map(self.base, self)

    def describe(self) -> str:
        return f"({self.base.describe()})_{{{self.inverted}}}"


def localize(R: PresentedRing, f) -> LocalizedRing:
    return LocalizedRing(R, f)


@dataclass(frozen=True)
class RingMap:
    """Ring map between presented rings given by images of the source ambient variables."""

    source: PresentedRing
    target: PresentedRing
    images: Tuple[Poly, ...]

    def __call__(self, f: Poly) -> Poly:
        f = self.source._coerce(f)
        if self._is_padding():
            return f.embed(self.target.ambient)
        return f.substitute(self.target.ambient, self.images)

    def _is_padding(self) -> bool:
        tv = self.target.ambient
        return all(
            img.is_monomial() and img == tv.var(v) if v in tv.variables else False
            for v, img in zip(self.source.ambient.variables, self.images)
        )

    def vector(self, v) -> Tuple[Poly, ...]:
        return tuple(self(c) for c in v)

    def then(self, other: "RingMap") -> "RingMap":
        return RingMap(self.source, other.target, tuple(other(img) for img in self.images))


def canonical_map(source: PresentedRing, target: PresentedRing) -> RingMap:
    """Map sending each source variable to the target variable of the same name."""
    tv = target.ambient
    return RingMap(source, target, tuple(tv.var(v) for v in source.ambient.variables))


def chart_overlap(R: PresentedRing, f, g):
    """Return (R_{fg}, map R_f -> R_{fg}, map R_g -> R_{fg}) for charts of R."""
    f = R._coerce(f)
    g = R._coerce(g)
    Rf, Rg = localize(R, f), localize(R, g)
    Rfg = localize(R, f * g)
    amb = Rfg.ambient
    w = Rfg.inverse

    def chart_map(Rc: LocalizedRing, other: Poly) -> RingMap:
        imgs = []
        for v in Rc.ambient.variables:
            imgs.append(w * other.embed(amb) if v == Rc.aux else amb.var(v))
        return RingMap(Rc, Rfg, tuple(imgs))

    return Rfg, chart_map(Rf, g), chart_map(Rg, f), Rf, Rg


@dataclass(frozen=True)
class Submodule:
    """L inside M = R^rank / N; ``gens`` generate L, ``relations`` generate N.

    Membership of z in L (as a submodule of M) means z in L + N + J*A^rank
    inside the ambient free module A^rank.
    """

    ring: PresentedRing
    rank: int
    gens: Tuple[Tuple[Poly, ...], ...]
    relations: Tuple[Tuple[Poly, ...], ...] = ()

    def __post_init__(self):
        for v in self.gens + self.relations:
            if len(v) != self.rank:
                raise ValueError(f"generator of length {len(v)} in a rank-{self.rank} module")

    @property
    def is_ideal(self) -> bool:
        return self.rank == 1 and not self.relations

    @property
    def ideal_gens(self) -> Tuple[Poly, ...]:
        if self.rank != 1:
            raise ValueError("not an ideal")
        return tuple(v[0] for v in self.gens)

    def ambient_gens(self):
        A = self.ring.ambient
        out = list(self.gens) + list(self.relations)
        for i in range(self.rank):
            for g in self.ring.relations:
                out.append(tuple(g if k == i else A.zero() for k in range(self.rank)))
        return out

    def presentation(self):
        A = self.ring.ambient
        if self.rank == 1:
            return IdealPresentation(A, tuple(v[0] for v in self.ambient_gens()))
        return SubmodulePresentation(A, self.rank, tuple(self.ambient_gens()))

    def vector(self, z) -> Tuple[Poly, ...]:
        return self.ring.vector(z, self.rank)

    def contains(self, z) -> bool:
        z = self.vector(z)
        gb = groebner_basis(self.presentation())
        return gb.contains(z[0] if self.rank == 1 else z)

    def normal_form(self, z) -> Tuple[Poly, ...]:
        z = self.vector(z)
        gb = groebner_basis(self.presentation())
        nf = gb.normal_form(z[0] if self.rank == 1 else z)
        return (nf,) if self.rank == 1 else nf

    def membership(self, z) -> Tuple[bool, dict]:
        """Decide z in L with an exact certificate either way."""
        z = self.vector(z)
        pres = self.presentation()
        gb = groebner_basis(pres)
        A = self.ring.ambient
        J = self.ring.relations
        if not gb.contains(z[0] if self.rank == 1 else z):
            nf = self.normal_form(z)
            return False, C.nonmembership_certificate(A, z, self.gens, self.relations, J, nf)
        from .groebner import module_membership

        if self.rank == 1:
            cert = ideal_membership(z[0], pres)
        else:
            cert = module_membership(z, pres)
        co = cert.coefficients
        k, l = len(self.gens), len(self.relations)
        cL, cN = co[:k], co[k : k + l]
        rest = co[k + l :]
        cJ = [rest[i * len(J) : (i + 1) * len(J)] for i in range(self.rank)]
        return True, C.membership_certificate(A, z, self.gens, self.relations, J, cL, cN, cJ)

    def extend(self, extra) -> "Submodule":
        extra = tuple(self.vector(v) for v in extra)
        return Submodule(self.ring, self.rank, self.gens + extra, self.relations)

    def transport(self, along) -> "Submodule":
        phi = along if isinstance(along, RingMap) else canonical_map(self.ring, along)
        return Submodule(
            phi.target,
            self.rank,
            tuple(phi.vector(v) for v in self.gens),
            tuple(phi.vector(v) for v in self.relations),
        )

    def same_as(self, other: "Submodule") -> bool:
        return all(other.contains(v) for v in self.gens) and all(self.contains(v) for v in other.gens)

    def __str__(self):
        if self.rank == 1:
            body = ", ".join(str(v[0]) for v in self.gens)
            return f"({body})"
        return "<" + ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.gens) + ">"


def transport(obj, along):
    """Image of a submodule (or element vector) under localization or a ring map."""
    if isinstance(obj, Submodule):
        return obj.transport(along)
    raise TypeError(f"cannot transport {type(obj).__name__}")


@dataclass
class LocalMembership:
    member: bool
    exponent: Optional[int] = None
    degraded: bool = False
    certificate: Optional[dict] = None


def local_membership(z, L: Submodule, f, *, nmax: Optional[int] = None) -> LocalMembership:
    """Decide z/1 in L_f, i.e. f^N z in L for some N, and report the least N."""
    R = L.ring
    f = R._coerce(f)
    if R.is_zero(f):
        raise ValueError("local membership needs f nonzero in R")
    nmax = R.nmax if nmax is None else nmax
    z = L.vector(z)
    Rf = localize(R, f)
    phi = canonical_map(R, Rf)
    if not L.transport(phi).contains(phi.vector(z)):
        return LocalMembership(False)
    power = R.ambient.one()
    for n in range(nmax + 1):
        v = tuple(power * c for c in z)
        if L.contains(v):
            _, cert = L.membership(v)
            return LocalMembership(True, n, False, cert)
        power = power * f
    return LocalMembership(True, None, True, None)


class NotAUnitCover(ValueError):
    def __init__(self, elements, certificate: dict):
        super().__init__(f"{', '.join(map(str, elements))} do not generate the unit ideal")
        self.certificate = certificate


@dataclass
class UnitCoverCertificate:
    ring: PresentedRing
    elements: Tuple[Poly, ...]
    coefficients: Tuple[Poly, ...]
    relation_coefficients: Tuple[Poly, ...]

    def __post_init__(self):
        C.recheck(self.to_dict())

    def to_dict(self) -> dict:
        return {
            "kind": "unit_cover",
            "ring": C.ring_spec(self.ring.ambient),
            "elements": [str(f) for f in self.elements],
            "coefficients": [str(r) for r in self.coefficients],
            "relations": [str(g) for g in self.ring.relations],
            "relation_coefficients": [str(s) for s in self.relation_coefficients],
        }


def is_unit_cover(R: PresentedRing, elements) -> UnitCoverCertificate:
    """Certify that the elements generate the unit ideal of R, or raise NotAUnitCover."""
    fs = tuple(R._coerce(f) for f in elements)
    if not fs:
        raise ValueError("a cover needs at least one element")
    pres = IdealPresentation(R.ambient, fs + R.relations)
    cert = ideal_membership(R.ambient.one(), pres)
    if not cert.member:
        nc = C.nonmembership_certificate(
            R.ambient, (R.ambient.one(),), [(f,) for f in fs], [], R.relations, (cert.normal_form,)
        )
        raise NotAUnitCover(fs, nc)
    k = len(fs)
    return UnitCoverCertificate(R, fs, cert.coefficients[:k], cert.coefficients[k:])


def element_in_rcirc(f, R: PresentedRing) -> Verdict:
    """Is f outside every minimal prime of R?

    Domains: f nonzero.  Otherwise f avoids the minimal primes iff it is a
    nonzerodivisor modulo the radical, i.e. (J_rad : f) = J_rad.
    """
    f = R._coerce(f)
    A = R.ambient
    if R.is_zero_ring():
        return Verdict(IN, provenance="zero ring: no minimal primes")
    if R.assert_domain:
        inside, cert = Submodule(R, 1, ()).membership((f,))
        if inside:
            return Verdict(NOT_IN, cert, "f is zero in the domain R")
        return Verdict(IN, cert, "nonzero element of a domain")
    if R.radical is None:
        return Verdict(UNKNOWN, provenance="no radical presentation available", bound={"radical": None})
    rad = R.J_rad
    radsub = Submodule(PresentedRing(A, R.radical, validate=False), 1, ())
    if groebner_basis(rad).contains(f):
        h = A.one()
    else:
        quo = ideal_quotient(rad, f)
        if same_ideal(quo, rad):
            return Verdict(IN, None, "(J_rad : f) = J_rad: f is a nonzerodivisor on R_red")
        gb = groebner_basis(rad)
        h = next(g for g in quo.gens if not gb.contains(g))
    _, prod = radsub.membership((h * f,))
    _, non = radsub.membership((h,))
    cert = {"kind": "zero_divisor", "ring": C.ring_spec(A), "product_membership": prod, "witness_nonmembership": non}
    return Verdict(NOT_IN, cert, f"h = {h} kills f modulo the radical")
