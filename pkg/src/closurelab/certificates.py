"""Serialisable certificates and their exact rechecks.

Every certificate is a plain JSON-ready dict with a ``kind`` and the ring
it lives in.  :func:`recheck` verifies one using polynomial arithmetic (and,
for non-membership facts, a plain Groebner normal form); no closure
operation is ever recomputed.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence, Tuple

from .algebra import Poly, PolyRing
from .groebner import SubmodulePresentation, IdealPresentation, groebner_basis

__all__ = [
    "CertificateError",
    "ring_spec",
    "ring_from_spec",
    "membership_certificate",
    "nonmembership_certificate",
    "recheck",
    "iter_certificates",
    "KINDS",
]


class CertificateError(AssertionError):
    """A certificate failed its exact recheck."""


def ring_spec(ring: PolyRing) -> dict:
    return {"characteristic": ring.p, "variables": list(ring.variables), "order": ring.order}


def ring_from_spec(spec: dict) -> PolyRing:
    return PolyRing(tuple(spec["variables"]), int(spec["characteristic"]), spec.get("order", "grevlex"))


def _vs(v: Sequence[Poly]) -> List[str]:
    return [str(c) for c in v]


def _pv(ring: PolyRing, v: Sequence[str]) -> Tuple[Poly, ...]:
    return tuple(ring.parse(s) for s in v)


def membership_certificate(ring: PolyRing, element, L, N, J, cL, cN, cJ) -> dict:
    """element = sum cL*L + sum cN*N + sum_i sum_j cJ[i][j] * J_j e_i, in ring^rank."""
    return {
        "kind": "membership",
        "ring": ring_spec(ring),
        "rank": len(element),
        "element": _vs(element),
        "generators": {"L": [_vs(v) for v in L], "N": [_vs(v) for v in N], "J": [str(g) for g in J]},
        "coefficients": {
            "L": [str(c) for c in cL],
            "N": [str(c) for c in cN],
            "J": [[str(c) for c in row] for row in cJ],
        },
    }


def nonmembership_certificate(ring: PolyRing, element, L, N, J, normal_form) -> dict:
    return {
        "kind": "nonmembership",
        "ring": ring_spec(ring),
        "rank": len(element),
        "element": _vs(element),
        "generators": {"L": [_vs(v) for v in L], "N": [_vs(v) for v in N], "J": [str(g) for g in J]},
        "normal_form": _vs(normal_form),
    }


def _gens(ring: PolyRing, cert: dict):
    g = cert["generators"]
    L = [_pv(ring, v) for v in g["L"]]
    N = [_pv(ring, v) for v in g["N"]]
    J = [ring.parse(s) for s in g["J"]]
    return L, N, J


def _check_membership(cert: dict) -> None:
    ring = ring_from_spec(cert["ring"])
    m = cert["rank"]
    z = _pv(ring, cert["element"])
    L, N, J = _gens(ring, cert)
    co = cert["coefficients"]
    cL = [ring.parse(s) for s in co["L"]]
    cN = [ring.parse(s) for s in co["N"]]
    cJ = [[ring.parse(s) for s in row] for row in co["J"]]
    if len(cL) != len(L) or len(cN) != len(N) or len(cJ) != m or any(len(r) != len(J) for r in cJ):
        raise CertificateError("coefficient shape does not match generators")
    acc = [ring.zero()] * m
    for c, v in list(zip(cL, L)) + list(zip(cN, N)):
        if c.is_zero():
            continue
        acc = [a + c * x for a, x in zip(acc, v)]
    for i in range(m):
        for c, g in zip(cJ[i], J):
            if not c.is_zero():
                acc[i] = acc[i] + c * g
    if tuple(acc) != z:
        raise CertificateError(
            f"membership identity fails: combination gives ({', '.join(map(str, acc))}), "
            f"element is ({', '.join(map(str, z))})"
        )


def _plain_basis(ring: PolyRing, m: int, L, N, J):
    gens = list(L) + list(N)
    for i in range(m):
        for g in J:
            gens.append(tuple(g if k == i else ring.zero() for k in range(m)))
    if m == 1:
        return groebner_basis(IdealPresentation(ring, tuple(v[0] for v in gens))), True
    return groebner_basis(SubmodulePresentation(ring, m, tuple(gens))), False


def _check_nonmembership(cert: dict) -> None:
    ring = ring_from_spec(cert["ring"])
    m = cert["rank"]
    z = _pv(ring, cert["element"])
    L, N, J = _gens(ring, cert)
    gb, ideal = _plain_basis(ring, m, L, N, J)
    nf = gb.normal_form(z[0] if ideal else z)
    nf = (nf,) if ideal else nf
    if all(c.is_zero() for c in nf):
        raise CertificateError("element reduces to zero: it is a member")
    if nf != _pv(ring, cert["normal_form"]):
        raise CertificateError("recorded normal form does not match")


def _check_radical(cert: dict) -> None:
    ring = ring_from_spec(cert["ring"])
    g = ring.parse(cert["element"])
    inner = cert["power_membership"]
    _check_membership(inner)
    if _pv(ring, inner["element"]) != (g.power(cert["exponent"]),):
        raise CertificateError("radical certificate: inner element is not the stated power")
    _same_gens(inner, cert.get("ideal"), cert.get("relations"))


def _same_gens(inner: dict, L, J):
    if L is not None and [v[0] for v in inner["generators"]["L"]] != list(L):
        raise CertificateError("inner generators differ from the stated ideal")
    if J is not None and inner["generators"]["J"] != list(J):
        raise CertificateError("inner relations differ from the stated ring relations")


def _check_unit_cover(cert: dict) -> None:
    ring = ring_from_spec(cert["ring"])
    fs = [ring.parse(s) for s in cert["elements"]]
    rs = [ring.parse(s) for s in cert["coefficients"]]
    J = [ring.parse(s) for s in cert["relations"]]
    sj = [ring.parse(s) for s in cert["relation_coefficients"]]
    total = ring.zero()
    for r, f in list(zip(rs, fs)) + list(zip(sj, J)):
        total = total + r * f
    if total != ring.one():
        raise CertificateError(f"unit-cover identity gives {total}, not 1")


def _check_gluing(cert: dict) -> None:
    ring = ring_from_spec(cert["ring"])
    g = ring.parse(cert["g"])
    N = cert["N"]
    fs = [ring.parse(s) for s in cert["cover"]]
    ns = cert["exponents"]
    rs = [ring.parse(s) for s in cert["coefficients"]]
    J = [ring.parse(s) for s in cert["relations"]]
    sj = [ring.parse(s) for s in cert["relation_coefficients"]]
    total = ring.zero()
    for r, f, n in zip(rs, fs, ns):
        total = total + r * f.power(n)
    for s, h in zip(sj, J):
        total = total + s * h
    if total != g.power(N):
        raise CertificateError(f"gluing identity fails: sum is {total}, g^N is {g.power(N)}")
    for ev in cert.get("chart_evidence", []):
        if ev is not None:
            recheck(ev)


def _check_frobenius(cert: dict) -> None:
    ring = ring_from_spec(cert["ring"])
    q = cert["q"]
    p = ring.p
    if not p or q < 1 or not _is_power(q, p):
        raise CertificateError(f"q={q} is not a power of the characteristic")
    z = _pv(ring, cert["element"])
    inner = cert["membership"]
    _check_membership(inner)
    if _pv(ring, inner["element"]) != tuple(c.power(q) for c in z):
        raise CertificateError("Frobenius certificate: inner element is not z^q")
    _check_bracket(ring, inner, cert["L"], cert["N"], q)


def _check_bracket(ring, inner, L, N, q):
    bl = [tuple(ring.parse(s).power(q) for s in v) for v in L]
    bn = [tuple(ring.parse(s).power(q) for s in v) for v in N]
    if [_pv(ring, v) for v in inner["generators"]["L"]] != bl:
        raise CertificateError("inner L generators are not the bracket power")
    if [_pv(ring, v) for v in inner["generators"]["N"]] != bn:
        raise CertificateError("inner N generators are not the bracket power")


def _is_power(q, p):
    while q % p == 0:
        q //= p
    return q == 1


def _check_tc_bounded(cert: dict) -> None:
    ring = ring_from_spec(cert["ring"])
    c = ring.parse(cert["multiplier"])
    z = _pv(ring, cert["element"])
    ideals = [[ring.parse(s) for s in a] for a in cert["coefficient_ideals"]]
    for row in cert["checks"]:
        q = row["q"]
        for item in row["products"]:
            prod = ring.one()
            for a, idx in zip(ideals, item["choice"]):
                for k in idx:
                    prod = prod * a[k]
            if [len(ix) for ix in item["choice"]] != row["powers"]:
                raise CertificateError("product does not use the stated ceiling powers")
            inner = item["membership"]
            _check_membership(inner)
            want = tuple(c * prod * x.power(q) for x in z)
            if _pv(ring, inner["element"]) != want:
                raise CertificateError(f"tight-closure check at q={q}: wrong element")
            _check_bracket(ring, inner, cert["L"], cert["N"], q)


def _check_rcirc(cert: dict) -> None:
    # h*f in J_rad and h not in J_rad: f is a zero divisor mod the radical
    recheck(cert["product_membership"])
    recheck(cert["witness_nonmembership"])


def _check_semifreg(cert: dict) -> None:
    recheck(cert["nonmembership"])
    recheck(cert["frobenius"])
    a = cert["nonmembership"]["element"]
    b = cert["frobenius"]["element"]
    if a != b:
        raise CertificateError("witness facts refer to different elements")


def _check_newton(cert: dict) -> None:
    from fractions import Fraction

    G = [tuple(x) for x in cert["exponents"]]
    for t in cert["terms"]:
        lam = [Fraction(x) for x in t["weights"]]
        if len(lam) != len(G) or any(x < 0 for x in lam) or sum(lam) != 1:
            raise CertificateError("convex weights must be non-negative and sum to 1")
        comb = [sum(l * g[i] for l, g in zip(lam, G)) for i in range(len(t["monomial"]))]
        if any(c > e for c, e in zip(comb, t["monomial"])):
            raise CertificateError(f"weighted exponent {comb} exceeds {t['monomial']}")


def _check_newton_separation(cert: dict) -> None:
    from fractions import Fraction

    G = [tuple(x) for x in cert["exponents"]]
    a = [Fraction(x) for x in cert["weights"]]
    e = cert["monomial"]
    if any(x < 0 for x in a):
        raise CertificateError("separating weights must be non-negative")
    if any(sum(x * y for x, y in zip(a, g)) < 1 for g in G):
        raise CertificateError("a generator lies below the separating hyperplane")
    if sum(x * y for x, y in zip(a, e)) >= 1:
        raise CertificateError("the monomial is not cut off")


def _check_bundle(cert: dict) -> None:
    for c in cert["parts"]:
        recheck(c)


KINDS = {
    "membership": _check_membership,
    "nonmembership": _check_nonmembership,
    "radical": _check_radical,
    "unit_cover": _check_unit_cover,
    "gluing": _check_gluing,
    "frobenius": _check_frobenius,
    "tc_bounded": _check_tc_bounded,
    "zero_divisor": _check_rcirc,
    "semifreg_witness": _check_semifreg,
    "newton": _check_newton,
    "newton_separation": _check_newton_separation,
    "bundle": _check_bundle,
}


def recheck(cert: dict) -> None:
    """Raise :class:`CertificateError` unless ``cert`` verifies exactly."""
    kind = cert.get("kind")
    fn = KINDS.get(kind)
    if fn is None:
        raise CertificateError(f"unknown certificate kind {kind!r}")
    try:
        fn(cert)
    except CertificateError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise CertificateError(f"malformed {kind} certificate: {exc}") from exc


def iter_certificates(obj) -> Iterable[dict]:
    """Yield every top-level certificate dict nested anywhere in a report body."""
    if isinstance(obj, dict):
        if obj.get("kind") in KINDS and "ring" in obj or obj.get("kind") == "bundle":
            yield obj
            return
        for v in obj.values():
            yield from iter_certificates(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from iter_certificates(v)
