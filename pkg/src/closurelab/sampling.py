"""Seeded random instances for property checks and the CLI ``--seed`` flag."""

from __future__ import annotations

import random
from typing import List, Optional, Sequence

from .algebra import Poly, PolyRing
from .rings import PresentedRing, Submodule


def rng(seed) -> random.Random:
    return random.Random(seed)


def random_poly(ring: PolyRing, r: random.Random, degree: int = 3, terms: int = 3, nvars: Optional[int] = None) -> Poly:
    """Sum of up to ``terms`` random monomials of degree <= ``degree`` with nonzero coefficients."""
    mons = ring.monomials_up_to(degree, nvars)
    out = {}
    for _ in range(r.randint(1, terms)):
        e = r.choice(mons)
        if ring.p:
            c = r.randrange(1, ring.p)
        else:
            c = r.choice([-2, -1, 1, 1, 2, 3])
        out[e] = out.get(e, 0) + c
    return ring.from_terms(out)


def random_monomial(ring: PolyRing, r: random.Random, degree: int = 3, min_degree: int = 0) -> Poly:
    mons = [e for e in ring.monomials_up_to(degree) if sum(e) >= min_degree]
    return ring.monomial(r.choice(mons))


def random_ideal(R: PresentedRing, r: random.Random, ngens: int = 2, degree: int = 3, terms: int = 2) -> Submodule:
    gens = []
    while len(gens) < ngens:
        g = random_poly(R.ambient, r, degree, terms, len(R.base_variables))
        if not g.is_zero():
            gens.append(g)
    return R.ideal(gens)


def random_monomial_ideal(R: PresentedRing, r: random.Random, ngens: int = 2, degree: int = 3) -> Submodule:
    gens = [random_monomial(R.ambient, r, degree, 1) for _ in range(ngens)]
    return R.ideal(gens)


def random_cover(R: PresentedRing, r: random.Random, size: int = 2, degree: int = 2) -> List[Poly]:
    """A list of elements generating the unit ideal: random f's plus a complement."""
    from .groebner import IdealPresentation, groebner_basis

    A = R.ambient
    for _ in range(200):
        fs = [random_poly(A, r, degree, 2, len(R.base_variables)) for _ in range(size)]
        fs = [f for f in fs if not R.is_zero(f)]
        if fs and groebner_basis(IdealPresentation(A, tuple(fs) + R.relations)).is_unit():
            return fs
        if fs:
            f = fs[0]
            # f and f + 1 always generate the unit ideal
            return [f, f + 1] + fs[1:]
    raise RuntimeError("could not sample a cover")


def pick(r: random.Random, items: Sequence):
    return items[r.randrange(len(items))]
