"""Name -> oracle factory, shared by the CLI and tests."""

from __future__ import annotations

from .closure import ClosureOracle, IdentityOracle, MonomialIntegralClosureOracle, RadicalOracle
from .tight import AtTightClosureOracle, FrobeniusBoundedOracle

ORACLES = {
    "identity": lambda **kw: IdentityOracle(),
    "radical": lambda nmax=64, **kw: RadicalOracle(nmax=nmax),
    "monomial_integral_closure": lambda **kw: MonomialIntegralClosureOracle(),
    "frobenius_bounded": lambda q_max=None, **kw: FrobeniusBoundedOracle(q_max),
    "at_tight_closure_bounded": lambda ideals=(), exponents=(), q_max=None, degree_bound=3, q0=None, **kw: AtTightClosureOracle(
        ideals, exponents, q_max, degree_bound, q0
    ),
}


def make_oracle(name: str, **params) -> ClosureOracle:
    try:
        factory = ORACLES[name]
    except KeyError:
        raise ValueError(f"unknown closure operation {name!r}; known: {', '.join(sorted(ORACLES))}") from None
    return factory(**params)
