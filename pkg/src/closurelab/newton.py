"""Exact Newton-polyhedron membership for monomial ideals.

x^e lies in the integral closure of a monomial ideal with exponent set G
iff e lies in conv(G) + R^n_{>=0}.  Membership certificates are convex
weights lam with sum(lam_i * g_i) <= e; non-membership certificates are a
weight vector a >= 0 with a.g >= 1 for every g in G but a.e < 1.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

Vec = Tuple[int, ...]


def solve_exact(rows: Sequence[Sequence], rhs: Sequence) -> Optional[List[Fraction]]:
    """Unique solution of a square-or-tall linear system over Q, else None."""
    m = len(rows)
    if m == 0:
        return None
    n = len(rows[0])
    A = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            return None  # free column: not unique
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, m):
        if A[i][n] != 0:
            return None  # inconsistent
    return [A[i][n] for i in range(n)]


@lru_cache(maxsize=2048)
def facet_normals(gens: Tuple[Vec, ...]) -> Tuple[Tuple[Fraction, ...], ...]:
    """Valid inequalities a.x >= 1 (a >= 0) including every non-coordinate facet."""
    if not gens:
        return ()
    n = len(gens[0])
    if any(not any(g) for g in gens):
        return ()  # unit ideal: the polyhedron is the whole orthant
    pts = sorted(set(gens))
    out = set()
    for t in range(1, n + 1):
        for T in combinations(pts, t):
            for D in combinations(range(n), n - t):
                rows = [list(g) for g in T] + [[1 if k == j else 0 for k in range(n)] for j in D]
                rhs = [1] * t + [0] * (n - t)
                a = solve_exact(rows, rhs)
                if a is None or any(x < 0 for x in a):
                    continue
                if all(sum(x * y for x, y in zip(a, g)) >= 1 for g in pts):
                    out.add(tuple(a))
    return tuple(sorted(out))


def separating_weights(gens: Sequence[Vec], e: Vec) -> Optional[Tuple[Fraction, ...]]:
    """A facet weight vector violated by e, or None when e is in the polyhedron."""
    gens = tuple(tuple(g) for g in gens)
    if not gens:
        raise ValueError("the zero ideal has an empty Newton polyhedron")
    for a in facet_normals(gens):
        if sum(x * y for x, y in zip(a, e)) < 1:
            return a
    return None


def convex_weights(gens: Sequence[Vec], e: Vec) -> Optional[Tuple[Fraction, ...]]:
    """Weights lam >= 0, sum 1, with sum(lam_i g_i) <= e componentwise, if any exist.

    Searches basic solutions of [g_i | e_j ; 1 | 0] x = [e ; 1], x >= 0.
    """
    gens = [tuple(g) for g in gens]
    if not gens:
        return None
    n = len(e)
    k = len(gens)
    for i, g in enumerate(gens):
        if all(a <= b for a, b in zip(g, e)):
            return tuple(Fraction(int(j == i)) for j in range(k))
    cols = [list(g) + [1] for g in gens] + [[1 if r == j else 0 for r in range(n)] + [0] for j in range(n)]
    rhs = list(e) + [1]
    for size in range(2, n + 2):
        for S in combinations(range(len(cols)), size):
            if all(s >= k for s in S):
                continue
            rows = [[cols[s][r] for s in S] for r in range(n + 1)]
            x = solve_exact(rows, rhs)
            if x is None or any(v < 0 for v in x):
                continue
            lam = [Fraction(0)] * k
            for s, v in zip(S, x):
                if s < k:
                    lam[s] = v
            return tuple(lam)
    return None


def in_newton_polyhedron(gens: Sequence[Vec], e: Vec) -> bool:
    if not gens:
        return False
    return separating_weights(gens, e) is None
