"""Exact sparse multivariate polynomials over F_p and Q.

A :class:`PolyRing` fixes the variable names, the coefficient domain
(``p`` prime, or ``p == 0`` for the rationals) and a monomial order.  A
:class:`Poly` is an immutable mapping from exponent tuples to nonzero
coefficients.  Residues mod p are plain ints in ``[0, p)``; rationals are
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Sequence, Tuple

Exps = Tuple[int, ...]
Coeff = object  # int (mod p) or Fraction

__all__ = [
    "PolyRing",
    "Poly",
    "ContextMismatch",
    "is_prime",
    "is_power_of",
    "ceil_scale",
    "parse_rational",
    "frobenius_vector_power",
    "vector_str",
]


class ContextMismatch(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def is_power_of(q: int, p: int) -> bool:
    if q < 1 or p < 2:
        return False
    while q % p == 0:
        q //= p
    return q == 1


def ceil_scale(t: Fraction, q: int) -> int:
    """Return ceil(t*q) for a non-negative rational t, exactly."""
    t = Fraction(t)
    if t < 0 or q < 1:
        raise ValueError(f"ceil_scale needs t >= 0 and q >= 1, got t={t}, q={q}")
    n = t.numerator * q
    d = t.denominator
    return (n + d - 1) // d


def parse_rational(s) -> Fraction:
    """Parse ``"2/3"``, ``"1"`` or an int into a non-negative Fraction."""
    t = Fraction(s) if not isinstance(s, str) else Fraction(s.strip())
    if t < 0:
        raise ValueError(f"exponent must be non-negative, got {s!r}")
    return t


# --- monomial orders -------------------------------------------------------

def _grevlex_key(e: Exps):
    return (sum(e), tuple(-x for x in reversed(e)))


def _lex_key(e: Exps):
    return e


def make_order_key(order: str, nvars: int) -> Callable[[Exps], tuple]:
    """Return a sort key; larger key means larger monomial.

    ``order`` is ``"lex"``, ``"grevlex"`` or ``"elim:k"`` (block order,
    grevlex on the first k variables, ties broken by grevlex on the rest).
    """
    if order == "grevlex":
        return _grevlex_key
    if order == "lex":
        return _lex_key
    if order.startswith("elim:"):
        k = int(order[5:])
        if not 0 <= k <= nvars:
            raise ValueError(f"block split {k} outside 0..{nvars}")

        def key(e: Exps, k=k):
            return (_grevlex_key(e[:k]), _grevlex_key(e[k:]))

        return key
    raise ValueError(f"unknown monomial order {order!r}")


@dataclass(frozen=True)
class PolyRing:
    """Ambient polynomial ring k[x_1..x_n] with a fixed monomial order."""

    variables: Tuple[str, ...]
    p: int = 0
    order: str = "grevlex"
    _key: Callable = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.p and not is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        object.__setattr__(self, "_key", make_order_key(self.order, len(self.variables)))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def characteristic(self) -> int:
        return self.p

    def describe(self) -> str:
        dom = f"F_{self.p}" if self.p else "QQ"
        return f"{dom}[{','.join(self.variables)}]<{self.order}>"

    def key(self, e: Exps):
        return self._key(e)

    def with_order(self, order: str) -> "PolyRing":
        return PolyRing(self.variables, self.p, order)

    def extend(self, names: Sequence[str], *, front: bool = False, order: str | None = None) -> "PolyRing":
        vs = tuple(names) + self.variables if front else self.variables + tuple(names)
        return PolyRing(vs, self.p, order or self.order)

    # coefficients
    def coerce(self, c) -> Coeff:
        if self.p:
            if isinstance(c, Fraction):
                if c.denominator % self.p == 0:
                    raise ZeroDivisionError(f"{c} has no image in F_{self.p}")
                return c.numerator * pow(c.denominator, -1, self.p) % self.p
            return int(c) % self.p
        return Fraction(c)

    def inv(self, c) -> Coeff:
        if self.p:
            return pow(c, -1, self.p)
        return 1 / c

    # constructors
    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = self.coerce(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name: str) -> "Poly":
        try:
            i = self.variables.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a variable of {self.describe()}") from None
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): self.coerce(1)})

    def gens(self) -> Tuple["Poly", ...]:
        return tuple(self.var(v) for v in self.variables)

    def monomial(self, e: Exps, c=1) -> "Poly":
        if len(e) != self.nvars:
            raise ValueError(f"exponent vector {e} has wrong length for {self.describe()}")
        c = self.coerce(c)
        return Poly(self, {tuple(e): c} if c else {})

    def from_terms(self, terms: Dict[Exps, Coeff]) -> "Poly":
        out: Dict[Exps, Coeff] = {}
        for e, c in terms.items():
            c = self.coerce(c)
            if c:
                out[tuple(e)] = c
        return Poly(self, out)

    def parse(self, text: str) -> "Poly":
        return _Parser(self, text).parse()

    def monomials_up_to(self, degree: int, nvars: int | None = None) -> list:
        """Exponent vectors of total degree <= degree, ordered by degree then lex.

        Only the first ``nvars`` variables vary (defaults to all).
        """
        n = self.nvars if nvars is None else nvars
        if not 0 <= n <= self.nvars:
            raise ValueError(f"nvars={n} outside 0..{self.nvars}")
        out = []
        for d in range(degree + 1):
            layer = list(_compositions(d, n))
            layer.sort(reverse=True)
            out.extend(e + (0,) * (self.nvars - n) for e in layer)
        return out


def _compositions(d: int, n: int) -> Iterator[Exps]:
    if n == 0:
        if d == 0:
            yield ()
        return
    for first in range(d, -1, -1):
        for rest in _compositions(d - first, n - 1):
            yield (first,) + rest


class Poly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("ring", "terms", "_lead", "_hash")

    def __init__(self, ring: PolyRing, terms: Dict[Exps, Coeff]):
        self.ring = ring
        self.terms = terms
        self._lead = None
        self._hash = None

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def lead_exps(self) -> Exps:
        if self._lead is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading term")
            self._lead = max(self.terms, key=self.ring.key)
        return self._lead

    def lead_coeff(self):
        return self.terms[self.lead_exps()]

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: self.ring.key(t[0]), reverse=True)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.coerce(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # arithmetic
    def _check(self, other: "Poly"):
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.ring.variables != self.ring.variables or other.ring.p != self.ring.p:
            raise ContextMismatch(
                f"polynomial context mismatch: {self.ring.describe()} vs {other.ring.describe()}"
            )

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._lift(other)
        p = self.ring.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = (v + c) % p if p else v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Poly(self.ring, {e: (p - c if p else -c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.ring.coerce(other)
            return self.scale(c)
        self._check(other)
        p = self.ring.p
        out: Dict[Exps, Coeff] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                out[e] = v % p if p else v
        return Poly(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = self.ring.coerce(c)
        if not c:
            return self.ring.zero()
        p = self.ring.p
        return Poly(self.ring, {e: (v * c % p if p else v * c) for e, v in self.terms.items()})

    def mul_monomial(self, m: Exps, c=1) -> "Poly":
        p = self.ring.p
        c = self.ring.coerce(c)
        return Poly(
            self.ring,
            {tuple(a + b for a, b in zip(e, m)): (v * c % p if p else v * c) for e, v in self.terms.items()},
        )

    def __pow__(self, e: int):
        return self.power(e)

    def power(self, e: int, *, fast: bool = True) -> "Poly":
        if e < 0:
            raise ValueError("negative exponent")
        if e == 0:
            return self.ring.one()
        p = self.ring.p
        if fast and p and is_power_of(e, p):
            # x -> x^p is additive in char p and fixes F_p
            return Poly(self.ring, {tuple(a * e for a in k): c for k, c in self.terms.items()})
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def substitute(self, target: PolyRing, images: Sequence["Poly"]) -> "Poly":
        """Ring map sending variable i to ``images[i]`` (polynomials in ``target``)."""
        if len(images) != self.ring.nvars:
            raise ValueError("one image per variable required")
        out = target.zero()
        cache: Dict[Tuple[int, int], Poly] = {}
        for e, c in self.terms.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if k:
                    pw = cache.get((i, k))
                    if pw is None:
                        pw = images[i].power(k)
                        cache[(i, k)] = pw
                    term = term * pw
            out = out + term
        return out

    def embed(self, target: PolyRing) -> "Poly":
        """Rename into ``target`` by variable name.

        Target variables missing from the source get exponent 0; source
        variables missing from the target must not occur in the polynomial.
        """
        if self.ring.p != target.p:
            raise ContextMismatch(f"cannot embed {self.ring.describe()} into {target.describe()}")
        tv = {v: i for i, v in enumerate(target.variables)}
        idx = [tv.get(v) for v in self.ring.variables]
        n = target.nvars
        out = {}
        for e, c in self.terms.items():
            f = [0] * n
            for v, i, k in zip(self.ring.variables, idx, e):
                if i is None:
                    if k:
                        raise ContextMismatch(f"{v!r} occurs but is not a variable of {target.describe()}")
                    continue
                f[i] = k
            out[tuple(f)] = c
        return Poly(target, out)

    def reorder(self, order: str) -> "Poly":
        return Poly(self.ring.with_order(order), self.terms)

    # comparison / printing
    def __eq__(self, other):
        if isinstance(other, Poly):
            return (
                self.ring.variables == other.ring.variables
                and self.ring.p == other.ring.p
                and self.terms == other.terms
            )
        if isinstance(other, (int, Fraction)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.variables, self.ring.p, frozenset(self.terms.items())))
        return self._hash

    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"Poly({poly_str(self)!r}, {self.ring.describe()})"


def _coeff_str(c, p: int) -> str:
    if p:
        return str(c)
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_str(f: Poly) -> str:
    if not f.terms:
        return "0"
    p = f.ring.p
    names = f.ring.variables
    parts = []
    for e, c in f.sorted_terms():
        neg = (not p) and c < 0
        a = -c if neg else c
        mono = [n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k]
        cs = _coeff_str(a, p)
        if not mono:
            body = cs
        elif cs == "1":
            body = "*".join(mono)
        else:
            body = cs + "*" + "*".join(mono)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("-" if neg else "+") + body)
    return "".join(parts)


def vector_str(v: Sequence[Poly]) -> str:
    return "(" + ", ".join(str(c) for c in v) + ")"


def frobenius_vector_power(z: Sequence[Poly], q: int) -> Tuple[Poly, ...]:
    """Componentwise q-th power of a free-module element, q a power of the characteristic."""
    if not z:
        return tuple(z)
    p = z[0].ring.p
    if not p or not is_power_of(q, p):
        raise ValueError(f"q={q} is not a power of the characteristic {p}")
    return tuple(c.power(q) for c in z)


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class PolyParseError(ValueError):
    pass


class _Parser:
    """Recursive-descent parser for the canonical grammar plus parentheses."""

    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise PolyParseError(f"unexpected character at column {pos + 1} in {self.text!r}")
            num, name, op = m.groups()
            if num is not None:
                self.toks.append(("num", int(num), m.start(1)))
            elif name is not None:
                self.toks.append(("var", name, m.start(2)))
            else:
                self.toks.append(("op", "^" if op == "**" else op, m.start(3)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def fail(self, msg):
        col = self.peek()[2] + 1
        raise PolyParseError(f"{msg} at column {col} in {self.text!r}")

    def parse(self) -> Poly:
        if not self.toks:
            self.fail("empty polynomial")
        f = self.expr()
        if self.i != len(self.toks):
            self.fail("trailing input")
        return f

    def expr(self) -> Poly:
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        f = self.term()
        if sign < 0:
            f = -f
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                g = self.term()
                f = f + g if val == "+" else f - g
            else:
                return f

    def term(self) -> Poly:
        f = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                f = f * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                k, d, _ = self.take()
                if k != "num" or d == 0:
                    self.fail("division only by a nonzero integer constant")
                f = f * self.ring.inv(self.ring.coerce(d))
            else:
                return f

    def factor(self) -> Poly:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k, e, _ = self.take()
            if k != "num":
                self.fail("exponent must be a non-negative integer")
            return base.power(e)
        return base

    def atom(self) -> Poly:
        kind, val, _ = self.peek()
        if kind == "num":
            self.take()
            return self.ring.const(val)
        if kind == "var":
            self.take()
            if val not in self.ring.variables:
                self.i -= 1
                self.fail(f"unknown variable {val!r}")
            return self.ring.var(val)
        if kind == "op" and val == "(":
            self.take()
            f = self.expr()
            k, v, _ = self.take()
            if v != ")":
                self.i -= 1
                self.fail("expected ')'")
            return f
        if kind == "op" and val == "-":
            self.take()
            return -self.atom()
        self.fail("expected a term")
