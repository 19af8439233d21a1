"""Problem files: JSON, schema-validated, every polynomial parsed under the declared ring."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import jsonschema

from .algebra import Poly, PolyParseError, is_prime, parse_rational
from .rings import InconsistentRing, PresentedRing, Submodule, make_ring

SCHEMA_VERSION = 1


class ProblemError(ValueError):
    """Malformed problem file; the message starts with the offending location."""


def load_schema() -> dict:
    text = resources.files("closurelab").joinpath("schema/problem.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


@dataclass
class Problem:
    raw: dict
    ring: PresentedRing
    ideals: Dict[str, Submodule] = field(default_factory=dict)
    modules: Dict[str, Submodule] = field(default_factory=dict)
    elements: Dict[str, Any] = field(default_factory=dict)
    closure: dict = field(default_factory=dict)
    command: dict = field(default_factory=dict)
    source: str = "<memory>"

    @property
    def op(self) -> Optional[str]:
        return self.command.get("op")

    @property
    def args(self) -> dict:
        return self.command.get("args", {})

    @property
    def bounds(self) -> dict:
        return self.command.get("bounds", {})

    # --- reference resolution --------------------------------------------

    def poly(self, text, where: str) -> Poly:
        if not isinstance(text, (str, int)):
            raise ProblemError(f"{where}: expected a polynomial string")
        try:
            return self.ring.ambient.parse(str(text))
        except (PolyParseError, KeyError, ZeroDivisionError) as exc:
            raise ProblemError(f"{where}: {exc}") from None

    def submodule(self, ref, where: str) -> Submodule:
        if isinstance(ref, str):
            if ref in self.ideals:
                return self.ideals[ref]
            if ref in self.modules:
                return self.modules[ref]
            raise ProblemError(f"{where}: unresolved reference {ref!r}")
        if isinstance(ref, list):
            return self.ring.ideal([self.poly(g, f"{where}[{i}]") for i, g in enumerate(ref)])
        raise ProblemError(f"{where}: expected an ideal/module name or a list of generators")

    def element(self, ref, rank: int, where: str) -> Tuple[Poly, ...]:
        if isinstance(ref, str) and ref in self.elements:
            where = f"$.elements.{ref}"
            ref = self.elements[ref]
        if isinstance(ref, (str, int)):
            ref = [ref]
        if not isinstance(ref, list):
            raise ProblemError(f"{where}: expected an element")
        if len(ref) != rank:
            raise ProblemError(f"{where}: element has {len(ref)} components, the module has rank {rank}")
        return tuple(self.poly(c, f"{where}[{i}]") for i, c in enumerate(ref))

    def polys(self, refs, where: str) -> List[Poly]:
        if not isinstance(refs, list):
            raise ProblemError(f"{where}: expected a list of polynomials")
        return [self.poly(self.elements.get(r, r) if isinstance(r, str) else r, f"{where}[{i}]") for i, r in enumerate(refs)]

    def require(self, key: str, op: str):
        if key not in self.args:
            raise ProblemError(f"$.command.args.{key}: required by '{op}'")
        return self.args[key]


def parse_problem_text(text: str, source: str = "<memory>") -> Problem:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{source}:{exc.lineno}:{exc.colno}: JSON parse error: {exc.msg}") from None
    return parse_problem_dict(raw, source)


def parse_problem(path) -> Problem:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemError(f"{path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ProblemError(f"{path}: not UTF-8") from None
    return parse_problem_text(text, str(path))


def parse_problem_dict(raw: dict, source: str = "<memory>") -> Problem:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        e = errors[0]
        raise ProblemError(f"{_path(e.absolute_path)}: {e.message}")
    rs = raw["ring"]
    p = rs["characteristic"]
    if p and not is_prime(p):
        raise ProblemError(f"$.ring.characteristic: {p} is neither 0 nor prime")
    try:
        ring = make_ring(
            p,
            rs["variables"],
            [],
            order=rs.get("order", "grevlex"),
        )
        amb = ring.ambient
        rel = [_parse(amb, g, f"$.ring.relations[{i}]") for i, g in enumerate(rs.get("relations", []))]
        rad = rs.get("radical")
        if rad is not None:
            rad = [_parse(amb, g, f"$.ring.radical[{i}]") for i, g in enumerate(rad)]
        ring = PresentedRing(
            amb,
            rel,
            assert_domain=rs.get("assert_domain", False),
            assert_reduced=rs.get("assert_reduced"),
            radical=rad,
        )
    except InconsistentRing as exc:
        raise ProblemError(f"$.ring: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ProblemError):
            raise
        raise ProblemError(f"$.ring: {exc}") from None
    prob = Problem(raw, ring, source=source)
    prob.elements = dict(raw.get("elements", {}))
    for name, gens in raw.get("ideals", {}).items():
        prob.ideals[name] = ring.ideal([prob.poly(g, f"$.ideals.{name}[{i}]") for i, g in enumerate(gens)])
    for name, spec in raw.get("modules", {}).items():
        if name in prob.ideals:
            raise ProblemError(f"$.modules.{name}: name already used by an ideal")
        m = spec["rank"]
        vecs = []
        for key in ("generators", "relations"):
            rows = []
            for i, v in enumerate(spec.get(key, [])):
                where = f"$.modules.{name}.{key}[{i}]"
                if len(v) != m:
                    raise ProblemError(f"{where}: length {len(v)} but rank {m}")
                rows.append(tuple(prob.poly(c, f"{where}[{j}]") for j, c in enumerate(v)))
            vecs.append(tuple(rows))
        prob.modules[name] = Submodule(ring, m, vecs[0], vecs[1])
    prob.closure = dict(raw.get("closure", {}))
    for i, co in enumerate(prob.closure.get("coefficients", [])):
        prob.submodule(co["ideal"], f"$.closure.coefficients[{i}].ideal")
        try:
            parse_rational(co["t"])
        except (ValueError, ZeroDivisionError) as exc:
            raise ProblemError(f"$.closure.coefficients[{i}].t: {exc}") from None
    prob.command = dict(raw.get("command", {}))
    return prob


def _parse(amb, text, where):
    try:
        return amb.parse(text)
    except (PolyParseError, KeyError, ZeroDivisionError) as exc:
        raise ProblemError(f"{where}: {exc}") from None


def coefficient_data(prob: Problem) -> Tuple[tuple, tuple]:
    """(ideals, exponents) of the a^t closure spec."""
    ideals, exps = [], []
    for i, co in enumerate(prob.closure.get("coefficients", [])):
        L = prob.submodule(co["ideal"], f"$.closure.coefficients[{i}].ideal")
        ideals.append(L.ideal_gens)
        exps.append(parse_rational(co["t"]))
    return tuple(ideals), tuple(exps)
