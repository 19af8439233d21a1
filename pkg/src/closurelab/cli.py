"""Command-line front end: ``closurelab <command> problem.json``.

Exit codes: 0 completed (whatever the verdict), 1 usage or parse error,
2 a mathematical precondition failed, 3 a certificate failed its recheck.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

from . import __version__
from . import certificates as C
from .closure import (
    GluingFailure,
    PreconditionError,
    UnsupportedInput,
    check_extensive,
    check_generator_independence,
    check_glueable,
    check_idempotent,
    check_open_persistence,
    check_order_preserving,
    gluing_certificate,
    global_from_unit_cover,
    _all_charts,
)
from .problem import Problem, ProblemError, coefficient_data, parse_problem
from .registry import make_oracle
from .rings import NotAUnitCover, Submodule
from .sampling import random_ideal, random_monomial_ideal, random_poly, rng
from .sheaf import (
    AffineScheme,
    QCSubsheafPair,
    check_closed_subsheaf,
    check_quasicoherence,
    semi_freg_cover_probe,
    semi_freg_probe,
)
from .tight import (
    TightClosureProblem,
    Witness,
    at_tc_bounded_membership,
    check_witness_persistence,
    frobenius_closure_membership,
    plain_witness_search,
    q_range,
    tc_bounded_membership,
    witness_search,
)

COMMANDS = ["member", "axioms", "persistence", "glueable", "genunit", "qcoh", "closed-subsheaf", "tc-witness", "frobenius", "semifreg"]

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_RECHECK = 0, 1, 2, 3


class Context:
    def __init__(self, prob: Problem, flags: dict):
        self.prob = prob
        self.R = prob.ring
        p = self.R.characteristic
        b = {"q_max": p**3 if p else None, "pool_bound": 2, "degree_bound": 3, "nmax": 64, "kmax": 3}
        for k in ("q_max", "pool_bound", "degree_bound", "nmax"):
            if k in prob.closure:
                b[k] = prob.closure[k]
        b.update(prob.bounds)
        b.update({k: v for k, v in flags.items() if v is not None and k in b})
        self.bounds = b
        self.seed = flags.get("seed")
        if self.seed is None:
            self.seed = prob.args.get("seed", 0)
        self._oracle = None
        self.op = None

    @property
    def oracle(self):
        if self._oracle is None:
            name = self.prob.closure.get("name")
            if name is None:
                raise ProblemError("$.closure: this command needs a closure operation")
            ideals, exps = coefficient_data(self.prob)
            self._oracle = make_oracle(
                name,
                nmax=self.bounds["nmax"],
                q_max=self.bounds["q_max"],
                degree_bound=self.bounds["degree_bound"],
                ideals=ideals,
                exponents=exps,
                q0=self.prob.closure.get("q0"),
            )
        return self._oracle

    def sub(self, key="submodule", ref=None, where=None):
        ref = self.prob.require(key, self.op) if ref is None else ref
        return self.prob.submodule(ref, where or f"$.command.args.{key}")

    def elt(self, L: Submodule, key="element", ref=None, where=None):
        ref = self.prob.require(key, self.op) if ref is None else ref
        return self.prob.element(ref, L.rank, where or f"$.command.args.{key}")

    def polys(self, key, required=True, default=None):
        if key not in self.prob.args:
            if required:
                self.prob.require(key, self.op)
            return default
        return self.prob.polys(self.prob.args[key], f"$.command.args.{key}")

    def poly(self, key):
        ref = self.prob.require(key, self.op)
        ref = self.prob.elements.get(ref, ref) if isinstance(ref, str) else ref
        return self.prob.poly(ref, f"$.command.args.{key}")

    def instances(self, key="instances"):
        out = []
        for i, inst in enumerate(self.prob.require(key, self.op)):
            where = f"$.command.args.{key}[{i}]"
            if not isinstance(inst, dict):
                raise ProblemError(f"{where}: expected an object with element and submodule")
            for k in ("element", "submodule"):
                if k not in inst:
                    raise ProblemError(f"{where}.{k}: required")
            L = self.prob.submodule(inst["submodule"], f"{where}.submodule")
            out.append((self.prob.element(inst["element"], L.rank, f"{where}.element"), L))
        return out


def _vs(v):
    return [str(c) for c in v]


def _inst_echo(z, L):
    return {"element": _vs(z), "submodule": [_vs(v) for v in L.gens]}


# --- commands ------------------------------------------------------------------


def cmd_member(ctx: Context) -> dict:
    L = ctx.sub()
    z = ctx.elt(L)
    cover = ctx.polys("cover", required=False)
    if cover:
        v = global_from_unit_cover(ctx.oracle, ctx.R, cover, z, L)
        return {"instance": _inst_echo(z, L), "cover": _vs(cover), "verdict": v.to_dict(), "charts": v.data["charts"]}
    v = ctx.oracle.member(z, L)
    return {"instance": _inst_echo(z, L), "verdict": v.to_dict()}


def _random_samples(ctx: Context, spec: dict):
    r = rng(ctx.seed)
    count = spec.get("count", 10)
    ngens = spec.get("ngens", 2)
    degree = spec.get("degree", 3)
    mono = spec.get("monomial", False)
    samples, pairs = [], []
    for _ in range(count):
        K = (random_monomial_ideal if mono else random_ideal)(ctx.R, r, ngens, degree)
        samples.append(K)
        extra = (random_monomial_ideal if mono else random_ideal)(ctx.R, r, 1, degree)
        pairs.append((K, K.extend(extra.gens)))
    return samples, pairs


def cmd_axioms(ctx: Context) -> dict:
    args = ctx.prob.args
    cl = ctx.oracle
    samples = [ctx.sub(ref=s, where=f"$.command.args.samples[{i}]") for i, s in enumerate(args.get("samples", []))]
    pairs = []
    for i, pr in enumerate(args.get("pairs", [])):
        if not isinstance(pr, list) or len(pr) != 2:
            raise ProblemError(f"$.command.args.pairs[{i}]: expected [K, L]")
        pairs.append(tuple(ctx.sub(ref=s, where=f"$.command.args.pairs[{i}][{j}]") for j, s in enumerate(pr)))
    if "random" in args:
        rs, rp = _random_samples(ctx, args["random"])
        samples += rs
        pairs += rp
    if not samples and not pairs:
        raise ProblemError("$.command.args: give samples, pairs or random")
    which = args.get("axioms", ["extensive", "order_preserving", "idempotent"])
    pb = ctx.bounds["pool_bound"]
    reports = []
    for ax in which:
        try:
            if ax == "extensive":
                rep = check_extensive(cl, samples + [L for _, L in pairs])
            elif ax == "order_preserving":
                rep = check_order_preserving(cl, pairs, pb)
            elif ax == "idempotent":
                rep = check_idempotent(cl, samples, pb)
            else:
                raise ProblemError(f"$.command.args.axioms: unknown axiom {ax!r}")
        except ValueError as exc:
            if isinstance(exc, (ProblemError, PreconditionError, UnsupportedInput)):
                raise
            raise ProblemError(f"$.command.args: {exc}") from None
        reports.append(rep.to_dict())
    return {"samples": len(samples), "pairs": len(pairs), "reports": reports, "seed": ctx.seed}


def cmd_persistence(ctx: Context) -> dict:
    f = ctx.poly("f")
    rep = check_open_persistence(ctx.oracle, ctx.R, f, ctx.instances())
    return {"report": rep.to_dict()}


def cmd_glueable(ctx: Context) -> dict:
    cover = ctx.polys("cover")
    g = ctx.poly("g")
    inst = ctx.instances()
    rep = check_glueable(ctx.oracle, ctx.R, cover, g, inst)
    out = {"report": rep.to_dict()}
    if ctx.prob.args.get("certificates"):
        certs = []
        for z, L in inst:
            local, _ = _all_charts(ctx.oracle, z, L, cover)
            row = _inst_echo(z, L)
            if not local:
                row["certificate"] = None
                row["note"] = "not In on every chart"
            else:
                try:
                    row["certificate"] = gluing_certificate(ctx.oracle, ctx.R, cover, g, z, L, nmax=ctx.bounds["nmax"]).to_dict()
                except GluingFailure as exc:
                    row["certificate"] = None
                    row["failure"] = {"message": str(exc), "partial": exc.partial}
            certs.append(row)
        out["gluing_certificates"] = certs
    return out


def cmd_genunit(ctx: Context) -> dict:
    cover = ctx.polys("cover")
    if "instances" in ctx.prob.args:
        inst = ctx.instances()
    else:
        L = ctx.sub()
        inst = [(ctx.elt(L), L)]
    rows = []
    for z, L in inst:
        v = global_from_unit_cover(ctx.oracle, ctx.R, cover, z, L)
        row = _inst_echo(z, L)
        row["verdict"] = v.to_dict()
        row["charts"] = v.data["charts"]
        rows.append(row)
    out = {"cover": _vs(cover), "results": rows}
    other = ctx.polys("compare_cover", required=False)
    if other:
        out["generator_independence"] = check_generator_independence(ctx.oracle, ctx.R, cover, other, inst).to_dict()
    return out


def cmd_qcoh(ctx: Context) -> dict:
    L = ctx.sub()
    fs = ctx.polys("f_samples")
    return {"report": check_quasicoherence(ctx.oracle, QCSubsheafPair(L), fs, ctx.bounds["pool_bound"], ctx.bounds["kmax"])}


def cmd_closed_subsheaf(ctx: Context) -> dict:
    L = ctx.sub()
    cover = ctx.polys("cover", required=False, default=[ctx.R.ambient.one()])
    fs = ctx.polys("f_samples", required=False, default=[])
    return {"report": check_closed_subsheaf(ctx.oracle, QCSubsheafPair(L), cover, fs, ctx.bounds["pool_bound"])}


def _tc_problem(ctx: Context, L, z):
    ideals, exps = coefficient_data(ctx.prob)
    return TightClosureProblem(ctx.R, L, z, ideals, exps)


def cmd_tc_witness(ctx: Context) -> dict:
    L = ctx.sub()
    z = ctx.elt(L)
    prob = _tc_problem(ctx, L, z)
    p = prob.p
    q_max = ctx.bounds["q_max"]
    args = ctx.prob.args
    out = {"instance": _inst_echo(z, L), "coefficients": [{"ideal": _vs(a), "t": str(t)} for a, t in zip(prob.ideals, prob.exponents)]}
    wspec = args.get("witness")
    if wspec is not None:
        c = ctx.prob.poly(wspec.get("c", "1"), "$.command.args.witness.c")
        q0 = wspec.get("q0", p)
        w = Witness(c, q0, q_range(p, q0, q_max))
        v = at_tc_bounded_membership(prob, w)
        out["verdict"] = v.to_dict()
        found = w if v.is_in else None
    else:
        q0 = args.get("q0", p)
        res = witness_search(prob, ctx.bounds["degree_bound"], q_range(p, q0, q_max))
        out["verdict"] = res.verdict.to_dict()
        out["search"] = {"tried": res.tried, "bounds": res.bounds}
        found = res.witness
    out["witness"] = found.to_dict() if found else None
    if found and args.get("persist"):
        fs = ctx.polys("persist")
        out["persistence"] = check_witness_persistence(prob, found, fs)
    if args.get("compare_plain"):
        if prob.ideals:
            raise PreconditionError("compare_plain needs an empty coefficient list")
        if wspec is not None:
            pv = tc_bounded_membership(ctx.R, L, z, found or w)
            pw = found if pv.is_in else None
        else:
            pres = plain_witness_search(ctx.R, L, z, ctx.bounds["degree_bound"], q_range(p, args.get("q0", p), q_max))
            pv, pw = pres.verdict, pres.witness
        out["plain"] = {
            "verdict": pv.to_dict(),
            "witness": pw.to_dict() if pw else None,
            "agrees": pv.to_dict() == out["verdict"] and (pw.to_dict() if pw else None) == out["witness"],
        }
    return out


def cmd_frobenius(ctx: Context) -> dict:
    L = ctx.sub()
    z = ctx.elt(L)
    q_max = ctx.bounds["q_max"]
    v = frobenius_closure_membership(z, L, q_max)
    out = {"instance": _inst_echo(z, L), "membership": L.membership(z)[1], "verdict": v.to_dict()}
    if v.is_in:
        q = v.data["q"]
        prob = TightClosureProblem(ctx.R, L, z)
        qs = q_range(ctx.R.characteristic, q, max(q, q_max))
        t = at_tc_bounded_membership(prob, Witness(ctx.R.ambient.one(), q, qs))
        out["implied_tight_closure"] = {"q_range": list(qs), "status": t.status}
    return out


def cmd_semifreg(ctx: Context) -> dict:
    args = ctx.prob.args
    refs = ctx.prob.require("ideals", "semifreg")
    ideals = [ctx.sub(ref=r, where=f"$.command.args.ideals[{i}]").ideal_gens for i, r in enumerate(refs)]
    fs = ctx.polys("f_samples", required=False, default=[])
    X = AffineScheme(ctx.R)
    kw = {"degree_bound": ctx.bounds["degree_bound"], "q_max": ctx.bounds["q_max"]}
    if "cover" in args:
        return {"probe": semi_freg_cover_probe(X, ctx.polys("cover"), ideals, fs, **kw)}
    return {"probe": semi_freg_probe(X, ideals, fs, **kw).to_dict()}


HANDLERS: Dict[str, Callable[[Context], dict]] = {
    "member": cmd_member,
    "axioms": cmd_axioms,
    "persistence": cmd_persistence,
    "glueable": cmd_glueable,
    "genunit": cmd_genunit,
    "qcoh": cmd_qcoh,
    "closed-subsheaf": cmd_closed_subsheaf,
    "tc-witness": cmd_tc_witness,
    "frobenius": cmd_frobenius,
    "semifreg": cmd_semifreg,
}

NEEDS_ORACLE = {"member", "axioms", "persistence", "glueable", "genunit", "qcoh", "closed-subsheaf"}
NEEDS_CHAR_P = {"tc-witness", "frobenius", "semifreg"}


def run(prob: Problem, op: str, flags: Optional[dict] = None) -> dict:
    """Execute one command and return the deterministic report body."""
    flags = flags or {}
    if prob.op and prob.op != op:
        raise ProblemError(f"$.command.op: file is for '{prob.op}', not '{op}'")
    if op in NEEDS_CHAR_P and not prob.ring.characteristic:
        raise ProblemError(f"$.ring.characteristic: '{op}' needs a prime characteristic")
    ctx = Context(prob, flags)
    ctx.op = op
    result = HANDLERS[op](ctx)
    body = {
        "command": op,
        "problem": Path(prob.source).name,
        "ring": prob.ring.spec(),
        "bounds": ctx.bounds,
        "result": result,
    }
    if op in NEEDS_ORACLE:
        body["closure"] = dict(ctx.oracle.capabilities(), params=_jsonable(ctx.oracle.params()))
    return body


def _jsonable(x):
    return json.loads(json.dumps(x, default=str))


def recheck_body(body) -> int:
    n = 0
    for cert in C.iter_certificates(body):
        C.recheck(cert)
        n += 1
    return n


# --- rendering -------------------------------------------------------------------


def _flatten(obj, prefix="", out=None):
    out = [] if out is None else out
    if isinstance(obj, dict):
        if obj.get("kind") in C.KINDS and ("ring" in obj or obj.get("kind") == "bundle"):
            out.append((prefix, f"<{obj['kind']} certificate>"))
            return out
        if not obj:
            out.append((prefix, "{}"))
        for k, v in obj.items():
            _flatten(v, f"{prefix}.{k}" if prefix else str(k), out)
    elif isinstance(obj, list):
        if not obj:
            out.append((prefix, "[]"))
        elif all(not isinstance(v, (dict, list)) for v in obj):
            out.append((prefix, "[" + ", ".join(map(str, obj)) + "]"))
        else:
            for i, v in enumerate(obj):
                _flatten(v, f"{prefix}[{i}]", out)
    else:
        out.append((prefix, "null" if obj is None else str(obj).lower() if isinstance(obj, bool) else str(obj)))
    return out


def render_text(body: dict) -> str:
    rows = _flatten(body)
    width = max(len(k) for k, _ in rows)
    lines = [f"closurelab {body['command']} report", ""]
    lines += [f"{k.ljust(width)}  {v}" for k, v in rows]
    return "\n".join(lines) + "\n"


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# --- entry point -------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="closurelab", description="Closure operations on sheaves over Spec R, with certificates.")
    ap.add_argument("--version", action="version", version=f"closurelab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("problem", type=Path)
        sp.add_argument("--qmax", type=int, dest="q_max")
        sp.add_argument("--pool-bound", type=int, dest="pool_bound")
        sp.add_argument("--degree-bound", type=int, dest="degree_bound")
        sp.add_argument("--nmax", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--json", action="store_true", help="print the JSON report instead of text")
        sp.add_argument("-o", "--output", type=Path, help="also write the JSON report here")
    vp = sub.add_parser("verify", help="recheck every certificate in a JSON report")
    vp.add_argument("report", type=Path)
    vp.add_argument("--json", action="store_true")
    return ap


def _fail(code: int, msg: str) -> int:
    print(f"closurelab: {msg}", file=sys.stderr)
    return code


def _verify(args) -> int:
    try:
        data = json.loads(args.report.read_text(encoding="utf-8"))
    except OSError as exc:
        return _fail(EXIT_USAGE, f"{args.report}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        return _fail(EXIT_USAGE, f"{args.report}:{exc.lineno}:{exc.colno}: JSON parse error: {exc.msg}")
    target = data.get("body", data) if isinstance(data, dict) else data
    certs = list(C.iter_certificates(target))
    failures = []
    for i, cert in enumerate(certs):
        try:
            C.recheck(cert)
        except C.CertificateError as exc:
            failures.append({"index": i, "kind": cert.get("kind"), "error": str(exc)})
    summary = {"certificates": len(certs), "failures": failures, "ok": not failures}
    if args.json:
        sys.stdout.write(dumps(summary))
    else:
        print(f"checked {len(certs)} certificate(s): {'all valid' if not failures else f'{len(failures)} failed'}")
        for f in failures:
            print(f"  #{f['index']} {f['kind']}: {f['error']}")
    return EXIT_RECHECK if failures else EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "verify":
        return _verify(args)
    flags = {k: getattr(args, k) for k in ("q_max", "pool_bound", "degree_bound", "nmax", "seed")}
    t0 = time.perf_counter()
    try:
        prob = parse_problem(args.problem)
        body = run(prob, args.command, flags)
        recheck_body(body)
    except ProblemError as exc:
        return _fail(EXIT_USAGE, str(exc))
    except (PreconditionError, UnsupportedInput, NotAUnitCover) as exc:
        return _fail(EXIT_PRECONDITION, f"precondition violated: {exc}")
    except C.CertificateError as exc:
        return _fail(EXIT_RECHECK, f"certificate recheck failed: {exc}")
    report = {"body": body, "meta": {"wall_clock_seconds": round(time.perf_counter() - t0, 6), "version": __version__}}
    if args.output:
        args.output.write_text(dumps(report), encoding="utf-8")
    if args.json:
        sys.stdout.write(dumps(report))
    else:
        sys.stdout.write(render_text(body))
        sys.stdout.write(f"# wall-clock {report['meta']['wall_clock_seconds']:.3f}s\n")
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
