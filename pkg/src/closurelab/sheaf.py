"""Sheaves on X = Spec R restricted to distinguished opens.

Opens are finite unions D(f_1) u ... u D(f_k).  A quasi-coherent pair is a
single submodule L of M = R^m / N; a cover-presented subsheaf is chart data
L_i over R_{f_i} that agrees on overlaps.  Closure membership of a section
is decided chart by chart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import certificates as C
from .algebra import Poly
from .closure import (
    AxiomReport,
    ClosureOracle,
    FAIL,
    INCONCLUSIVE,
    PASS,
    PreconditionError,
    _certs,
    chart_verdict,
    parallel_map,
)
from .rings import (
    LocalizedRing,
    NotAUnitCover,
    PresentedRing,
    Submodule,
    canonical_map,
    chart_overlap,
    is_unit_cover,
    localize,
)
from .tight import tc_nonclosed_certificate
from .verdict import IN, NOT_IN, UNKNOWN, Verdict

__all__ = [
    "AffineScheme",
    "OpenSet",
    "QCSubsheafPair",
    "CoverPresentedSubsheaf",
    "Section",
    "SectionMismatch",
    "FrameworkInconsistency",
    "section_in_closure_sheaf",
    "closure_sections_on_affine",
    "check_quasicoherence",
    "check_closed_subsheaf",
    "semi_freg_probe",
    "semi_freg_cover_probe",
    "compatibility_check",
]


class SectionMismatch(ValueError):
    """Chart elements of a section disagree on an overlap."""


class FrameworkInconsistency(AssertionError):
    pass


class AffineScheme:
    def __init__(self, ring: PresentedRing):
        self.ring = ring
        self._charts: Dict[Poly, LocalizedRing] = {}

    def chart(self, f) -> LocalizedRing:
        f = self.ring._coerce(f)
        if f not in self._charts:
            self._charts[f] = localize(self.ring, f)
        return self._charts[f]

    def open_set(self, elements) -> "OpenSet":
        return OpenSet(self, elements)

    def whole(self) -> "OpenSet":
        return OpenSet(self, [1])

    def __repr__(self):
        return f"Spec({self.ring.describe()})"


class OpenSet:
    """U = D(f_1) u ... u D(f_k)."""

    def __init__(self, X: AffineScheme, elements):
        self.X = X
        seen, fs = set(), []
        for f in elements:
            f = X.ring._coerce(f)
            key = X.ring.element(f)
            if key in seen:
                continue
            seen.add(key)
            fs.append(f)
        self.elements = tuple(fs)
        self._cover = None

    def is_whole(self) -> bool:
        return self.unit_certificate() is not None

    def unit_certificate(self):
        if self._cover is None:
            if not self.elements:
                self._cover = False
            else:
                try:
                    self._cover = is_unit_cover(self.X.ring, self.elements)
                except NotAUnitCover:
                    self._cover = False
        return self._cover or None

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class QCSubsheafPair:
    """L~ inside M~ for L a submodule of M = R^m / N (N = L.relations)."""

    L: Submodule

    @property
    def ring(self) -> PresentedRing:
        return self.L.ring

    @property
    def rank(self) -> int:
        return self.L.rank

    def chart(self, Rf: LocalizedRing) -> Submodule:
        return self.L.transport(canonical_map(self.ring, Rf))

    def relations_at(self, Rf) -> Tuple:
        phi = canonical_map(self.ring, Rf)
        return tuple(phi.vector(v) for v in self.L.relations)


class CoverPresentedSubsheaf:
    """Chart submodules L_i of M_{f_i}; possibly not quasi-coherent as a whole."""

    def __init__(self, X: AffineScheme, cover, charts: Sequence[Submodule], *, validate: bool = True):
        self.X = X
        self.cover = tuple(X.ring._coerce(f) for f in cover)
        if len(charts) != len(self.cover):
            raise ValueError("one chart submodule per cover element")
        self.charts = tuple(charts)
        for f, L in zip(self.cover, self.charts):
            if L.ring != X.chart(f):
                raise ValueError(f"chart data for D({f}) does not live over R_{f}")
        ranks = {L.rank for L in self.charts}
        if len(ranks) > 1:
            raise ValueError("chart submodules have different ranks")
        self.rank = ranks.pop() if ranks else 1
        if validate:
            rep = compatibility_check(self)
            if rep["outcome"] != PASS:
                raise SectionMismatch(f"chart data disagree on overlaps: {rep['failures'][0]}")

    @classmethod
    def from_generators(cls, X: AffineScheme, cover, chart_gens, rank: int = 1, relations=(), validate=True):
        charts = []
        for f, gens in zip(cover, chart_gens):
            Rf = X.chart(f)
            phi = canonical_map(X.ring, Rf)
            rel = tuple(phi.vector(X.ring.vector(v, rank)) for v in relations)
            charts.append(
                Submodule(Rf, rank, tuple(Rf.vector(v, rank) for v in gens), rel)
            )
        return cls(X, cover, charts, validate=validate)

    def chart_for(self, f) -> Submodule:
        f = self.X.ring._coerce(f)
        for g, L in zip(self.cover, self.charts):
            if self.X.ring.equal(f, g):
                return L
        raise KeyError(f"D({f}) is not a chart of this subsheaf")


def _overlap_maps(X: AffineScheme, f, g):
    Rfg, mf, mg, Rf, Rg = chart_overlap(X.ring, f, g)
    return Rfg, mf, mg


def _transport(L: Submodule, phi) -> Submodule:
    return L.transport(phi)


def compatibility_check(sheaf: CoverPresentedSubsheaf) -> dict:
    """Pairwise agreement of chart data on D(f_i f_j), by two-way generator membership."""
    failures = []
    pairs = 0
    X = sheaf.X
    for i in range(len(sheaf.cover)):
        for j in range(i + 1, len(sheaf.cover)):
            pairs += 1
            f, g = sheaf.cover[i], sheaf.cover[j]
            Rfg, mf, mg = _overlap_maps(X, f, g)
            if Rfg.degenerate:
                continue
            A = _transport(sheaf.charts[i], mf)
            B = _transport(sheaf.charts[j], mg)
            for src, P, Q in ((i, A, B), (j, B, A)):
                for v in P.gens:
                    if not Q.contains(v):
                        failures.append(
                            {
                                "pair": [str(f), str(g)],
                                "generator_of": str(sheaf.cover[src]),
                                "generator": [str(c) for c in v],
                                "normal_form": [str(c) for c in Q.normal_form(v)],
                            }
                        )
    return {"check": "compatibility", "outcome": FAIL if failures else PASS, "pairs": pairs, "failures": failures}


@dataclass
class Section:
    """Chart elements z_i in M_{f_i} over U = D(f_1) u ... agreeing on overlaps."""

    U: OpenSet
    elements: Tuple[Tuple[Poly, ...], ...]
    relations: Tuple[Tuple[Poly, ...], ...] = ()
    rank: int = 1
    global_element: Optional[Tuple[Poly, ...]] = None

    def __post_init__(self):
        if len(self.elements) != len(self.U.elements):
            raise ValueError("one chart element per cover element")
        X = self.U.X
        self.elements = tuple(X.chart(f).vector(z, self.rank) for f, z in zip(self.U.elements, self.elements))
        self.relations = tuple(X.ring.vector(v, self.rank) for v in self.relations)
        self._check_overlaps()

    def _check_overlaps(self):
        X = self.U.X
        fs = self.U.elements
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                Rfg, mf, mg = _overlap_maps(X, fs[i], fs[j])
                a = mf.vector(self.elements[i])
                b = mg.vector(self.elements[j])
                phi = canonical_map(X.ring, Rfg)
                Nfg = Submodule(Rfg, self.rank, (), tuple(phi.vector(v) for v in self.relations))
                diff = tuple(x - y for x, y in zip(a, b))
                if not Nfg.contains(diff):
                    raise SectionMismatch(f"section disagrees on D({fs[i]}*{fs[j]})")

    @classmethod
    def from_global(cls, X: AffineScheme, z, cover=(1,), rank: int = 1, relations=()):
        U = OpenSet(X, cover)
        z = X.ring.vector(z, rank)
        els = tuple(canonical_map(X.ring, X.chart(f)).vector(z) for f in U.elements)
        return cls(U, els, tuple(relations), rank, z)


def _aggregate(cl: ClosureOracle, labels, verdicts, extra: dict) -> Verdict:
    charts = [{"f": lab, "verdict": v.to_dict()} for lab, v in zip(labels, verdicts)]
    data = dict(extra, charts=charts)
    for lab, v in zip(labels, verdicts):
        if v.is_not_in:
            return Verdict(NOT_IN, {"kind": "bundle", "parts": _certs([v])}, f"NotIn on chart D({lab})", data=data)
    if any(v.is_unknown for v in verdicts):
        return Verdict(UNKNOWN, None, "some chart verdict is unknown", bound={"charts": charts}, data=data)
    if not cl.glueable_claimed:
        return Verdict(UNKNOWN, None, "In on every chart; oracle does not claim glueability", bound={"charts": charts}, data=data)
    bounded = any(v.bounded for v in verdicts)
    how = "bounded evidence on every chart" if bounded else "In on every chart"
    return Verdict(IN, {"kind": "bundle", "parts": _certs(verdicts)}, how, bounded=bounded, data=data)


def section_in_closure_sheaf(cl: ClosureOracle, sheaf, s: Section) -> Verdict:
    """Cover criterion: s is in the closure sheaf iff every chart element is in the chart closure."""
    X = s.U.X
    labels, jobs = [], []
    for f, z in zip(s.U.elements, s.elements):
        if isinstance(sheaf, QCSubsheafPair):
            Lf = sheaf.chart(X.chart(f))
        elif isinstance(sheaf, CoverPresentedSubsheaf):
            Lf = sheaf.chart_for(f)
        else:
            raise TypeError("sheaf must be a QCSubsheafPair or CoverPresentedSubsheaf")
        labels.append(str(f))
        jobs.append((z, Lf))
    verdicts = parallel_map(lambda job: cl.member(job[0], job[1]), jobs)
    return _aggregate(cl, labels, verdicts, {"cover": labels})


def closure_sections_on_affine(cl: ClosureOracle, pair: QCSubsheafPair, *, check_trivial_cover: bool = True) -> Callable:
    """Membership procedure for global sections of the closure sheaf: the plain oracle on L."""
    X = AffineScheme(pair.ring)

    def member(z) -> Verdict:
        v = cl.member(z, pair.L)
        if check_trivial_cover:
            s = Section.from_global(X, z, (1,), pair.rank, pair.L.relations)
            w = section_in_closure_sheaf(cl, pair, s)
            if v.status != w.status or _witness(v) != _witness(w.data["charts"][0]["verdict"]):
                raise FrameworkInconsistency(f"plain verdict {v.status} but trivial-cover verdict {w.status}")
        return v

    return member


def _witness(v) -> Optional[dict]:
    d = v if isinstance(v, dict) else v.to_dict()
    return (d.get("bound") or {}).get("witness")


def _pool_at(cl: ClosureOracle, L: Submodule, pool_bound: int):
    return cl.pool(L, pool_bound)


def check_quasicoherence(cl: ClosureOracle, pair: QCSubsheafPair, sample_fs, pool_bound: int = 2, kmax: int = 3) -> dict:
    """Compare (L^cl)_f with (L_f)^cl on pool candidates for each sampled f.

    The left side is approximated by L' = L + (pool elements In L^cl) and by
    f^k p In L^cl for k <= kmax; the right side is the oracle over R_f.
    """
    R = pair.ring
    L = pair.L
    pool = _pool_at(cl, L, pool_bound)
    rep = AxiomReport("quasi_coherence", bounds={"pool_bound": pool_bound, "kmax": kmax, "f": [str(f) for f in sample_fs]})
    base = [cl.member(p, L) for p in pool]
    rep.probes += len(pool)
    if any(v.is_unknown for v in base):
        rep.record_unknown("unknown while approximating L^cl on the pool")
    Lcl = L.extend([p for p, v in zip(pool, base) if v.is_in])

    def one(f):
        r = AxiomReport("quasi_coherence", samples=1)
        f = R._coerce(f)
        if R.is_zero(f):
            return r
        Rf = localize(R, f)
        if Rf.degenerate:
            return r
        phi = canonical_map(R, Rf)
        left_mod = Lcl.transport(phi)
        Lf = L.transport(phi)
        for p, bv in zip(pool, base):
            r.probes += 1
            right = cl.member(phi.vector(p), Lf)
            left = left_mod.contains(phi.vector(p))
            if not left:
                power = f
                for k in range(1, kmax + 1):
                    v = cl.member(tuple(power * c for c in p), L)
                    if v.is_in:
                        left = True
                        break
                    power = power * f
            if left and right.is_not_in:
                r.record_fail({"f": str(f), "element": [str(c) for c in p], "direction": "(L^cl)_f not inside (L_f)^cl", "verdict": right.to_dict()})
            elif not left and right.is_in:
                r.record_fail({"f": str(f), "element": [str(c) for c in p], "direction": "(L_f)^cl not inside (L^cl)_f", "verdict": right.to_dict(), "bounded": True})
            elif right.is_unknown:
                r.record_unknown(f"unknown at f={f} on {[str(c) for c in p]}")
        return r

    for r in parallel_map(one, list(sample_fs)):
        rep.merge(r)
    d = rep.to_dict()
    d["evidence"] = "pool-based evidence, not a decision"
    return d


def _closed_on(cl: ClosureOracle, L: Submodule, pool_bound: int) -> Tuple[str, Optional[dict]]:
    """Is L closed on the pool?  Returns (outcome, witness)."""
    unknown = False
    for p in cl.pool(L, pool_bound):
        if L.contains(p):
            continue
        v = cl.member(p, L)
        if v.is_in:
            return FAIL, {"element": [str(c) for c in p], "verdict": v.to_dict()}
        if v.is_unknown:
            unknown = True
    return (INCONCLUSIVE if unknown else PASS), None


def _combine(outcomes) -> str:
    if FAIL in outcomes:
        return FAIL
    if INCONCLUSIVE in outcomes:
        return INCONCLUSIVE
    return PASS


def check_closed_subsheaf(cl: ClosureOracle, pair: QCSubsheafPair, cover, sample_fs, pool_bound: int = 2) -> dict:
    """Evaluate the equivalent closedness conditions: (b) on the cover, (c) on sampled
    affine opens inside the cover charts, (d) at every sampled f including 1."""
    R = pair.ring
    X = AffineScheme(R)
    cover = [R._coerce(f) for f in cover]
    conds = {}

    b_rows = []
    for f in cover:
        out, wit = _closed_on(cl, pair.chart(X.chart(f)), pool_bound)
        b_rows.append({"f": str(f), "outcome": out, "witness": wit})
    qc = check_quasicoherence(cl, pair, sample_fs or [1], pool_bound)
    b = _combine([r["outcome"] for r in b_rows] + [qc["outcome"]])
    conds["b"] = {"outcome": b, "charts": b_rows, "quasi_coherence": qc["outcome"]}

    c_rows = []
    for f in cover:
        for g in sample_fs:
            h = f * R._coerce(g)
            if R.is_zero(h):
                continue
            Rh = X.chart(h)
            if Rh.degenerate:
                continue
            out, wit = _closed_on(cl, pair.chart(Rh), pool_bound)
            c_rows.append({"f": str(h), "outcome": out, "witness": wit})
    conds["c"] = {"outcome": _combine([r["outcome"] for r in c_rows]), "charts": c_rows}

    d_rows = []
    fs = [R.ambient.one()] + [R._coerce(g) for g in sample_fs]
    for f in fs:
        if R.is_zero(f):
            continue
        Lf = pair.L if f.is_constant() else pair.chart(X.chart(f))
        out, wit = _closed_on(cl, Lf, pool_bound)
        d_rows.append({"f": str(f), "outcome": out, "witness": wit})
    conds["d"] = {"outcome": _combine([r["outcome"] for r in d_rows]), "charts": d_rows}

    decided = {conds[k]["outcome"] for k in "bcd"} - {INCONCLUSIVE}
    inconsistent = len(decided) > 1
    return {
        "check": "closed_subsheaf",
        "conditions": conds,
        "inconsistent": inconsistent,
        "note": "conditions disagree: framework bug for a glueable oracle" if inconsistent and cl.glueable_claimed else None,
        "bounds": {"pool_bound": pool_bound},
    }


@dataclass
class ProbeResult:
    status: str  # "NotSemiFRegular" or "NoCounterexampleFound"
    witness: Optional[dict] = None
    bounds: dict = field(default_factory=dict)
    searched: int = 0

    def to_dict(self) -> dict:
        d = {"status": self.status, "bounds": self.bounds, "searched": self.searched}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


NOT_SEMI_F_REGULAR = "NotSemiFRegular"
NO_COUNTEREXAMPLE = "NoCounterexampleFound"


def semi_freg_probe(X: AffineScheme, ideal_samples, f_samples=(), *, degree_bound: int = 3, q_max: Optional[int] = None) -> ProbeResult:
    """Look for f and an ideal I with I_f not tightly closed in R_f (via Frobenius closure)."""
    R = X.ring
    p = R.characteristic
    if not p:
        raise PreconditionError("semi-F-regularity probes need positive characteristic")
    q_max = q_max or p**3
    fs = [R.ambient.one()] + [R._coerce(f) for f in f_samples if not R.ambient.one() == R._coerce(f)]
    bounds = {
        "degree_bound": degree_bound,
        "q_max": q_max,
        "f": [str(f) for f in fs],
        "ideals": [[str(R._coerce(g)) for g in I] for I in ideal_samples],
    }
    searched = 0
    for f in fs:
        if R.is_zero(f):
            continue
        if f.is_constant():
            S, phi = R, None
        else:
            S = X.chart(f)
            if S.degenerate:
                continue
            phi = canonical_map(R, S)
        for I in ideal_samples:
            gens = [R._coerce(g) for g in I]
            If = Submodule(S, 1, tuple(((phi(g) if phi else g),) for g in gens))
            searched += 1
            hit = tc_nonclosed_certificate(If, degree_bound, q_max)
            if hit is not None:
                z, q, cert = hit
                C.recheck(cert)
                w = {"f": str(f), "ideal": [str(g) for g in gens], "z": str(z), "q": q, "certificate": cert}
                return ProbeResult(NOT_SEMI_F_REGULAR, w, bounds, searched)
    return ProbeResult(NO_COUNTEREXAMPLE, None, bounds, searched)


def semi_freg_cover_probe(X: AffineScheme, cover, ideal_samples, f_samples=(), **bounds) -> dict:
    """Probe X and each chart D(f_i) of an affine cover; aggregate by chart index."""
    R = X.ring
    glob = semi_freg_probe(X, ideal_samples, f_samples, **bounds)
    charts = []
    for f in cover:
        f = R._coerce(f)
        S = X.chart(f)
        if S.degenerate:
            continue
        phi = canonical_map(R, S)
        Y = AffineScheme(S)
        ideals = [[phi(R._coerce(g)) for g in I] for I in ideal_samples]
        res = semi_freg_probe(Y, ideals, [phi(R._coerce(g)) for g in f_samples], **bounds)
        charts.append({"f": str(f), "result": res.to_dict()})
    chart_hit = any(c["result"]["status"] == NOT_SEMI_F_REGULAR for c in charts)
    glob_hit = glob.status == NOT_SEMI_F_REGULAR
    return {
        "global": glob.to_dict(),
        "charts": charts,
        "agree": chart_hit == glob_hit,
        "status": NOT_SEMI_F_REGULAR if (chart_hit or glob_hit) else NO_COUNTEREXAMPLE,
    }
