"""Trisecant census through a chosen surface point: bucket the linear
projections of plane-point images from Phi(q) over a ladder of finite fields,
classify the collisions into proper/improper trisecant lines and quadrisecant
alerts, and probe for an excess (1-parameter family) of trisecants.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import _kernels as kernels
from .fields import GF, FiniteField, Scalar
from .linsys import is_associated_pair
from .plane import (
    CurveForm,
    PointScheme,
    ProjPoint,
    evaluate,
    evaluate_forms_at_points,
    point_from_code,
    plane_point_count,
    _exponent_array,
)
from .surface import (
    ContractedLine,
    SurfaceEmbedding,
    WhiteConfig,
    contracted_lines,
    embedding,
    gen_polygonal,
    gen_random_config,
    gen_segre,
    multisecant_lines,
)

DEFAULT_BUDGET = 20_000_000
K3_PRIME_CAP = 7


class BudgetError(RuntimeError):
    """The requested ladder exceeds the evaluation budget."""


class GenericityError(RuntimeError):
    """The chosen q fails a genericity precondition."""


@dataclass(frozen=True)
class AssociatedPair:
    a: ProjPoint
    b: ProjPoint
    field: FiniteField
    proper: bool = True

    def sorted_points(self) -> tuple[ProjPoint, ProjPoint]:
        return tuple(sorted((self.a, self.b), key=lambda p: p.code()))


@dataclass(frozen=True)
class LineRecord:
    """One trisecant line, deduplicated across the extension ladder."""

    identity: tuple            # (field tag, projected P^4 coordinates)
    kind: str                  # proper | improper | quadrisecant | unclassified
    ext_degree: int            # smallest ladder degree at which it appeared
    bucket_size: int
    members: tuple[ProjPoint, ...]
    images: tuple[tuple[Scalar, ...], ...]
    pair: AssociatedPair | None = None
    contracted_index: int | None = None


@dataclass(frozen=True)
class CensusReport:
    config_id: str
    p: int
    maxext: int
    q: ProjPoint
    counts: dict
    lines: tuple[LineRecord, ...]
    per_degree: dict

    def proper_pairs(self) -> tuple[AssociatedPair, ...]:
        return tuple(l.pair for l in self.lines if l.kind == "proper")

    @property
    def distinct_lines(self) -> int:
        return self.counts["proper"] + self.counts["improper"]

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": "census-report",
            "config_id": self.config_id,
            "field": {"char": self.p, "deg": 1},
            "q": [int(c) for c in self.q.coords],
            "ladder": list(range(1, self.maxext + 1)),
            "counts": dict(self.counts),
            "per_degree": {str(k): dict(v) for k, v in self.per_degree.items()},
            "lines": [
                {
                    "kind": l.kind,
                    "ext_degree": l.ext_degree,
                    "key_field_deg": l.identity[0],
                    "projection": [int(c) for c in l.identity[1]],
                    "bucket_size": l.bucket_size,
                    "members": [[int(c) for c in m.coords] for m in l.members],
                }
                for l in self.lines
            ],
        }


def config_digest(cfg: WhiteConfig) -> str:
    blob = repr((cfg.field.p, cfg.field.k,
                 tuple(tuple(int(c) for c in p.coords) for p in cfg.points)))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _canonical_image(F: FiniteField, vals: Sequence[int]) -> tuple[int, ...] | None:
    lead = next((v for v in vals if v != 0), None)
    if lead is None:
        return None
    if lead == 1:
        return tuple(int(v) for v in vals)
    s = F.inv(int(lead))
    return tuple(F.mul(s, int(v)) for v in vals)


def project_from_q(emb: SurfaceEmbedding, q: ProjPoint,
                   a: ProjPoint) -> tuple[Scalar, ...] | str:
    """Image of Phi(a) under linear projection from Phi(q), canonicalized;
    the distinguished value "at-center" when Phi(a) is proportional to Phi(q)."""
    F = a.field
    if emb.config.scheme.lift(F).contains_point(a):
        raise ValueError("a is a base point; its image is undefined")
    va = emb.phi(a)
    if va is None:
        raise ValueError("a is a base point; its image is undefined")
    phiq = emb.phi(q.lift(F) if q.field != F else q)
    if phiq is None:
        raise GenericityError("Phi(q) undefined")
    c = next(i for i, v in enumerate(phiq) if v != F.zero)
    w = [F.sub(v, F.mul(va[c], pv)) for v, pv in zip(va, phiq)]
    w5 = [w[i] for i in range(6) if i != c]
    img = _canonical_image(F, w5)
    if img is None:
        return "at-center"
    return img


def pick_generic_q(emb: SurfaceEmbedding, rng: random.Random,
                   tries: int = 500) -> ProjPoint:
    """Random rational point passing the census genericity preconditions.

    Besides the contracted (>=5-point) lines, q must avoid 4-secant lines
    of the configuration: those map to lines lying on the surface, and a
    center on such a line sees the whole line collapse in the projection.
    """
    F = emb.field
    cls = contracted_lines(emb.config, emb)
    fourfold = {cl.image for cl in cls}
    multis = multisecant_lines(emb.config, at_least=4)
    for _ in range(tries):
        q = point_from_code(F, rng.randrange(plane_point_count(F)))
        if emb.config.scheme.contains_point(q):
            continue
        if any(evaluate(L, q) == F.zero for L in multis):
            continue
        phiq = emb.phi(q)
        if phiq is None or phiq in fourfold:
            continue
        return q
    raise GenericityError(f"no generic q found in {tries} draws")


def check_budget(p: int, maxext: int, budget: int = DEFAULT_BUDGET) -> None:
    for k in range(1, maxext + 1):
        if p ** (2 * k) > budget:
            raise BudgetError(
                f"plane over GF({p}^{k}) has ~{p**(2*k)} points > budget {budget}")
        if k == 3 and p > K3_PRIME_CAP:
            raise BudgetError(f"cubic extensions are capped at p <= {K3_PRIME_CAP}")


def _decode_key(key: int, q: int, nf: int = 6) -> tuple[int, ...]:
    """Projected P^{nf-2} point (canonical coordinates) from a packed key."""
    lead_w = q ** (nf - 2)
    f = key // lead_w
    rem = key % lead_w
    slots = []
    for t in range(nf - 2):
        w = q ** (nf - 3 - t)
        slots.append(rem // w)
        rem %= w
    coords = [0] * f + [1] + slots
    return tuple(coords[: nf - 1])


def _line_identity(p: int, k: int, coords: tuple[int, ...]) -> tuple:
    tag = 1 if all(c < p for c in coords) else k
    return (tag, coords)


def census(emb: SurfaceEmbedding, q: ProjPoint, p: int | None = None,
           maxext: int = 1, budget: int = DEFAULT_BUDGET) -> CensusReport:
    """Enumerate all plane points over F_{p^k} for k <= maxext, bucket them by
    the projection of their image from Phi(q), classify every bucket of size
    >= 2, and deduplicate lines across the ladder."""
    cfg = emb.config
    F = cfg.field
    if F.k != 1:
        raise ValueError("census configurations must live over a prime field")
    if p is None:
        p = F.p
    if p != F.p:
        raise ValueError(f"census prime {p} differs from the config field F_{F.p}")
    check_budget(p, maxext, budget)

    cls = contracted_lines(cfg, emb)
    fourfold = {cl.image: i for i, cl in enumerate(cls)}
    if cfg.scheme.contains_point(q):
        raise GenericityError("q is a base point")
    phiq = emb.phi(q)
    if phiq is None:
        raise GenericityError("Phi(q) undefined")
    if phiq in fourfold:
        raise GenericityError("Phi(q) is a singular 4-fold point")
    if any(evaluate(cl.line, q) == F.zero for cl in cls):
        raise GenericityError("q lies on a contracted line")

    exps = _exponent_array(5)
    records: dict[tuple, LineRecord] = {}
    per_degree: dict[int, dict] = {}
    phiq_arr = np.array([int(v) for v in phiq], dtype=np.int64)

    for k in range(1, maxext + 1):
        Fk = GF(p, k)
        coeffs = np.stack([f.coeff_array() for f in emb.basis])
        keys = kernels.plane_project_keys(coeffs, exps, phiq_arr, Fk.tables)
        base_hits = int((keys == kernels.SENTINEL_ZERO_IMAGE).sum())
        at_center = int((keys == kernels.SENTINEL_AT_CENTER).sum())
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        start = int(np.searchsorted(sorted_keys, 0, side="left"))
        buckets = 0
        contracted_hits = 0
        i = start
        n = sorted_keys.shape[0]
        while i < n:
            j = i + 1
            while j < n and sorted_keys[j] == sorted_keys[i]:
                j += 1
            if j - i >= 2:
                buckets += 1
                key = int(sorted_keys[i])
                members = tuple(point_from_code(Fk, int(c))
                                for c in sorted(order[i:j]))
                rec = _classify_bucket(emb, q, Fk, key, members, cls, fourfold)
                if rec.kind == "improper":
                    contracted_hits += rec.bucket_size
                # k runs upward, so the first occurrence is the defining one
                records.setdefault(rec.identity, rec)
            i = j
        per_degree[k] = {
            "plane_points": int(kernels.plane_size(Fk.q)),
            "buckets": buckets,
            "base_hits": base_hits,
            "at_center": at_center,
            "contracted_hits": contracted_hits,
        }

    lines = tuple(sorted(records.values(), key=lambda r: (r.ext_degree,
                                                          r.identity)))
    counts = {
        "proper": sum(1 for r in lines if r.kind == "proper"),
        "improper": sum(1 for r in lines if r.kind == "improper"),
        "quadrisecant_alerts": sum(1 for r in lines if r.kind == "quadrisecant"),
        "surface_lines": sum(1 for r in lines if r.kind == "surface_line"),
        "unclassified": sum(1 for r in lines if r.kind == "unclassified"),
        "contracted_hits": sum(v["contracted_hits"] for v in per_degree.values()),
        "base_hits_per_degree": [per_degree[k]["base_hits"]
                                 for k in sorted(per_degree)],
    }
    return CensusReport(config_digest(cfg), p, maxext, q, counts, lines,
                        per_degree)


def _classify_bucket(emb: SurfaceEmbedding, q: ProjPoint, Fk: FiniteField,
                     key: int, members: tuple[ProjPoint, ...],
                     cls: tuple[ContractedLine, ...],
                     fourfold: dict) -> LineRecord:
    vals = evaluate_forms_at_points(emb.basis, members, Fk)
    images = []
    for col in range(vals.shape[1]):
        img = _canonical_image(Fk, vals[:, col])
        images.append(img)
    distinct = {img for img in images if img is not None}
    coords = _decode_key(key, Fk.q)
    identity = _line_identity(Fk.p, Fk.k, coords)
    kind = "unclassified"
    pair = None
    contracted_index = None
    if len(distinct) >= 3:
        # a genuine quadrisecant bucket holds exactly 3 surface points; a
        # whole line lying on the surface collapses to ~q collinear images
        kind = "quadrisecant" if len(distinct) <= 4 else "surface_line"
    elif len(distinct) == 1:
        img = next(iter(distinct))
        idx = fourfold.get(img)
        if idx is not None:
            lf = cls[idx].line.lift(Fk)
            if all(evaluate(lf, m) == Fk.zero for m in members):
                kind = "improper"
                contracted_index = idx
    elif len(distinct) == 2 and len(members) == 2:
        a, b = members
        P = emb.config.scheme.lift(Fk)
        qf = q.lift(Fk)
        if is_associated_pair(P, qf, a, b):
            kind = "proper"
            fdeg = 1 if all(c < Fk.p for c in a.coords + b.coords) else Fk.k
            pair = AssociatedPair(a, b, GF(Fk.p, fdeg))
    return LineRecord(identity, kind, Fk.k, len(members), members,
                      tuple(images), pair, contracted_index)


# ---------------------------------------------------------------------------
# excess probing


@dataclass(frozen=True)
class ProbeRow:
    p: int
    proper_counts: tuple[int, ...]
    totals: tuple[int, ...]

    @property
    def mean_proper(self) -> float:
        return sum(self.proper_counts) / len(self.proper_counts)

    @property
    def max_total(self) -> int:
        return max(self.totals)


@dataclass(frozen=True)
class ProbeReport:
    verdict: str  # excess | finite | indeterminate
    rows: tuple[ProbeRow, ...]
    kind: str

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": "excess-probe",
            "config_kind": self.kind,
            "verdict": self.verdict,
            "rows": [
                {"p": r.p, "proper": list(r.proper_counts),
                 "totals": list(r.totals), "mean_proper": r.mean_proper}
                for r in self.rows
            ],
        }


class ProbeRegenerationError(RuntimeError):
    pass


def _regenerate(cfg: WhiteConfig, p: int) -> WhiteConfig:
    prov = cfg.provenance
    F = GF(p)
    if prov.kind == "random":
        return gen_random_config(prov.seed, F)
    if prov.kind == "polygonal":
        return gen_polygonal(prov.seed, F)
    if prov.kind == "segre":
        params = [t % p for t in prov.segre_params]
        if len(set(params)) != 6:
            raise ProbeRegenerationError(f"tangency parameters collide mod {p}")
        return gen_segre(params, F)
    raise ValueError(f"unknown provenance {prov.kind}")


def excess_probe(cfg: WhiteConfig, primes: Sequence[int], trials: int = 3,
                 seed: int = 0, budget: int = DEFAULT_BUDGET) -> ProbeReport:
    """Censuses at several random q per prime; verdict `excess` when mean
    proper-line counts grow at least half-proportionally to p, `finite` when
    every census stays within the 6-line bound, else `indeterminate`."""
    primes = sorted(primes)
    if len(primes) < 2:
        raise ValueError("need at least 2 probe primes")
    rows = []
    for p in primes:
        check_budget(p, 1, budget)
        c = _regenerate(cfg, p)
        emb = embedding(c)
        propers, totals = [], []
        for j in range(trials):
            rng = random.Random((seed * 1_000_003 + p) * 97 + j)
            qpt = pick_generic_q(emb, rng)
            rep = census(emb, qpt, p, maxext=1, budget=budget)
            propers.append(rep.counts["proper"])
            totals.append(rep.distinct_lines)
        rows.append(ProbeRow(p, tuple(propers), tuple(totals)))

    growth = all(
        r2.mean_proper >= 0.5 * (r2.p / r1.p) * r1.mean_proper
        for r1, r2 in zip(rows, rows[1:]))
    bounded = all(t <= 6 for r in rows for t in r.totals)
    if growth and rows[-1].mean_proper > 6:
        verdict = "excess"
    elif bounded:
        verdict = "finite"
    else:
        verdict = "indeterminate"
    return ProbeReport(verdict, tuple(rows), cfg.provenance.kind)
