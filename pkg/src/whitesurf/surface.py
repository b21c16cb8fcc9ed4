"""White, polygonal and Segre point configurations, the quintic embedding of
the plane into P^5, contracted-line detection, and divisor arithmetic on the
Picard lattice of the blown-up plane.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Literal, Sequence

from .fields import FieldError, FiniteField, Scalar
from .linsys import h0, linear_system
from .plane import (
    CurveForm,
    PointScheme,
    ProjPoint,
    conic_xz_y2,
    evaluate,
    line_through,
    plane_point_count,
    point_from_code,
    tangent_line_to_conic,
)


class GenerationError(RuntimeError):
    """Resample budget exhausted while drawing a valid configuration."""


@dataclass(frozen=True)
class Provenance:
    kind: Literal["random", "polygonal", "segre"]
    seed: int | None = None
    lines: tuple[CurveForm, ...] | None = None
    segre_params: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.lines is not None:
            out["lines"] = [[int(c) for c in l.coeffs] for l in self.lines]
        if self.segre_params is not None:
            out["params"] = list(self.segre_params)
        return out


@dataclass(frozen=True)
class WhiteConfig:
    """15 distinct plane points lying on no quartic."""

    field: FiniteField
    points: tuple[ProjPoint, ...]
    provenance: Provenance

    @property
    def scheme(self) -> PointScheme:
        return PointScheme.of(self.points)

    def config_points_sorted(self) -> tuple[ProjPoint, ...]:
        return tuple(sorted(self.points, key=lambda p: p.code()))


def verify_white(points: Sequence[ProjPoint]) -> bool:
    """The defining condition: 15 distinct points, no quartic through them."""
    if len(points) != 15 or len({p.coords for p in points}) != 15:
        return False
    return h0(PointScheme.of(points), 4) == 0


def _aligned_five(points: Sequence[ProjPoint]) -> bool:
    for quint in combinations(points, 5):
        L = line_through(quint[0], quint[1])
        if all(evaluate(L, p) == quint[0].field.zero for p in quint[2:]):
            return True
    return False


def _random_point(F: FiniteField, rng: random.Random) -> ProjPoint:
    return point_from_code(F, rng.randrange(plane_point_count(F)))


def gen_random_config(seed: int, F: FiniteField, *, allow_aligned: bool = False,
                      tries: int = 200) -> WhiteConfig:
    """Seeded 15-point configuration, resampled until no quartic passes
    through it and (by default) no 5 points are aligned."""
    if not F.is_finite:
        raise FieldError("configurations live over finite fields")
    rng = random.Random(seed)
    for _ in range(tries):
        pts: set[ProjPoint] = set()
        while len(pts) < 15:
            pts.add(_random_point(F, rng))
        points = tuple(sorted(pts, key=lambda p: p.code()))
        if not verify_white(points):
            continue
        if not allow_aligned and _aligned_five(points):
            continue
        return WhiteConfig(F, points, Provenance("random", seed=seed))
    raise GenerationError(f"no valid random configuration after {tries} tries")


def _random_line(F: FiniteField, rng: random.Random) -> CurveForm:
    while True:
        coeffs = [F.random_element(rng) for _ in range(3)]
        if any(c != F.zero for c in coeffs):
            return CurveForm.make(F, 1, coeffs)


def _meet(l1: CurveForm, l2: CurveForm) -> ProjPoint | None:
    F = l1.field
    a, b, c = l1.coeffs
    d, e, f = l2.coeffs
    x = F.sub(F.mul(b, f), F.mul(c, e))
    y = F.sub(F.mul(c, d), F.mul(a, f))
    z = F.sub(F.mul(a, e), F.mul(b, d))
    if x == F.zero and y == F.zero and z == F.zero:
        return None
    return ProjPoint.make(F, (x, y, z))


def points_of_line_arrangement(lines: Sequence[CurveForm]) -> list[ProjPoint] | None:
    """The pairwise intersection points, or None when the arrangement is
    degenerate (coincident lines or three concurrent ones)."""
    pts = []
    for l1, l2 in combinations(lines, 2):
        p = _meet(l1, l2)
        if p is None:
            return None
        pts.append(p)
    if len({p.coords for p in pts}) != len(pts):
        return None
    return pts


def gen_polygonal(seed: int, F: FiniteField, *, tries: int = 200) -> WhiteConfig:
    """6 general lines; the 15 pairwise intersections, no-quartic re-verified."""
    if F.characteristic == 2:
        raise FieldError("polygonal construction needs characteristic != 2")
    rng = random.Random(seed)
    for _ in range(tries):
        lines = tuple(sorted((_random_line(F, rng) for _ in range(6)),
                             key=lambda l: l.coeffs))
        if len({l.coeffs for l in lines}) != 6:
            continue
        pts = points_of_line_arrangement(lines)
        if pts is None:
            continue
        points = tuple(sorted(pts, key=lambda p: p.code()))
        if not verify_white(points):
            continue
        return WhiteConfig(F, points, Provenance("polygonal", seed=seed,
                                                 lines=lines))
    raise GenerationError(f"no valid polygonal configuration after {tries} tries")


def gen_segre(params: Sequence[Scalar], F: FiniteField) -> WhiteConfig:
    """The 15 points (2 : t_i + t_j : 2 t_i t_j) cut out by 6 distinct
    tangent lines of the conic xz = y^2."""
    if F.characteristic == 2:
        raise FieldError("tangent construction needs characteristic != 2")
    ts = [F.coerce(t) for t in params]
    if len(ts) != 6 or len(set(ts)) != 6:
        raise ValueError("need 6 distinct tangency parameters")
    two = F.from_int(2)
    pts = []
    for ti, tj in combinations(ts, 2):
        pts.append(ProjPoint.make(F, (two, F.add(ti, tj),
                                      F.mul(two, F.mul(ti, tj)))))
    points = tuple(sorted(pts, key=lambda p: p.code()))
    if not verify_white(points):
        raise GenerationError("tangency parameters violate the no-quartic condition")
    lines = tuple(sorted((tangent_line_to_conic(t, F) for t in ts),
                         key=lambda l: l.coeffs))
    return WhiteConfig(F, points, Provenance(
        "segre", segre_params=tuple(int(t) for t in ts), lines=lines))


def random_segre_params(seed: int, F: FiniteField, *, tries: int = 200) -> tuple[int, ...]:
    """Seeded draw of 6 distinct parameters giving a valid Segre config."""
    rng = random.Random(seed)
    for _ in range(tries):
        ts = rng.sample(range(F.q), 6)
        try:
            gen_segre(ts, F)
        except GenerationError:
            continue
        return tuple(ts)
    raise GenerationError(f"no valid tangency parameters after {tries} tries")


# ---------------------------------------------------------------------------
# the embedding


@dataclass(frozen=True)
class SurfaceEmbedding:
    """The map a -> (f_0(a), ..., f_5(a)) given by the canonical basis of the
    quintics through the 15 base points."""

    config: WhiteConfig
    basis: tuple[CurveForm, ...]

    @property
    def field(self) -> FiniteField:
        return self.config.field

    def phi(self, a: ProjPoint) -> tuple[Scalar, ...] | None:
        """Canonical P^5 image of a, or None for a base point of the system."""
        F = a.field
        vals = [evaluate(f.lift(F) if f.field != F else f, a)
                for f in self.basis]
        lead = next((v for v in vals if v != F.zero), None)
        if lead is None:
            return None
        if lead != F.one:
            s = F.inv(lead)
            vals = [F.mul(s, v) for v in vals]
        return tuple(vals)


def embedding(cfg: WhiteConfig) -> SurfaceEmbedding:
    sys5 = linear_system(cfg.scheme, 5)
    if sys5.h0 != 6:
        raise GenerationError(
            f"h0 of the quintics through the base points is {sys5.h0}, not 6")
    return SurfaceEmbedding(cfg, sys5.basis)


@dataclass(frozen=True)
class ContractedLine:
    line: CurveForm
    base_points: tuple[ProjPoint, ...]
    image: tuple[Scalar, ...]  # the 4-fold point


def multisecant_lines(cfg: WhiteConfig, at_least: int = 4) -> tuple[CurveForm, ...]:
    """Lines through >= at_least of the 15 points.  A 4-secant line has
    image degree 5-4 = 1, i.e. it maps to a line lying on the surface."""
    F = cfg.field
    seen = {}
    for a, b in combinations(cfg.points, 2):
        L = line_through(a, b)
        if L.coeffs in seen:
            continue
        on = sum(1 for p in cfg.points if evaluate(L, p) == F.zero)
        if on >= at_least:
            seen[L.coeffs] = L
    return tuple(seen[c] for c in sorted(seen))


def contracted_lines(cfg: WhiteConfig,
                     emb: SurfaceEmbedding | None = None) -> tuple[ContractedLine, ...]:
    """Lines through >= 5 of the 15 points, with their common image point."""
    emb = emb or embedding(cfg)
    F = cfg.field
    seen: dict[tuple, list[ProjPoint]] = {}
    for a, b in combinations(cfg.points, 2):
        L = line_through(a, b)
        if L.coeffs in seen:
            continue
        on = [p for p in cfg.points if evaluate(L, p) == F.zero]
        if len(on) >= 5:
            seen[L.coeffs] = on
    out = []
    for coeffs in sorted(seen):
        L = CurveForm.make(F, 1, coeffs)
        on = seen[coeffs]
        off_base = next(p for p in points_on_curve_line(L, F)
                        if not cfg.scheme.contains_point(p))
        image = emb.phi(off_base)
        assert image is not None
        out.append(ContractedLine(L, tuple(on), image))
    return tuple(out)


def points_on_curve_line(L: CurveForm, F: FiniteField):
    from .plane import points_on_curve

    return points_on_curve(L, F)


# ---------------------------------------------------------------------------
# Picard-lattice divisor arithmetic


@dataclass(frozen=True)
class DivisorClass:
    """a*L - sum(m_i * E_i) on the plane blown up at len(m) points."""

    a: int
    m: tuple[int, ...]

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.a + other.a,
                            tuple(x + y for x, y in zip(self.m, other.m)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.a - other.a,
                            tuple(x - y for x, y in zip(self.m, other.m)))

    def scale(self, c: int) -> "DivisorClass":
        return DivisorClass(c * self.a, tuple(c * x for x in self.m))

    def _check(self, other: "DivisorClass"):
        if len(self.m) != len(other.m):
            raise ValueError("exceptional-vector length mismatch")

    def __repr__(self):
        return f"{self.a}L - {self.m}.E"


def hyperplane_class(n: int, degree: int = 5,
                     marked: int | None = None) -> DivisorClass:
    """degree*L - sum of the first `marked` exceptional classes (all by default)."""
    marked = n if marked is None else marked
    return DivisorClass(degree, tuple(1 if i < marked else 0 for i in range(n)))


def canonical_class(n: int) -> DivisorClass:
    return DivisorClass(-3, tuple(-1 for _ in range(n)))


def pairing(D1: DivisorClass, D2: DivisorClass) -> int:
    """Intersection number a1*a2 - sum m1_i*m2_i."""
    D1._check(D2)
    return D1.a * D2.a - sum(x * y for x, y in zip(D1.m, D2.m))


def adjunction_genus(D: DivisorClass) -> int:
    """1 + (D.D + D.K)/2 with K = -3L + sum(E_i)."""
    K = canonical_class(len(D.m))
    s = pairing(D, D) + pairing(D, K)
    if s % 2:
        raise ValueError("odd parity: malformed divisor class")
    return 1 + s // 2


def double_locus_class(deg_x: int, delta: int, H: DivisorClass) -> DivisorClass:
    """Formal class (deg_x - 4 - delta)*H - K of the double locus of a
    projection whose center cuts the surface in a length-delta scheme."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return H.scale(deg_x - 4 - delta) - canonical_class(len(H.m))
