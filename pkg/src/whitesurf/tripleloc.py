"""Projection of the quintic surface from a trisecant line: the P^3 model cut
out by the quintics through the 18-point cycle P+q+{a,b}, the degree-9 curve
double at all 18 points (the plane model of the triple locus), its 9-line
factorization on Segre configurations, and the twisted-cubic image check.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

from .fields import FiniteField, GF, Matrix, Scalar, kernel_basis, rank
from .linsys import Failure, linear_system
from .plane import (
    CurveForm,
    PointScheme,
    ProjPoint,
    eval_matrix,
    evaluate,
    line_through,
    points_on_curve,
    product_of,
)
from .surface import WhiteConfig
from .trisec import AssociatedPair


class ModelError(ValueError):
    """The (q, pair) data does not cut out a 4-dimensional quintic system."""


@dataclass(frozen=True)
class ProjectionModel:
    scheme: PointScheme                  # the 18 simple points
    basis4: tuple[CurveForm, ...]        # canonical quintics through them

    @property
    def field(self):
        return self.scheme.field


def projection_model(P: PointScheme, q: ProjPoint,
                     pair: AssociatedPair | tuple[ProjPoint, ProjPoint]) -> ProjectionModel:
    """The P^3 model |I_{P+q+pair}(5)|; errors unless h0 = 4."""
    a, b = pair.sorted_points() if isinstance(pair, AssociatedPair) else pair
    F = a.field
    Pf = P.lift(F) if P.field != F else P
    qf = q.lift(F) if q.field != F else q
    Z = Pf.plus(qf, a, b)
    sys5 = linear_system(Z, 5)
    if sys5.h0 != 4:
        raise ModelError(f"h0 of the quintics through the 18 points is "
                         f"{sys5.h0}, not 4 (pair not associated or degenerate)")
    return ProjectionModel(Z, sys5.basis)


def triple_curve(model: ProjectionModel) -> CurveForm | Failure:
    """The unique degree-9 curve double at the 18 points, when the 54x55
    double-point system has a 1-dimensional kernel."""
    Z2 = model.scheme.with_multiplicity(2)
    basis = kernel_basis(eval_matrix(Z2, 9))
    if len(basis) != 1:
        return Failure("double-point system kernel is not a line",
                       {"dimension": len(basis)})
    gamma = CurveForm.make(model.field, 9, basis[0])
    M = eval_matrix(Z2, 9)
    F = model.field
    for row in M.entries:
        acc = F.zero
        for c, g in zip(row, gamma.coeffs):
            acc = F.add(acc, F.mul(c, g))
        assert acc == F.zero, "triple curve fails its double-point conditions"
    return gamma


def segre_factor_check(gamma: CurveForm, cfg: WhiteConfig, q: ProjPoint,
                       pair: AssociatedPair | tuple[ProjPoint, ProjPoint]) -> bool:
    """True iff gamma equals the product of the 6 polygon lines with the 3
    lines joining q, a, b (exact canonical-coefficient comparison)."""
    if cfg.provenance.kind != "segre" or cfg.provenance.lines is None:
        raise ValueError("factor check needs a Segre-provenance configuration")
    a, b = pair.sorted_points() if isinstance(pair, AssociatedPair) else pair
    F = gamma.field
    parts = [l.lift(F) if l.field != F else l for l in cfg.provenance.lines]
    qf = q.lift(F) if q.field != F else q
    af = a.lift(F) if a.field != F else a
    bf = b.lift(F) if b.field != F else b
    parts += [line_through(qf, af), line_through(qf, bf), line_through(af, bf)]
    return product_of(parts).coeffs == gamma.coeffs


@dataclass(frozen=True)
class TwistedCubicReport:
    field: FiniteField
    n_samples: int
    n_images: int
    quadric_dim: int            # dim of degree-2 forms in P^3 through the images
    linear_vanishing_dim: int   # 0 iff the images span P^3
    fiber_sizes: tuple[int, ...]
    holds: bool                 # quadric_dim == 3, the net of a twisted cubic


class SamplingError(RuntimeError):
    """Not enough rational sample points on the curve over the ladder."""


_QUAD_MONOS = tuple(combinations_with_replacement(range(4), 2))


def _p3_image(model: ProjectionModel, pt: ProjPoint) -> tuple[Scalar, ...] | None:
    F = pt.field
    vals = [evaluate(f.lift(F) if f.field != F else f, pt)
            for f in model.basis4]
    lead = next((v for v in vals if v != F.zero), None)
    if lead is None:
        return None
    if lead != F.one:
        s = F.inv(lead)
        vals = [F.mul(s, v) for v in vals]
    return tuple(vals)


def twisted_cubic_check(model: ProjectionModel, gamma: CurveForm,
                        ladder: tuple[int, ...] = (1, 2),
                        min_samples: int = 10,
                        sample_cap: int = 48) -> TwistedCubicReport:
    """Sample rational points of gamma away from the 18 base points, map them
    to P^3 by the model, and measure the space of quadrics through the images.

    For points on a twisted cubic the quadrics form a net (dimension 3), any
    >= 7 of its points force exactly that net; higher values flag degenerate
    sampling and the next ladder field is tried.
    """
    base = model.field
    for k in ladder:
        F = GF(base.p, k) if base.k == 1 else base
        zs = {p.coords for p in model.scheme.lift(F).points}
        pts = []
        for pt in points_on_curve(gamma, F):
            if pt.coords in zs:
                continue
            pts.append(pt)
            if len(pts) >= sample_cap:
                break
        if len(pts) < min_samples:
            continue
        fibers: dict[tuple, int] = {}
        images = []
        for pt in pts:
            img = _p3_image(model, pt)
            if img is None:
                continue
            if img not in fibers:
                images.append(img)
            fibers[img] = fibers.get(img, 0) + 1
        if len(images) < 7:
            continue
        rows = [[F.mul(img[i], img[j]) for (i, j) in _QUAD_MONOS]
                for img in images]
        qrank = rank(Matrix.build(F, rows))
        lrank = rank(Matrix.build(F, [list(img) for img in images]))
        return TwistedCubicReport(
            field=F,
            n_samples=len(pts),
            n_images=len(images),
            quadric_dim=10 - qrank,
            linear_vanishing_dim=4 - lrank,
            fiber_sizes=tuple(sorted(fibers.values(), reverse=True)),
            holds=(10 - qrank) == 3,
        )
    raise SamplingError("too few rational points on the curve over the ladder")
