"""Linear systems |I_Z(d)| of plane curves through a point scheme:
dimension counts, irregularity, residual cycles and the duality check,
residuation witnesses, the unique cubic through a residual 9-cycle, and
the triangle scan over a finite field.

Genericity is an explicit runtime check here: residual cycles are accepted
only when fully rational, reduced and transversal; anything else comes back
as a `Failure` value with a diagnostic, never as a partial cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from . import _kernels as kernels
from .fields import FiniteField, Matrix, Scalar, kernel_basis, rank
from .plane import (
    CurveForm,
    PointScheme,
    ProjPoint,
    divide_by_linear,
    eval_matrix,
    evaluate_forms_at_points,
    line_through,
    monomial_count,
    points_on_curve,
)


class MembershipError(ValueError):
    """A curve handed to a residual computation is not in the system."""


@dataclass(frozen=True)
class Failure:
    """A diagnosed non-error failure (genericity or hypothesis violation)."""

    reason: str
    data: dict = dc_field(default_factory=dict)

    def __bool__(self):
        return False


@dataclass(frozen=True)
class LinearSystem:
    degree: int
    scheme: PointScheme
    basis: tuple[CurveForm, ...]

    @property
    def h0(self) -> int:
        return len(self.basis)

    def member(self, coeffs: Sequence[Scalar],
               basis: Sequence[CurveForm] | None = None) -> CurveForm:
        """The member with the given coordinates w.r.t. (a subset of) the
        canonical basis."""
        F = self.scheme.field
        forms = self.basis if basis is None else basis
        if len(coeffs) != len(forms):
            raise ValueError("coordinate/basis length mismatch")
        acc = [F.zero] * monomial_count(self.degree)
        for lam, f in zip(coeffs, forms):
            lam = F.coerce(lam)
            if lam == F.zero:
                continue
            for i, c in enumerate(f.coeffs):
                acc[i] = F.add(acc[i], F.mul(lam, c))
        return CurveForm.make(F, self.degree, acc)


@lru_cache(maxsize=256)
def linear_system(Z: PointScheme, d: int) -> LinearSystem:
    basis = kernel_basis(eval_matrix(Z, d))
    forms = tuple(CurveForm.make(Z.field, d, v) for v in basis)
    return LinearSystem(d, Z, forms)


def h0(Z: PointScheme, d: int) -> int:
    """dim of degree-d forms vanishing on Z to the assigned orders."""
    return monomial_count(d) - rank(eval_matrix(Z, d))


def virtual_dim(Z: PointScheme, d: int) -> int:
    """Expected projective dimension d(d+3)/2 - sum m(m+1)/2; may be < 0."""
    return d * (d + 3) // 2 - Z.length


def irregularity(Z: PointScheme, d: int) -> int:
    """Excess of the actual projective dimension over the virtual one."""
    return (h0(Z, d) - 1) - max(virtual_dim(Z, d), -1)


def is_associated_pair(P: PointScheme, q: ProjPoint, a: ProjPoint,
                       b: ProjPoint) -> bool:
    """Whether {a, b} together with q impose dependent conditions on the
    quintics through P (the plane-side criterion for a trisecant)."""
    for pt in (q, a, b):
        if P.contains_point(pt):
            raise ValueError("q, a, b must avoid the base points")
    coords = {q.coords, a.coords, b.coords}
    if len(coords) != 3:
        raise ValueError("q, a, b must be pairwise distinct")
    Z = P.plus(q, a, b)
    return h0(Z, 5) >= 4


def residual_cycle(D: CurveForm, D2: CurveForm, Z: PointScheme,
                   field: FiniteField) -> PointScheme | Failure:
    """The field-rational common zeros of D and D2 away from Z, accepted only
    in the fully rational, reduced, transversal case (|cycle| = d^2 - deg Z)."""
    if D.degree != D2.degree:
        raise MembershipError("pencil members must share a degree")
    if D.coeffs == D2.coeffs:
        raise MembershipError("the two curves must be distinct")
    if not Z.reduced:
        raise MembershipError("residual cycles need a reduced base scheme")
    d = D.degree
    Zf = Z.lift(field) if Z.field != field else Z
    zvals = evaluate_forms_at_points([D, D2], Zf.points, field)
    if np.any(zvals != 0):
        raise MembershipError("both curves must vanish on the base scheme")
    pts = points_on_curve(D, field)
    vals2 = evaluate_forms_at_points([D2], pts, field)[0]
    base = {p.coords for p in Zf.points}
    residual = [p for p, v in zip(pts, vals2)
                if v == 0 and p.coords not in base]
    expected = d * d - Z.deg
    if len(residual) != expected:
        return Failure("residual cycle not fully rational/transversal",
                       {"found": len(residual), "expected": expected})
    return PointScheme.of(residual)


@dataclass(frozen=True)
class DualityReport:
    irregularity: int
    residual_h0: int
    holds: bool
    cycle: PointScheme


def duality_check(D: CurveForm, D2: CurveForm, Z: PointScheme, d: int,
                  field: FiniteField) -> DualityReport | Failure:
    """Executable form of the residual duality statement: the irregularity of
    |I_Z(d)| equals h0 of the residual cycle in degree d-3."""
    if d < 4:
        raise ValueError("duality check needs degree >= 4")
    Y = residual_cycle(D, D2, Z, field)
    if isinstance(Y, Failure):
        return Y
    s = irregularity(Z, d)
    hY = h0(Y, d - 3)
    return DualityReport(s, hY, s == hY, Y)


def residuation_witness(Cm: CurveForm, P: PointScheme, Pp: PointScheme,
                        Q: PointScheme, Qp: PointScheme,
                        n1: int, n2: int, n: int) -> CurveForm | Failure:
    """A curve of degree n1+n2-n through P'+Q' (the residuation conclusion);
    Failure when no such curve exists, flagging a violated hypothesis."""
    if n1 + n2 < n:
        raise ValueError("need n1 + n2 >= n")
    dt = n1 + n2 - n
    if dt < 1:
        raise ValueError("witness degree must be >= 1")
    for S in (P, Pp, Q, Qp):
        if S.items and not S.reduced:
            raise ValueError("cycles must be reduced")
    if Cm.degree != n:
        raise ValueError("Cm degree mismatch")
    pts = list(Pp.points) + list(Qp.points)
    if len({p.coords for p in pts}) != len(pts):
        raise ValueError("P' and Q' must be disjoint in the reduced case")
    target = PointScheme.of(pts) if pts else PointScheme.empty(Cm.field)
    basis = kernel_basis(eval_matrix(target, dt))
    if not basis:
        return Failure("no curve of the residuation degree through P'+Q'",
                       {"h0": 0, "degree": dt})
    return CurveForm.make(Cm.field, dt, basis[0])


def unique_cubic(Q: PointScheme) -> CurveForm | Failure:
    """The unique cubic through a residual 9-cycle, when h0 = 1."""
    if Q.deg != 9 or not Q.reduced:
        raise ValueError("expected 9 distinct simple points")
    basis = kernel_basis(eval_matrix(Q, 3))
    if len(basis) != 1:
        return Failure("cubic through the 9-cycle is not unique",
                       {"h0": len(basis)})
    return CurveForm.make(Q.field, 3, basis[0])


# ---------------------------------------------------------------------------
# scans over subsystem members


def _score_curve_points(D: CurveForm, Z: PointScheme, field: FiniteField):
    """Rational points of D off Z, for residual scanning."""
    base = {p.coords for p in Z.points}
    return [p for p in points_on_curve(D, field) if p.coords not in base]


def scan_rational_residuals(sys_d: LinearSystem, field: FiniteField,
                            pivot_index: int = 0, budget: int = 200_000,
                            max_hits: int = 64):
    """Scan members D2 of the subsystem complementary to basis[pivot_index]
    for fully rational transversal residual cycles on D = basis[pivot_index].

    Yields (D, D2, cycle) triples in canonical member order.  This is the
    shared engine behind the triangle search and the pencil harvesting used
    by the acceptance suite.
    """
    Z = sys_d.scheme
    if Z.field != field:
        Z = Z.lift(field)
        sys_d = linear_system(Z, sys_d.degree)
    basis = sys_d.basis
    if len(basis) < 2:
        return
    D = basis[pivot_index]
    comp = tuple(f for i, f in enumerate(basis) if i != pivot_index)
    want = sys_d.degree**2 - Z.deg
    pts = _score_curve_points(D, Z, field)
    if len(pts) < want:
        return
    vals = evaluate_forms_at_points(comp, pts, field)
    limit = min(budget, kernels.subsystem_size(len(comp), field.q))
    hits = kernels.scan_combo_zero_hits(vals, want, limit, max_hits,
                                        field.tables)
    for idx in hits:
        lam = kernels.subsystem_coords_from_index(int(idx), len(comp), field.q)
        D2 = sys_d.member(lam, comp)
        cycle = residual_cycle(D, D2, Z, field)
        if isinstance(cycle, Failure):
            continue  # e.g. a zero of D2 at a non-reduced intersection
        yield D, D2, cycle


def rational_residual_pencils(Z: PointScheme, d: int, field: FiniteField,
                              want: int, budget: int = 2_500_000,
                              max_hits: int = 64):
    """Collect up to `want` pencils of degree-d curves through Z whose
    residual cycles are fully rational and transversal."""
    sys_d = linear_system(Z.lift(field) if Z.field != field else Z, d)
    out = []
    for pivot in range(min(len(sys_d.basis), 3)):
        for triple in scan_rational_residuals(sys_d, field, pivot, budget,
                                              max_hits):
            out.append(triple)
            if len(out) >= want:
                return out
    return out


@dataclass(frozen=True)
class Triangle:
    member: CurveForm          # the pencil mate D2
    cubic: CurveForm           # the unique cubic through the residual cycle
    lines: tuple[CurveForm, CurveForm, CurveForm]
    residual: PointScheme
    member_index: int


def split_into_lines(C: CurveForm, field: FiniteField,
                     point_cap: int = 60) -> tuple[CurveForm, ...] | None:
    """Total decomposition of a cubic into 3 field-rational lines by repeated
    exact division against lines through pairs of its points; None if the
    cubic is not a product of rational lines."""
    pts = points_on_curve(C, field)[:point_cap]
    for a, b in combinations(pts, 2):
        L1 = line_through(a, b)
        conic = divide_by_linear(C, L1)
        if conic is None:
            continue
        cpts = points_on_curve(conic, field)[:point_cap]
        for c, e in combinations(cpts, 2):
            L2 = line_through(c, e)
            L3 = divide_by_linear(conic, L2)
            if L3 is not None:
                return (L1, L2, L3)
    return None


def triangle_search(P: PointScheme, q: ProjPoint, field: FiniteField,
                    budget: int = 200_000) -> Triangle | None:
    """Scan the subsystem complementary to D = first canonical quintic through
    P+q for a member whose residual 9-cycle lies on a cubic splitting into 3
    rational lines; first find wins, None when the budget is exhausted."""
    Zp = P.lift(field) if P.field != field else P
    qf = q.lift(field) if q.field != field else q
    Z = Zp.plus(qf)
    sys5 = linear_system(Z, 5)
    scanned = 0
    for D, D2, cycle in scan_rational_residuals(sys5, field, 0, budget,
                                                max_hits=4096):
        scanned += 1
        cubic = unique_cubic(cycle)
        if isinstance(cubic, Failure):
            continue
        lines = split_into_lines(cubic, field)
        if lines is None:
            continue
        return Triangle(D2, cubic, lines, cycle, scanned)
    return None
