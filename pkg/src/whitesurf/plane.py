"""Projective plane over an exact field: points, forms of any degree,
evaluation matrices with multiplicity (derivative) conditions, and curve
point enumeration over finite fields.

Conventions, fixed forever for reproducible matrices and file formats:
  * monomials of degree d are x^a y^b z^c ordered degree-lexicographically
    with x > y > z (a descending, then b descending);
  * points are canonicalized so the first nonzero coordinate is 1;
  * forms are canonicalized so the first nonzero coefficient is 1;
  * derivative conditions of order < m at a point dehomogenize at the
    point's leading coordinate and run through (du, dv) by total order,
    then du descending.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from . import _kernels as kernels
from .fields import Field, FieldError, FiniteField, Matrix, Scalar


class DegeneratePointError(ValueError):
    pass


@lru_cache(maxsize=None)
def monomials(d: int) -> tuple[tuple[int, int, int], ...]:
    """Exponent triples of degree d in deglex order, x > y > z."""
    return tuple((a, b, d - a - b)
                 for a in range(d, -1, -1)
                 for b in range(d - a, -1, -1))


@lru_cache(maxsize=None)
def monomial_index(d: int) -> dict[tuple[int, int, int], int]:
    return {e: i for i, e in enumerate(monomials(d))}


def monomial_count(d: int) -> int:
    return (d + 1) * (d + 2) // 2


@lru_cache(maxsize=None)
def _exponent_array(d: int) -> np.ndarray:
    return np.array(monomials(d), dtype=np.int64)


@dataclass(frozen=True)
class ProjPoint:
    """A plane point, stored by its canonical representative."""

    field: Field
    coords: tuple[Scalar, Scalar, Scalar]

    @staticmethod
    def make(field: Field, coords: Iterable[Scalar]) -> "ProjPoint":
        cs = [field.coerce(c) for c in coords]
        if len(cs) != 3:
            raise DegeneratePointError("a plane point needs 3 coordinates")
        lead = next((c for c in cs if c != field.zero), None)
        if lead is None:
            raise DegeneratePointError("all-zero coordinates")
        if lead != field.one:
            s = field.inv(lead)
            cs = [field.mul(s, c) for c in cs]
        return ProjPoint(field, tuple(cs))

    @property
    def lead_index(self) -> int:
        for i, c in enumerate(self.coords):
            if c != self.field.zero:
                return i
        raise DegeneratePointError("all-zero coordinates")

    def code(self) -> int:
        """Canonical enumeration index over a finite field."""
        if not self.field.is_finite:
            raise FieldError("point codes exist over finite fields only")
        return kernels.point_code_from_coords(self.coords, self.field.q)

    def lift(self, field: FiniteField) -> "ProjPoint":
        return ProjPoint(field, tuple(_lift_scalar(c, self.field, field)
                                      for c in self.coords))

    def __repr__(self):
        return f"({self.coords[0]}:{self.coords[1]}:{self.coords[2]})"


def point_from_code(field: FiniteField, code: int) -> ProjPoint:
    return ProjPoint(field, kernels.point_coords_from_code(code, field.q))


def _lift_scalar(c: Scalar, src: Field, dst: FiniteField) -> int:
    if src == dst:
        return c  # type: ignore[return-value]
    if (isinstance(src, FiniteField) and src.k == 1
            and src.p == dst.p):
        return c  # packed constants embed identically
    raise FieldError(f"no supported embedding {src} -> {dst}")


@dataclass(frozen=True)
class CurveForm:
    """A nonzero homogeneous form, canonically scaled (leading coefficient 1)."""

    field: Field
    degree: int
    coeffs: tuple[Scalar, ...]

    @staticmethod
    def make(field: Field, degree: int, coeffs: Iterable[Scalar]) -> "CurveForm":
        if degree < 1:
            raise ValueError("curve forms have degree >= 1")
        cs = [field.coerce(c) for c in coeffs]
        if len(cs) != monomial_count(degree):
            raise ValueError("coefficient vector has the wrong length")
        lead = next((c for c in cs if c != field.zero), None)
        if lead is None:
            raise ValueError("the zero form is not a curve")
        if lead != field.one:
            s = field.inv(lead)
            cs = [field.mul(s, c) for c in cs]
        return CurveForm(field, degree, tuple(cs))

    def coeff(self, exp: tuple[int, int, int]) -> Scalar:
        return self.coeffs[monomial_index(self.degree)[exp]]

    def lift(self, field: FiniteField) -> "CurveForm":
        return CurveForm(field, self.degree,
                         tuple(_lift_scalar(c, self.field, field)
                               for c in self.coeffs))

    def coeff_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def __repr__(self):
        parts = []
        for e, c in zip(monomials(self.degree), self.coeffs):
            if c == self.field.zero:
                continue
            mono = "".join(f"{v}^{n}" if n > 1 else v
                           for v, n in zip("xyz", e) if n)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def line(field: Field, coeffs: Iterable[Scalar]) -> CurveForm:
    return CurveForm.make(field, 1, coeffs)


@dataclass(frozen=True)
class PointScheme:
    """Points with multiplicities; pairwise distinct supporting points."""

    field: Field
    items: tuple[tuple[ProjPoint, int], ...]

    @staticmethod
    def of(points: Iterable[ProjPoint],
           multiplicities: Iterable[int] | None = None) -> "PointScheme":
        pts = list(points)
        if not pts:
            raise ValueError("empty scheme; use PointScheme.empty(field)")
        mults = list(multiplicities) if multiplicities is not None else [1] * len(pts)
        if len(mults) != len(pts):
            raise ValueError("points/multiplicities length mismatch")
        if any(m < 1 for m in mults):
            raise ValueError("multiplicities must be >= 1")
        if len({p.coords for p in pts}) != len(pts):
            raise ValueError("supporting points must be pairwise distinct")
        field = pts[0].field
        if any(p.field != field for p in pts):
            raise FieldError("mixed fields in one scheme")
        return PointScheme(field, tuple(zip(pts, mults)))

    @staticmethod
    def empty(field: Field) -> "PointScheme":
        return PointScheme(field, ())

    @property
    def points(self) -> tuple[ProjPoint, ...]:
        return tuple(p for p, _ in self.items)

    @property
    def deg(self) -> int:
        return sum(m for _, m in self.items)

    @property
    def length(self) -> int:
        """Number of linear conditions imposed: sum of m(m+1)/2."""
        return sum(m * (m + 1) // 2 for _, m in self.items)

    @property
    def reduced(self) -> bool:
        return all(m == 1 for _, m in self.items)

    def contains_point(self, p: ProjPoint) -> bool:
        return any(pt.coords == p.coords for pt, _ in self.items)

    def plus(self, *points: ProjPoint) -> "PointScheme":
        for p in points:
            if self.contains_point(p):
                raise ValueError(f"point {p} already in the scheme")
        extra = tuple((p, 1) for p in points)
        return PointScheme(self.field, self.items + extra)

    def minus(self, points: Iterable[ProjPoint]) -> "PointScheme":
        drop = {p.coords for p in points}
        kept = tuple((p, m) for p, m in self.items if p.coords not in drop)
        return PointScheme(self.field, kept)

    def with_multiplicity(self, m: int) -> "PointScheme":
        return PointScheme(self.field, tuple((p, m) for p, _ in self.items))

    def lift(self, field: FiniteField) -> "PointScheme":
        return PointScheme(field, tuple((p.lift(field), m)
                                        for p, m in self.items))


def scheme_of(points: Iterable[ProjPoint]) -> PointScheme:
    return PointScheme.of(points)


def _falling(n: int, k: int) -> int:
    acc = 1
    for i in range(k):
        acc *= n - i
    return acc if k <= n else 0


def eval_matrix(Z: PointScheme, d: int) -> Matrix:
    """Condition matrix: a form of degree d vanishes on Z to the required
    orders iff its coefficient vector lies in the right kernel.

    One row per derivative condition (orders < m, fixed order), columns
    indexed by the degree-d monomials.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    F = Z.field
    exps = monomials(d)
    rows: list[list[Scalar]] = []
    for pt, m in Z.items:
        if m > d + 1:
            raise ValueError(f"multiplicity {m} exceeds {d + 1} for degree {d}")
        i0 = pt.lead_index
        j1, j2 = [j for j in range(3) if j != i0]
        # powers of the two affine coordinates of the canonical representative
        pw1 = [F.one]
        pw2 = [F.one]
        for _ in range(d):
            pw1.append(F.mul(pw1[-1], pt.coords[j1]))
            pw2.append(F.mul(pw2[-1], pt.coords[j2]))
        for order in range(m):
            for du in range(order, -1, -1):
                dv = order - du
                row = []
                for e in exps:
                    e1, e2 = e[j1], e[j2]
                    if e1 < du or e2 < dv:
                        row.append(F.zero)
                        continue
                    c = F.from_int(_falling(e1, du) * _falling(e2, dv))
                    val = F.mul(c, F.mul(pw1[e1 - du], pw2[e2 - dv]))
                    row.append(val)
                rows.append(row)
    return Matrix.build(F, rows, ncols=monomial_count(d))


def evaluate(C: CurveForm, p: ProjPoint) -> Scalar:
    """Value of the form at the canonical representative of p."""
    F = C.field
    if p.field != F:
        raise FieldError("point/form field mismatch")
    d = C.degree
    pws = []
    for j in range(3):
        pw = [F.one]
        for _ in range(d):
            pw.append(F.mul(pw[-1], p.coords[j]))
        pws.append(pw)
    acc = F.zero
    for e, c in zip(monomials(d), C.coeffs):
        if c == F.zero:
            continue
        term = F.mul(c, F.mul(pws[0][e[0]], F.mul(pws[1][e[1]], pws[2][e[2]])))
        acc = F.add(acc, term)
    return acc


def line_through(a: ProjPoint, b: ProjPoint) -> CurveForm:
    """The unique line through two distinct points (cross product)."""
    if a.coords == b.coords:
        raise ValueError("coincident points span no line")
    F = a.field
    (a0, a1, a2), (b0, b1, b2) = a.coords, b.coords
    c = (F.sub(F.mul(a1, b2), F.mul(a2, b1)),
         F.sub(F.mul(a2, b0), F.mul(a0, b2)),
         F.sub(F.mul(a0, b1), F.mul(a1, b0)))
    return CurveForm.make(F, 1, c)


def tangent_line_to_conic(t: Scalar, field: Field) -> CurveForm:
    """The tangent t^2*x - 2t*y + z to the fixed conic xz = y^2 at (1:t:t^2)."""
    if getattr(field, "characteristic", 0) == 2:
        raise FieldError("tangent construction needs characteristic != 2")
    t = field.coerce(t)
    two = field.from_int(2)
    return CurveForm.make(field, 1,
                          (field.mul(t, t), field.neg(field.mul(two, t)),
                           field.one))


def conic_xz_y2(field: Field) -> CurveForm:
    """The fixed conic xz - y^2 used by the tangent-line constructions."""
    c = [field.zero] * 6
    c[monomial_index(2)[(1, 0, 1)]] = field.one
    c[monomial_index(2)[(0, 2, 0)]] = field.neg(field.one)
    return CurveForm.make(field, 2, c)


def plane_point_count(field: FiniteField) -> int:
    return kernels.plane_size(field.q)


def all_plane_points(field: FiniteField):
    for code in range(kernels.plane_size(field.q)):
        yield point_from_code(field, code)


def form_values_on_plane(C: CurveForm, field: FiniteField) -> np.ndarray:
    """Values of C at every plane point, indexed by point code."""
    Cf = C.lift(field) if C.field != field else C
    return kernels.plane_form_values(Cf.coeff_array(),
                                     _exponent_array(C.degree), field.tables)


def points_on_curve(C: CurveForm, field: FiniteField) -> list[ProjPoint]:
    """All field-rational points of the plane lying on C, canonical order."""
    if not field.is_finite:
        raise FieldError("enumeration needs a finite field")
    vals = form_values_on_plane(C, field)
    return [point_from_code(field, int(c)) for c in np.nonzero(vals == 0)[0]]


def evaluate_forms_at_points(forms: Sequence[CurveForm],
                             points: Sequence[ProjPoint],
                             field: FiniteField) -> np.ndarray:
    """(len(forms), len(points)) packed values; forms share one degree."""
    if not forms:
        raise ValueError("no forms")
    d = forms[0].degree
    if any(f.degree != d for f in forms):
        raise ValueError("forms must share a degree")
    coeffs = np.stack([(f.lift(field) if f.field != field else f).coeff_array()
                       for f in forms])
    pts = np.array([[int(c) for c in p.coords] for p in points],
                   dtype=np.int64).reshape(-1, 3)
    return kernels.eval_forms_at_points(coeffs, _exponent_array(d), pts,
                                        field.tables)


def form_product(A: CurveForm, B: CurveForm) -> CurveForm:
    """Exact product A*B (canonical since both factors are canonical)."""
    F = A.field
    if B.field != F:
        raise FieldError("field mismatch")
    d = A.degree + B.degree
    idx = monomial_index(d)
    out = [F.zero] * monomial_count(d)
    for ea, ca in zip(monomials(A.degree), A.coeffs):
        if ca == F.zero:
            continue
        for eb, cb in zip(monomials(B.degree), B.coeffs):
            if cb == F.zero:
                continue
            e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2])
            out[idx[e]] = F.add(out[idx[e]], F.mul(ca, cb))
    return CurveForm.make(F, d, out)


def product_of(forms: Sequence[CurveForm]) -> CurveForm:
    acc = forms[0]
    for f in forms[1:]:
        acc = form_product(acc, f)
    return acc


def divide_by_linear(C: CurveForm, L: CurveForm) -> CurveForm | None:
    """Exact quotient C / L, or None when the line does not divide C."""
    if L.degree != 1:
        raise ValueError("divisor must be a line")
    if C.degree < 2:
        raise ValueError("dividend must have degree >= 2")
    F = C.field
    v = next(i for i, c in enumerate(L.coeffs) if c != F.zero)  # leading var
    d = C.degree
    rem = {e: c for e, c in zip(monomials(d), C.coeffs) if c != F.zero}
    qidx = monomial_index(d - 1)
    quot = [F.zero] * monomial_count(d - 1)
    for e in monomials(d):
        c = rem.get(e, F.zero)
        if c == F.zero:
            continue
        if e[v] == 0:
            return None  # leading monomial of L does not divide
        te = list(e)
        te[v] -= 1
        quot[qidx[tuple(te)]] = F.add(quot[qidx[tuple(te)]], c)
        for w in range(3):
            lw = L.coeffs[w]
            if lw == F.zero:
                continue
            me = list(te)
            me[w] += 1
            me_t = tuple(me)
            rem[me_t] = F.sub(rem.get(me_t, F.zero), F.mul(c, lw))
            if rem[me_t] == F.zero:
                del rem[me_t]
    if rem:
        return None
    return CurveForm.make(F, d - 1, quot)
