"""Exact scalar arithmetic over QQ and F_{p^k} (k <= 3), and dense exact
linear algebra (rank, kernel basis, reduced echelon form).

Finite-field scalars are "packed" integers c0 + c1*p + c2*p^2 where the c_i
are the coefficients over the deterministic modulus polynomial; rationals are
`fractions.Fraction` (already canonical: reduced, positive denominator).
All values are immutable and all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from . import _kernels as kernels
from ._kernels import FieldTables

Scalar = Union[int, Fraction]


class FieldError(ValueError):
    """Invalid field construction or incompatible operands."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# fields


class Field:
    """Common interface: zero/one, ring ops, inversion, coercion."""

    is_finite = False

    def coerce(self, x) -> Scalar:
        raise NotImplementedError

    def from_int(self, n: int) -> Scalar:
        raise NotImplementedError

    def pow(self, a: Scalar, e: int) -> Scalar:
        if e < 0:
            return self.pow(self.inv(a), -e)
        acc = self.one
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc


class RationalField(Field):
    kind = "rational"
    zero = Fraction(0)
    one = Fraction(1)
    characteristic = 0

    def coerce(self, x) -> Fraction:
        return Fraction(x)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


def _poly_mul_mod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int],
                  p: int) -> tuple[int, ...]:
    """Multiply coefficient vectors (low degree first) mod (modulus, p)."""
    k = len(modulus) - 1
    prod = [0] * (2 * k - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce by the monic modulus: x^k = -(modulus[:k])
    for deg in range(2 * k - 2, k - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for j in range(k):
                prod[deg - k + j] = (prod[deg - k + j] - c * modulus[j]) % p
    return tuple(prod[:k])


@lru_cache(maxsize=None)
def _deterministic_modulus(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over F_p,
    coefficients compared low-degree first.  Returned low-first, length k+1.
    For k <= 3 irreducibility is equivalent to having no root in F_p."""
    if k == 1:
        return (0, 1)
    from itertools import product

    for tail in product(range(p), repeat=k):
        coeffs = tuple(tail) + (1,)
        if all(sum(c * pow(x, i, p) for i, c in enumerate(coeffs)) % p
               for x in range(p)):
            return coeffs
    raise FieldError(f"no irreducible of degree {k} over F_{p}")  # unreachable


class FiniteField(Field):
    """F_{p^k} with packed-integer elements in [0, p^k)."""

    is_finite = True

    def __init__(self, p: int, k: int = 1):
        if not is_prime(p) or p <= 2:
            raise FieldError(f"p={p} is not an odd prime")
        if not 1 <= k <= 3:
            raise FieldError(f"extension degree k={k} out of range 1..3")
        self.p = p
        self.k = k
        self.q = p**k
        self.characteristic = p
        self.modulus = _deterministic_modulus(p, k)
        self.zero = 0
        self.one = 1
        self._tables: FieldTables | None = None

    @property
    def kind(self) -> str:
        return "prime" if self.k == 1 else "extension"

    def __repr__(self):
        return f"GF({self.p})" if self.k == 1 else f"GF({self.p}^{self.k})"

    def __eq__(self, other):
        return (isinstance(other, FiniteField)
                and (self.p, self.k) == (other.p, other.k))

    def __hash__(self):
        return hash((self.p, self.k))

    # packed digit helpers -------------------------------------------------

    def digits(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def pack(self, digits: Iterable[int]) -> int:
        acc = 0
        for i, d in enumerate(digits):
            acc += (d % self.p) * self.p**i
        return acc

    # arithmetic -----------------------------------------------------------

    def coerce(self, x) -> int:
        if isinstance(x, int):
            if 0 <= x < self.q:
                return x
            if self.k == 1:
                return x % self.p
            raise FieldError(f"{x} is not a packed element of {self}")
        raise FieldError(f"cannot coerce {x!r} into {self}")

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            s = a + b
            return s - self.p if s >= self.p else s
        return self.pack(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self.pack(-x for x in self.digits(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if self._tables is not None:
            if a == 0 or b == 0:
                return 0
            t = self._tables
            return int(t.expt[t.logt[a] + t.logt[b]])
        return self.pack(_poly_mul_mod(self.digits(a), self.digits(b),
                                       self.modulus, self.p))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int) -> int:
        """The field automorphism x -> x^p."""
        return self.pow(a, self.p)

    def in_prime_subfield(self, a: int) -> bool:
        return a < self.p

    def elements(self) -> range:
        return range(self.q)

    def random_element(self, rng) -> int:
        return rng.randrange(self.q)

    def random_nonzero(self, rng) -> int:
        return rng.randrange(1, self.q)

    # kernel tables ----------------------------------------------------------

    @property
    def tables(self) -> FieldTables:
        if self._tables is None:
            self._tables = self._build_tables()
        return self._tables

    def _build_tables(self) -> FieldTables:
        p, k, q = self.p, self.k, self.q
        if q > 1 << 22:
            raise FieldError(f"field of order {q} too large for kernel tables")
        dig = np.zeros((q, k), dtype=np.int64)
        vals = np.arange(q)
        for i in range(k):
            dig[:, i] = vals % p
            vals = vals // p
        neg = np.zeros(q, dtype=np.int64)
        weights = np.array([p**i for i in range(k)], dtype=np.int64)
        neg[:] = ((p - dig) % p) @ weights

        # generator of the multiplicative group, then log/exp tables
        factors = _prime_factors(q - 1)
        gen = None
        for cand in range(2, q):
            if all(self.pow(cand, (q - 1) // f) != 1 for f in factors):
                gen = cand
                break
        if gen is None:  # q = 3 has the lone candidate 2
            gen = q - 1
        expt = np.zeros(max(2 * (q - 1) - 1, 1), dtype=np.int64)
        logt = np.full(q, -1, dtype=np.int64)
        acc = 1
        for i in range(q - 1):
            expt[i] = acc
            logt[acc] = i
            acc = self.mul(acc, gen)
        for i in range(q - 1, expt.shape[0]):
            expt[i] = expt[i - (q - 1)]
        inv = np.zeros(q, dtype=np.int64)
        nz = np.arange(1, q)
        inv[nz] = expt[(q - 1) - logt[nz]]
        return FieldTables(p=p, k=k, q=q, dig=dig, expt=expt, logt=logt,
                           inv=inv, neg=neg)

    def spec_json(self) -> dict:
        return {"char": self.p, "deg": self.k}


@lru_cache(maxsize=None)
def GF(p: int, k: int = 1) -> FiniteField:
    return FiniteField(p, k)


def extension_field(p: int, k: int) -> FiniteField:
    """Deterministic F_{p^k} (errors: p not an odd prime, k outside 1..3)."""
    return GF(p, k)


def field_from_spec(spec: dict) -> FiniteField:
    return GF(int(spec["char"]), int(spec.get("deg", 1)))


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Matrix:
    field: Field
    nrows: int
    ncols: int
    entries: tuple[tuple[Scalar, ...], ...]

    @staticmethod
    def build(field: Field, rows: Iterable[Iterable[Scalar]],
              ncols: int | None = None) -> "Matrix":
        ents = tuple(tuple(field.coerce(x) for x in row) for row in rows)
        if ents:
            ncols = len(ents[0])
            if any(len(r) != ncols for r in ents):
                raise FieldError("ragged matrix")
        elif ncols is None:
            raise FieldError("empty matrix needs an explicit column count")
        return Matrix(field, len(ents), ncols, ents)

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        return Matrix.build(field, [[field.one if i == j else field.zero
                                     for j in range(n)] for i in range(n)])

    def to_numpy(self) -> np.ndarray:
        if not self.field.is_finite:
            raise FieldError("only finite-field matrices convert to numpy")
        return np.array(self.entries, dtype=np.int64).reshape(self.nrows,
                                                              self.ncols)


def _bareiss_rank(rows: list[list[int]]) -> int:
    """Fraction-free (division-free pivoting) integer rank."""
    m = [row[:] for row in rows]
    r = len(m)
    c = len(m[0]) if r else 0
    prev = 1
    pr = 0
    for col in range(c):
        if pr == r:
            break
        piv = next((i for i in range(pr, r) if m[i][col]), None)
        if piv is None:
            continue
        m[pr], m[piv] = m[piv], m[pr]
        for i in range(pr + 1, r):
            for j in range(col + 1, c):
                m[i][j] = (m[pr][col] * m[i][j] - m[i][col] * m[pr][j]) // prev
            m[i][col] = 0
        prev = m[pr][col]
        pr += 1
    return pr


def _rows_to_integers(M: Matrix) -> list[list[int]]:
    out = []
    for row in M.entries:
        fracs = [Fraction(x) for x in row]
        scale = 1
        for f in fracs:
            scale = scale * f.denominator // np.gcd(scale, f.denominator)
        out.append([int(f * scale) for f in fracs])
    return out


def _rref_rational(M: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    m = [[Fraction(x) for x in row] for row in M.entries]
    rows, cols = M.nrows, M.ncols
    pivots = []
    pr = 0
    for col in range(cols):
        if pr == rows:
            break
        piv = next((i for i in range(pr, rows) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[pr], m[piv] = m[piv], m[pr]
        lead = m[pr][col]
        m[pr] = [x / lead for x in m[pr]]
        for i in range(rows):
            if i != pr and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[pr])]
        pivots.append(col)
        pr += 1
    return (Matrix(M.field, rows, cols, tuple(tuple(r) for r in m)),
            tuple(pivots))


def rref(M: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    if M.nrows == 0:
        return M, ()
    if M.field.is_finite:
        arr, pivots = kernels.rref_mod(M.to_numpy(), M.field.tables)
        ents = tuple(tuple(int(x) for x in row) for row in arr)
        return Matrix(M.field, M.nrows, M.ncols, ents), tuple(pivots)
    return _rref_rational(M)


def rank(M: Matrix) -> int:
    """Rank over the matrix's field.  Over QQ this uses fraction-free
    elimination on integer-scaled rows to control coefficient growth."""
    if M.nrows == 0 or M.ncols == 0:
        return 0
    if M.field.is_finite:
        _, pivots = kernels.rref_mod(M.to_numpy(), M.field.tables)
        return len(pivots)
    return _bareiss_rank(_rows_to_integers(M))


def kernel_basis(M: Matrix) -> tuple[tuple[Scalar, ...], ...]:
    """Canonical basis of the right kernel: the reduced echelon form of the
    standard kernel vectors, so equal kernels give identical output."""
    F = M.field
    if M.nrows == 0:
        R, pivots = M, ()
    else:
        R, pivots = rref(M)
    pivset = set(pivots)
    free = [j for j in range(M.ncols) if j not in pivset]
    vecs = []
    for j in free:
        v = [F.zero] * M.ncols
        v[j] = F.one
        for r, pc in enumerate(pivots):
            v[pc] = F.neg(R.entries[r][j])
        vecs.append(v)
    if not vecs:
        return ()
    K = Matrix.build(F, vecs)
    KR, kpiv = rref(K)
    return tuple(KR.entries[i] for i in range(len(kpiv)))
