"""Packed finite-field representation shared by both kernel backends.

An element of F_{p^k} (k <= 3) is packed as the integer c0 + c1*p + c2*p^2
where (c0, .., c_{k-1}) are its coefficients over the deterministic modulus
polynomial, low degree first.  The subfield F_p consists exactly of the packed
values < p, so lifting along F_p -> F_{p^k} is the identity on packed values.

Plane points over F_q are enumerated in a fixed canonical order ("point
codes"):

    code in [0, q^2)        -> (1 : code//q : code%q)
    code in [q^2, q^2+q)    -> (0 : 1 : code - q^2)
    code == q^2 + q         -> (0 : 0 : 1)

Projective subsystem members P^{nb-1}(F_q) are enumerated likewise: leading
coordinate 1 at position j (j ascending), the remaining nb-1-j coordinates
running through base-q counters, most significant digit first.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class FieldTables(NamedTuple):
    """Lookup tables driving packed F_{p^k} arithmetic in the kernels."""

    p: int
    k: int
    q: int
    dig: np.ndarray   # (q, k) int64, base-p digits of each packed value
    expt: np.ndarray  # (2q-2,) int64, g^i packed, doubled to skip a mod
    logt: np.ndarray  # (q,) int64, discrete log base g; logt[0] = -1
    inv: np.ndarray   # (q,) int64, multiplicative inverse; inv[0] = 0
    neg: np.ndarray   # (q,) int64, additive inverse


def plane_size(q: int) -> int:
    return q * q + q + 1


def point_coords_from_code(code: int, q: int) -> tuple[int, int, int]:
    if code < 0 or code > q * q + q:
        raise ValueError(f"point code {code} out of range for q={q}")
    if code < q * q:
        return (1, code // q, code % q)
    if code < q * q + q:
        return (0, 1, code - q * q)
    return (0, 0, 1)


def point_code_from_coords(coords: tuple[int, int, int], q: int) -> int:
    x, y, z = coords
    if x == 1:
        return y * q + z
    if x == 0 and y == 1:
        return q * q + z
    if x == 0 and y == 0 and z == 1:
        return q * q + q
    raise ValueError(f"coords {coords} are not canonical")


def subsystem_size(nb: int, q: int) -> int:
    """Number of points of P^{nb-1}(F_q)."""
    return sum(q**j for j in range(nb))


def subsystem_coords_from_index(index: int, nb: int, q: int) -> tuple[int, ...]:
    """Decode a member index of P^{nb-1}(F_q) into packed coordinates."""
    if index < 0:
        raise ValueError("negative subsystem index")
    for j in range(nb):
        block = q ** (nb - 1 - j)
        if index < block:
            coords = [0] * nb
            coords[j] = 1
            for t in range(nb - 1, j, -1):
                coords[t] = index % q
                index //= q
            return tuple(coords)
        index -= block
    raise ValueError("subsystem index out of range")


def projection_key_bound(nf: int, q: int) -> int:
    """Upper bound for packed projection keys of P^{nf-2} points."""
    return (nf - 1) * q ** (nf - 2)


SENTINEL_ZERO_IMAGE = -1   # all nf forms vanish (base point of the system)
SENTINEL_AT_CENTER = -2    # image proportional to the projection center
