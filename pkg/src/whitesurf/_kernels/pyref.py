"""Pure-Python kernel backend.

Semantically identical to the compiled `_fastcore` extension; numpy is used
only as array plumbing (gathers and integer sums), all field arithmetic is
table-driven packed arithmetic.  Selected automatically when the extension is
unavailable, or explicitly via WHITESURF_PURE=1.
"""

from __future__ import annotations

import numpy as np

from .packed import (
    SENTINEL_AT_CENTER,
    SENTINEL_ZERO_IMAGE,
    FieldTables,
    plane_size,
    projection_key_bound,
)

_I64 = np.int64


# ---------------------------------------------------------------------------
# vectorized packed arithmetic


def _vmul(t: FieldTables, a, b):
    a = np.asarray(a, dtype=_I64)
    b = np.asarray(b, dtype=_I64)
    mask = (a == 0) | (b == 0)
    s = t.logt[a] + t.logt[b]
    s[mask] = 0
    out = t.expt[s]
    out[mask] = 0
    return out

def _vadd(t: FieldTables, a, b):
    if t.k == 1:
        s = np.asarray(a, dtype=_I64) + np.asarray(b, dtype=_I64)
        s -= t.p * (s >= t.p)
        return s
    d = t.dig[a] + t.dig[b]
    d -= t.p * (d >= t.p)
    return _repack(t, d)

def _vsub(t: FieldTables, a, b):
    return _vadd(t, a, t.neg[b])

def _repack(t: FieldTables, digits):
    """Repack a (..., k) digit array (entries already reduced mod p)."""
    weights = np.array([t.p**i for i in range(t.k)], dtype=_I64)
    return digits @ weights

def _digit_sum_rows(t: FieldTables, terms):
    """Sum a (n_terms, ...) packed array along axis 0 exactly."""
    d = t.dig[terms].sum(axis=0) % t.p
    return _repack(t, d)


# ---------------------------------------------------------------------------
# dense exact linear algebra


def rref_mod(mat, t: FieldTables):
    """Reduced row echelon form over F_{p^k}; returns (rref, pivot columns)."""
    m = np.array(mat, dtype=_I64, copy=True)
    if m.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    rows, cols = m.shape
    pivots: list[int] = []
    pr = 0
    for col in range(cols):
        if pr == rows:
            break
        piv = -1
        for i in range(pr, rows):
            if m[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != pr:
            m[[pr, piv]] = m[[piv, pr]]
        lead = int(m[pr, col])
        if lead != 1:
            m[pr] = _vmul(t, m[pr], np.full(cols, t.inv[lead], dtype=_I64))
        for i in range(rows):
            f = int(m[i, col])
            if i != pr and f != 0:
                m[i] = _vsub(t, m[i], _vmul(t, m[pr], np.full(cols, f, dtype=_I64)))
        pivots.append(col)
        pr += 1
    return m, pivots


# ---------------------------------------------------------------------------
# form evaluation


def _coord_powers(t: FieldTables, vals, d):
    """(len(vals), d+1) packed powers of each value."""
    n = vals.shape[0]
    pw = np.zeros((n, d + 1), dtype=_I64)
    pw[:, 0] = 1
    for e in range(1, d + 1):
        pw[:, e] = _vmul(t, pw[:, e - 1], vals)
    return pw


def eval_forms_at_points(coeffs, exps, pts, t: FieldTables):
    """Evaluate nf forms (shared monomial support) at a list of packed points."""
    coeffs = np.asarray(coeffs, dtype=_I64)
    exps = np.asarray(exps, dtype=_I64)
    pts = np.asarray(pts, dtype=_I64)
    nf, nm = coeffs.shape
    npts = pts.shape[0]
    if npts == 0:
        return np.zeros((nf, 0), dtype=_I64)
    d = int(exps[0].sum())
    pwx = _coord_powers(t, pts[:, 0], d)
    pwy = _coord_powers(t, pts[:, 1], d)
    pwz = _coord_powers(t, pts[:, 2], d)
    mono = np.zeros((nm, npts), dtype=_I64)
    for j in range(nm):
        a, b, c = exps[j]
        mono[j] = _vmul(t, _vmul(t, pwx[:, a], pwy[:, b]), pwz[:, c])
    out = np.zeros((nf, npts), dtype=_I64)
    for f in range(nf):
        terms = _vmul(t, coeffs[f][:, None], mono)
        out[f] = _digit_sum_rows(t, terms)
    return out


def _collapse_chart_a(t: FieldTables, coeffs, exps, d, ys):
    """For x=1 and each y in ys, the z-polynomial coefficients (len(ys), d+1)."""
    ypow = _coord_powers(t, ys, d)
    g = np.zeros((len(ys), d + 1, t.k), dtype=_I64)
    for j in range(coeffs.shape[0]):
        _, b, c = exps[j]
        if coeffs[j] == 0:
            continue
        term = _vmul(t, np.full(len(ys), coeffs[j], dtype=_I64), ypow[:, b])
        g[:, c] += t.dig[term]
    g %= t.p
    return _repack(t, g)


def _horner_rows(t: FieldTables, g, zs):
    """Evaluate row i's polynomial g[i] at every z; returns (rows, len(zs))."""
    rows, dp1 = g.shape
    nz = len(zs)
    vals = np.repeat(g[:, dp1 - 1][:, None], nz, axis=1)
    for c in range(dp1 - 2, -1, -1):
        vals = _vadd(t, _vmul(t, vals, zs[None, :]), g[:, c][:, None])
    return vals


def plane_form_values(coeffs, exps, t: FieldTables):
    """Values of one form at every plane point, in point-code order."""
    coeffs = np.asarray(coeffs, dtype=_I64)
    exps = np.asarray(exps, dtype=_I64)
    q = t.q
    d = int(exps[0].sum())
    out = np.zeros(plane_size(q), dtype=_I64)
    zs = np.arange(q, dtype=_I64)
    block = max(1, 2_000_000 // q)
    for y0 in range(0, q, block):
        ys = np.arange(y0, min(y0 + block, q), dtype=_I64)
        g = _collapse_chart_a(t, coeffs, exps, d, ys)
        out[y0 * q : (y0 + len(ys)) * q] = _horner_rows(t, g, zs).reshape(-1)
    gb = np.zeros((1, d + 1), dtype=_I64)
    for j in range(coeffs.shape[0]):
        a, b, c = exps[j]
        if a == 0:
            gb[0, c] = coeffs[j]
    out[q * q : q * q + q] = _horner_rows(t, gb, zs)[0]
    for j in range(coeffs.shape[0]):
        a, b, c = exps[j]
        if a == 0 and b == 0:
            out[q * q + q] = coeffs[j]
    return out


def plane_project_keys(coeffs, exps, phiq, t: FieldTables):
    """Project every plane point's image from the center phiq; packed keys.

    Returns one int64 per plane point code: the canonical packed P^{nf-2}
    projection key, SENTINEL_ZERO_IMAGE if all nf forms vanish, or
    SENTINEL_AT_CENTER if the image is proportional to phiq.
    """
    coeffs = np.asarray(coeffs, dtype=_I64)
    exps = np.asarray(exps, dtype=_I64)
    phiq = np.asarray(phiq, dtype=_I64)
    nf, nm = coeffs.shape
    q = t.q
    d = int(exps[0].sum())
    if projection_key_bound(nf, q) >= 2**62:
        raise ValueError("projection keys would overflow int64 for this field")
    cq = int(np.nonzero(phiq)[0][0])
    rows_order = np.array([j for j in range(nf) if j != cq], dtype=np.intp)
    weights = np.zeros((nf - 1, nf - 1), dtype=_I64)
    for f in range(nf - 1):
        for j in range(f + 1, nf - 1):
            weights[f, j] = q ** (nf - 2 - (j - f))
    lead_w = q ** (nf - 2)

    out = np.zeros(plane_size(q), dtype=_I64)
    zs = np.arange(q, dtype=_I64)

    def project_block(vals, start):
        # vals: (nf, n) images of consecutive point codes
        n = vals.shape[1]
        zero_img = (vals == 0).all(axis=0)
        w = _vsub(t, vals, _vmul(t, np.repeat(vals[cq][None, :], nf, axis=0),
                                 phiq[:, None]))
        w5 = w[rows_order]
        nz = w5 != 0
        at_center = ~nz.any(axis=0)
        f = nz.argmax(axis=0)
        lead = w5[f, np.arange(n)]
        lead[lead == 0] = 1  # degenerate columns resolved by sentinels below
        w5n = _vmul(t, w5, t.inv[lead][None, :])
        wsel = weights[f].T  # (nf-1, n)
        key = f.astype(_I64) * lead_w
        key += (w5n * wsel).sum(axis=0)
        key[zero_img] = SENTINEL_ZERO_IMAGE
        key[at_center & ~zero_img] = SENTINEL_AT_CENTER
        out[start : start + n] = key

    block = max(1, 2_000_000 // q)
    for y0 in range(0, q, block):
        ys = np.arange(y0, min(y0 + block, q), dtype=_I64)
        vals = np.zeros((nf, len(ys) * q), dtype=_I64)
        for fidx in range(nf):
            g = _collapse_chart_a(t, coeffs[fidx], exps, d, ys)
            vals[fidx] = _horner_rows(t, g, zs).reshape(-1)
        project_block(vals, y0 * q)

    vals = np.zeros((nf, q), dtype=_I64)
    for fidx in range(nf):
        gb = np.zeros((1, d + 1), dtype=_I64)
        for j in range(nm):
            a, b, c = exps[j]
            if a == 0:
                gb[0, c] = coeffs[fidx, j]
        vals[fidx] = _horner_rows(t, gb, zs)[0]
    project_block(vals, q * q)

    last = np.zeros((nf, 1), dtype=_I64)
    for fidx in range(nf):
        for j in range(nm):
            a, b, c = exps[j]
            if a == 0 and b == 0:
                last[fidx, 0] = coeffs[fidx, j]
    project_block(last, q * q + q)
    return out


# ---------------------------------------------------------------------------
# subsystem scans


def _subsystem_chunk(t: FieldTables, nb, start, stop):
    """Packed coordinates (stop-start, nb) of subsystem member indices."""
    q = t.q
    idx = np.arange(start, stop, dtype=_I64)
    coords = np.zeros((len(idx), nb), dtype=_I64)
    off = 0
    for j in range(nb):
        block = q ** (nb - 1 - j)
        sel = (idx >= off) & (idx < off + block)
        if sel.any():
            c = idx[sel] - off
            coords[sel, j] = 1
            for tpos in range(nb - 1, j, -1):
                coords[sel, tpos] = c % q
                c = c // q
        off += block
    return coords


def scan_combo_zero_hits(vals, want, limit, max_hits, t: FieldTables):
    """Indices i < limit of subsystem members whose combination of the rows of
    `vals` vanishes at exactly `want` of the evaluation points."""
    vals = np.asarray(vals, dtype=_I64)
    nb, npts = vals.shape
    hits: list[int] = []
    chunk = max(1, 200_000 // max(npts, 1))
    for start in range(0, limit, chunk):
        stop = min(start + chunk, limit)
        lam = _subsystem_chunk(t, nb, start, stop)
        if t.k == 1:
            combo = (lam @ vals) % t.p
        else:
            acc = np.zeros((stop - start, npts, t.k), dtype=_I64)
            for s in range(nb):
                term = _vmul(t, lam[:, s][:, None], vals[s][None, :])
                acc += t.dig[term]
            combo = _repack(t, acc % t.p)
        counts = (combo == 0).sum(axis=1)
        for i in np.nonzero(counts == want)[0]:
            hits.append(start + int(i))
            if len(hits) >= max_hits:
                return np.array(hits, dtype=_I64)
    return np.array(hits, dtype=_I64)
