# cython: language_level=3
"""Compiled kernel backend: packed F_{p^k} arithmetic on int64 arrays.

Mirrors `pyref` operation for operation; outputs are bit-identical.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64

SENTINEL_ZERO_IMAGE = -1
SENTINEL_AT_CENTER = -2


cdef inline i64 fmul(i64 a, i64 b, i64[::1] logt, i64[::1] expt) noexcept nogil:
    if a == 0 or b == 0:
        return 0
    return expt[logt[a] + logt[b]]


cdef inline i64 fadd(i64 a, i64 b, i64 p, int k, i64[:, ::1] dig) noexcept nogil:
    cdef i64 r, d, w
    cdef int i
    if k == 1:
        r = a + b
        if r >= p:
            r -= p
        return r
    r = 0
    w = 1
    for i in range(k):
        d = dig[a, i] + dig[b, i]
        if d >= p:
            d -= p
        r += d * w
        w *= p
    return r


def rref_mod(mat, t):
    """Reduced row echelon form over F_{p^k}; returns (rref, pivot columns)."""
    m = np.array(mat, dtype=np.int64, order="C", copy=True)
    if m.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    cdef i64[:, ::1] M = m
    cdef i64[::1] logt = t.logt
    cdef i64[::1] expt = t.expt
    cdef i64[::1] inv = t.inv
    cdef i64[::1] neg = t.neg
    cdef i64[:, ::1] dig = t.dig
    cdef i64 p = t.p
    cdef int k = t.k
    cdef Py_ssize_t rows = M.shape[0], cols = M.shape[1]
    cdef Py_ssize_t pr = 0, col, i, j, piv
    cdef i64 lead, f, tmp
    pivots = []
    for col in range(cols):
        if pr == rows:
            break
        piv = -1
        for i in range(pr, rows):
            if M[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != pr:
            for j in range(cols):
                tmp = M[pr, j]
                M[pr, j] = M[piv, j]
                M[piv, j] = tmp
        lead = M[pr, col]
        if lead != 1:
            lead = inv[lead]
            for j in range(cols):
                M[pr, j] = fmul(M[pr, j], lead, logt, expt)
        for i in range(rows):
            f = M[i, col]
            if i != pr and f != 0:
                for j in range(cols):
                    M[i, j] = fadd(M[i, j], neg[fmul(M[pr, j], f, logt, expt)],
                                   p, k, dig)
        pivots.append(col)
        pr += 1
    return m, pivots


def eval_forms_at_points(coeffs, exps, pts, t):
    """Evaluate nf forms (shared monomial support) at a list of packed points."""
    cdef i64[:, ::1] C = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef i64[:, ::1] E = np.ascontiguousarray(exps, dtype=np.int64)
    cdef i64[:, ::1] P = np.ascontiguousarray(pts, dtype=np.int64).reshape(-1, 3)
    cdef i64[::1] logt = t.logt
    cdef i64[::1] expt = t.expt
    cdef i64[:, ::1] dig = t.dig
    cdef i64 p = t.p
    cdef int k = t.k
    cdef Py_ssize_t nf = C.shape[0], nm = C.shape[1], npts = P.shape[0]
    cdef int d = 0, e
    cdef Py_ssize_t s, j, f
    for j in range(3):
        d += <int> E[0, j]
    out = np.zeros((nf, npts), dtype=np.int64)
    cdef i64[:, ::1] O = out
    pw_arr = np.zeros((3, d + 1), dtype=np.int64)
    cdef i64[:, ::1] pw = pw_arr
    cdef i64 acc, mono
    for s in range(npts):
        for j in range(3):
            pw[j, 0] = 1
            for e in range(1, d + 1):
                pw[j, e] = fmul(pw[j, e - 1], P[s, j], logt, expt)
        for f in range(nf):
            acc = 0
            for j in range(nm):
                if C[f, j] == 0:
                    continue
                mono = fmul(fmul(pw[0, E[j, 0]], pw[1, E[j, 1]], logt, expt),
                            pw[2, E[j, 2]], logt, expt)
                acc = fadd(acc, fmul(C[f, j], mono, logt, expt), p, k, dig)
            O[f, s] = acc
    return out


def plane_form_values(coeffs, exps, t):
    """Values of one form at every plane point, in point-code order."""
    cdef i64[::1] C = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef i64[:, ::1] E = np.ascontiguousarray(exps, dtype=np.int64)
    cdef i64[::1] logt = t.logt
    cdef i64[::1] expt = t.expt
    cdef i64[:, ::1] dig = t.dig
    cdef i64 p = t.p, q = t.q
    cdef int k = t.k
    cdef Py_ssize_t nm = C.shape[0]
    cdef int d = <int> (E[0, 0] + E[0, 1] + E[0, 2])
    out = np.zeros(q * q + q + 1, dtype=np.int64)
    cdef i64[::1] O = out
    g_arr = np.zeros(d + 1, dtype=np.int64)
    cdef i64[::1] g = g_arr
    yp_arr = np.zeros(d + 1, dtype=np.int64)
    cdef i64[::1] ypow = yp_arr
    cdef i64 y, z, v
    cdef Py_ssize_t j
    cdef int c, e
    for y in range(q):
        ypow[0] = 1
        for e in range(1, d + 1):
            ypow[e] = fmul(ypow[e - 1], y, logt, expt)
        for c in range(d + 1):
            g[c] = 0
        for j in range(nm):
            if C[j] != 0:
                g[E[j, 2]] = fadd(g[E[j, 2]],
                                  fmul(C[j], ypow[E[j, 1]], logt, expt),
                                  p, k, dig)
        for z in range(q):
            v = g[d]
            for c in range(d - 1, -1, -1):
                v = fadd(fmul(v, z, logt, expt), g[c], p, k, dig)
            O[y * q + z] = v
    for c in range(d + 1):
        g[c] = 0
    for j in range(nm):
        if E[j, 0] == 0:
            g[E[j, 2]] = C[j]
    for z in range(q):
        v = g[d]
        for c in range(d - 1, -1, -1):
            v = fadd(fmul(v, z, logt, expt), g[c], p, k, dig)
        O[q * q + z] = v
    for j in range(nm):
        if E[j, 0] == 0 and E[j, 1] == 0:
            O[q * q + q] = C[j]
    return out


def plane_project_keys(coeffs, exps, phiq, t):
    """Projection keys of every plane point's image from the center phiq."""
    cdef i64[:, ::1] C = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef i64[:, ::1] E = np.ascontiguousarray(exps, dtype=np.int64)
    cdef i64[::1] PH = np.ascontiguousarray(phiq, dtype=np.int64)
    cdef i64[::1] logt = t.logt
    cdef i64[::1] expt = t.expt
    cdef i64[::1] inv = t.inv
    cdef i64[::1] neg = t.neg
    cdef i64[:, ::1] dig = t.dig
    cdef i64 p = t.p, q = t.q
    cdef int k = t.k
    cdef Py_ssize_t nf = C.shape[0], nm = C.shape[1]
    cdef int d = <int> (E[0, 0] + E[0, 1] + E[0, 2])
    if int(nf - 1) * int(q) ** int(nf - 2) >= 2**62:
        raise ValueError("projection keys would overflow int64 for this field")
    cdef Py_ssize_t cq = 0
    while PH[cq] == 0:
        cq += 1
    out = np.zeros(q * q + q + 1, dtype=np.int64)
    cdef i64[::1] O = out
    g_arr = np.zeros((nf, d + 1), dtype=np.int64)
    cdef i64[:, ::1] G = g_arr
    yp_arr = np.zeros(d + 1, dtype=np.int64)
    cdef i64[::1] ypow = yp_arr
    v_arr = np.zeros(nf, dtype=np.int64)
    cdef i64[::1] V = v_arr
    w_arr = np.zeros(nf, dtype=np.int64)
    cdef i64[::1] W = w_arr
    pw_arr = np.zeros(nf - 1, dtype=np.int64)
    cdef i64[::1] powq = pw_arr
    cdef int e, c, fslot
    cdef Py_ssize_t f, j, slot
    cdef i64 y, z, val, vc, lead, key, code
    cdef bint allzero
    powq[nf - 2] = 1
    for slot in range(nf - 3, -1, -1):
        powq[slot] = powq[slot + 1] * q

    # chart sweeps share the classification tail via an inline block
    for code in range(q * q + q + 1):
        if code < q * q:
            y = code // q
            z = code % q
            if z == 0:
                ypow[0] = 1
                for e in range(1, d + 1):
                    ypow[e] = fmul(ypow[e - 1], y, logt, expt)
                for f in range(nf):
                    for c in range(d + 1):
                        G[f, c] = 0
                    for j in range(nm):
                        if C[f, j] != 0:
                            G[f, E[j, 2]] = fadd(G[f, E[j, 2]],
                                                 fmul(C[f, j], ypow[E[j, 1]],
                                                      logt, expt),
                                                 p, k, dig)
            for f in range(nf):
                val = G[f, d]
                for c in range(d - 1, -1, -1):
                    val = fadd(fmul(val, z, logt, expt), G[f, c], p, k, dig)
                V[f] = val
        elif code < q * q + q:
            z = code - q * q
            if z == 0:
                for f in range(nf):
                    for c in range(d + 1):
                        G[f, c] = 0
                    for j in range(nm):
                        if E[j, 0] == 0:
                            G[f, E[j, 2]] = C[f, j]
            for f in range(nf):
                val = G[f, d]
                for c in range(d - 1, -1, -1):
                    val = fadd(fmul(val, z, logt, expt), G[f, c], p, k, dig)
                V[f] = val
        else:
            for f in range(nf):
                V[f] = 0
                for j in range(nm):
                    if E[j, 0] == 0 and E[j, 1] == 0:
                        V[f] = C[f, j]

        allzero = True
        for f in range(nf):
            if V[f] != 0:
                allzero = False
                break
        if allzero:
            O[code] = SENTINEL_ZERO_IMAGE
            continue
        vc = V[cq]
        slot = 0
        fslot = -1
        for f in range(nf):
            if f == cq:
                continue
            W[slot] = fadd(V[f], neg[fmul(vc, PH[f], logt, expt)], p, k, dig)
            if fslot < 0 and W[slot] != 0:
                fslot = <int> slot
            slot += 1
        if fslot < 0:
            O[code] = SENTINEL_AT_CENTER
            continue
        lead = inv[W[fslot]]
        key = (<i64> fslot) * powq[0]
        for slot in range(fslot + 1, nf - 1):
            key += fmul(W[slot], lead, logt, expt) * powq[slot - fslot]
        O[code] = key
    return out


def scan_combo_zero_hits(vals, want, limit, max_hits, t):
    """Indices i < limit of subsystem members whose combination of the rows of
    `vals` vanishes at exactly `want` of the evaluation points."""
    cdef i64[:, ::1] V = np.ascontiguousarray(vals, dtype=np.int64)
    cdef i64[::1] logt = t.logt
    cdef i64[::1] expt = t.expt
    cdef i64[:, ::1] dig = t.dig
    cdef i64 p = t.p, q = t.q
    cdef int k = t.k
    cdef Py_ssize_t nb = V.shape[0], npts = V.shape[1]
    cdef i64 lim = limit, wanted = want, cap = max_hits
    lam_arr = np.zeros(nb, dtype=np.int64)
    cdef i64[::1] lam = lam_arr
    cdef i64 index = 0, counter, block, acc, zcount
    cdef Py_ssize_t j, s, tpos
    cdef i64 rem
    hits = []
    for j in range(nb):
        block = 1
        for tpos in range(nb - 1 - j):
            block *= q
        if index >= lim:
            break
        for counter in range(block):
            if index >= lim:
                break
            for s in range(nb):
                lam[s] = 0
            lam[j] = 1
            rem = counter
            for tpos in range(nb - 1, j, -1):
                lam[tpos] = rem % q
                rem = rem // q
            zcount = 0
            for s in range(npts):
                acc = 0
                for tpos in range(j, nb):
                    acc = fadd(acc, fmul(lam[tpos], V[tpos, s], logt, expt),
                               p, k, dig)
                if acc == 0:
                    zcount += 1
            if zcount == wanted:
                hits.append(index)
                if len(hits) >= cap:
                    return np.array(hits, dtype=np.int64)
            index += 1
    return np.array(hits, dtype=np.int64)
