"""Hot loops of the package: modular row reduction and normal forms.

Every kernel has a numba version and a pure-numpy version with identical
output.  The numba path is used when numba imports and
``NSPCHECK_DISABLE_NUMBA`` is unset; ``BACKEND`` tells which one is live.

Reduction is lazy: rows are only reduced mod p where a value is read, so the
inner update is a plain int64 multiply-subtract.  With p < 2**20 and at most a
million updates per row the accumulated magnitude stays below 2**63.
"""

from __future__ import annotations

import numpy as np

from ._config import numba_requested

try:  # pragma: no cover - exercised through BACKEND
    if not numba_requested():
        raise ImportError("numba disabled by NSPCHECK_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _modinv_py(a: int, p: int) -> int:
    p = int(p)
    return pow(int(a), p - 2, p)


# --------------------------------------------------------------------------
# numpy reference implementations


def echelon_numpy(rows: np.ndarray, p: int, cap: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-echelon basis of the row space of ``rows`` (left-looking).

    Rows are consumed in order; each is reduced against the basis found so far
    and kept if a nonzero remains.  Stops once ``cap`` basis rows exist.
    Returned basis rows are monic at their pivot and reduced mod p.
    """
    m, n = rows.shape
    limit = min(cap, m, n)
    basis = np.zeros((limit, n), dtype=np.int64)
    pivots = np.zeros(limit, dtype=np.int64)
    piv_row = np.full(n, -1, dtype=np.int64)
    r = 0
    for i in range(m):
        if r >= limit:
            break
        w = rows[i].astype(np.int64) % p
        while True:
            nz = np.flatnonzero(w)
            if nz.size == 0:
                lead = -1
                break
            c = nz[0]
            b = piv_row[c]
            if b < 0:
                lead = c
                break
            w[c:] = (w[c:] - w[c] * basis[b, c:]) % p
        if lead < 0:
            continue
        inv = _modinv_py(w[lead], p)
        basis[r] = (w * inv) % p
        pivots[r] = lead
        piv_row[lead] = r
        r += 1
    return basis[:r], pivots[:r]


def back_substitute_numpy(basis: np.ndarray, pivots: np.ndarray, free: np.ndarray, p: int) -> np.ndarray:
    """Columns ``free`` of the reduced echelon form of an echelon basis.

    ``basis`` must be sorted by increasing pivot.  Since reduced rows vanish on
    every other pivot column, row i of the result is
    basis[i, free] - sum_{k>i} basis[i, pivots[k]] * result[k].
    """
    r = basis.shape[0]
    out = np.zeros((r, free.size), dtype=np.int64)
    for i in range(r - 1, -1, -1):
        acc = basis[i, free].copy()
        if i + 1 < r:
            coef = basis[i, pivots[i + 1:]]
            acc = acc - coef @ out[i + 1:]
        out[i] = acc % p
    return out


def normal_forms_numpy(order: np.ndarray, std_pos: np.ndarray, term_idx: np.ndarray,
                       term_coef: np.ndarray, nstd: int, p: int) -> np.ndarray:
    """Normal forms of all monomials of one graded piece modulo a single form.

    ``order`` lists monomial indices in increasing monomial order.  A monomial
    with ``std_pos[m] >= 0`` is standard; otherwise its normal form is
    sum_t term_coef[t] * NF(term_idx[m, t]) where every referenced monomial is
    strictly smaller.
    """
    N = std_pos.size
    nf = np.zeros((N, nstd), dtype=np.int64)
    for m in order:
        s = std_pos[m]
        if s >= 0:
            nf[m, s] = 1
        else:
            acc = np.zeros(nstd, dtype=np.int64)
            for t in range(term_idx.shape[1]):
                acc += term_coef[t] * nf[term_idx[m, t]]
            nf[m] = acc % p
    return nf


# --------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _modinv_nb(a, p):
        t, new_t = 0, 1
        r, new_r = p, a % p
        while new_r != 0:
            q = r // new_r
            t, new_t = new_t, t - q * new_t
            r, new_r = new_r, r - q * new_r
        if t < 0:
            t += p
        return t

    @njit(cache=True, nogil=True)
    def echelon_numba(rows, p, cap):
        m, n = rows.shape
        limit = min(cap, m, n)
        basis = np.zeros((limit, n), dtype=np.int64)
        pivots = np.zeros(limit, dtype=np.int64)
        piv_row = np.full(n, -1, dtype=np.int64)
        w = np.empty(n, dtype=np.int64)
        r = 0
        for i in range(m):
            if r >= limit:
                break
            for k in range(n):
                w[k] = rows[i, k]
            lead = -1
            for c in range(n):
                x = w[c] % p
                if x == 0:
                    continue
                b = piv_row[c]
                if b < 0:
                    lead = c
                    break
                for k in range(c, n):
                    w[k] -= x * basis[b, k]
            if lead < 0:
                continue
            inv = _modinv_nb(w[lead] % p, p)
            for k in range(lead, n):
                basis[r, k] = ((w[k] % p) * inv) % p
            pivots[r] = lead
            piv_row[lead] = r
            r += 1
        return basis[:r], pivots[:r]

    @njit(cache=True, nogil=True)
    def back_substitute_numba(basis, pivots, free, p):
        r = basis.shape[0]
        f = free.shape[0]
        out = np.zeros((r, f), dtype=np.int64)
        for i in range(r - 1, -1, -1):
            for q in range(f):
                out[i, q] = basis[i, free[q]]
            for k in range(i + 1, r):
                c = basis[i, pivots[k]]
                if c == 0:
                    continue
                for q in range(f):
                    out[i, q] -= c * out[k, q]
            for q in range(f):
                out[i, q] %= p
        return out

    @njit(cache=True, nogil=True)
    def normal_forms_numba(order, std_pos, term_idx, term_coef, nstd, p):
        N = std_pos.shape[0]
        nf = np.zeros((N, nstd), dtype=np.int64)
        T = term_idx.shape[1]
        for a in range(order.shape[0]):
            m = order[a]
            s = std_pos[m]
            if s >= 0:
                nf[m, s] = 1
                continue
            for t in range(T):
                c = term_coef[t]
                src = term_idx[m, t]
                for q in range(nstd):
                    nf[m, q] += c * nf[src, q]
            for q in range(nstd):
                nf[m, q] %= p
        return nf


if HAVE_NUMBA:
    BACKEND = "numba"
    _echelon = echelon_numba
    _back_substitute = back_substitute_numba
    _normal_forms = normal_forms_numba
else:
    BACKEND = "numpy"
    _echelon = echelon_numpy
    _back_substitute = back_substitute_numpy
    _normal_forms = normal_forms_numpy


def echelon(rows: np.ndarray, p: int, cap: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    if cap is None:
        cap = min(rows.shape)
    return _echelon(rows, np.int64(p), np.int64(cap))


def back_substitute(basis: np.ndarray, pivots: np.ndarray, free: np.ndarray, p: int) -> np.ndarray:
    return _back_substitute(np.ascontiguousarray(basis, dtype=np.int64),
                            np.ascontiguousarray(pivots, dtype=np.int64),
                            np.ascontiguousarray(free, dtype=np.int64), np.int64(p))


def normal_forms(order, std_pos, term_idx, term_coef, nstd: int, p: int) -> np.ndarray:
    return _normal_forms(np.ascontiguousarray(order, dtype=np.int64),
                         np.ascontiguousarray(std_pos, dtype=np.int64),
                         np.ascontiguousarray(term_idx, dtype=np.int64),
                         np.ascontiguousarray(term_coef, dtype=np.int64),
                         np.int64(nstd), np.int64(p))
