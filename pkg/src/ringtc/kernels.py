"""Numba kernels for sector-local Hamiltonian action and sparse assembly.

All kernels operate on a sector basis given as a lexicographically sorted
int16 occupation matrix plus its int64 row keys (see fock._key_powers).  The
contact interaction conserves total momentum, so every generated target state
lies inside the same sector and key lookup cannot miss.

The interaction enumeration walks ordered mode pairs (m, n) annihilated and
(k, l) created with k + l = m + n; amplitudes are the usual bosonic
sqrt-factor chains for the normal-ordered string adag_k adag_l a_m a_n.
"""

import numpy as np
from numba import njit

__all__ = [
    "interaction_matvec",
    "interaction_csr_count",
    "interaction_csr_fill",
]


@njit(cache=True, inline="always")
def _key_index(keys, key):
    """Binary search in a sorted int64 key array; -1 if absent."""
    lo = 0
    hi = keys.shape[0]
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < keys.shape[0] and keys[lo] == key:
        return lo
    return -1


@njit(cache=True, inline="always")
def _row_terms(occ, keys, pows, row, idx_buf, amp_buf):
    """Enumerate interaction terms from one basis row.

    Fills idx_buf/amp_buf with (target ordinal, sqrt-factor amplitude) for
    every ordered (m, n, k) combination; duplicate targets are allowed and
    summed by callers.  Returns the number of terms emitted.
    """
    w = occ.shape[1]
    key0 = keys[row]
    cnt = 0
    for jn in range(w):
        fn = occ[row, jn]
        if fn == 0:
            continue
        for jm in range(w):
            fm = occ[row, jm]
            if jm == jn:
                fm -= 1
            if fm <= 0:
                continue
            sj = jm + jn
            jk_lo = sj - (w - 1)
            if jk_lo < 0:
                jk_lo = 0
            jk_hi = sj
            if jk_hi > w - 1:
                jk_hi = w - 1
            for jk in range(jk_lo, jk_hi + 1):
                jl = sj - jk
                fl = occ[row, jl] + 1
                if jl == jn:
                    fl -= 1
                if jl == jm:
                    fl -= 1
                fk = occ[row, jk] + 1
                if jk == jn:
                    fk -= 1
                if jk == jm:
                    fk -= 1
                if jk == jl:
                    fk += 1
                key = key0 - pows[jn] - pows[jm] + pows[jl] + pows[jk]
                t = _key_index(keys, key)
                if t >= 0:
                    idx_buf[cnt] = t
                    amp_buf[cnt] = np.sqrt(
                        np.float64(fn) * np.float64(fm) * np.float64(fl) * np.float64(fk)
                    )
                    cnt += 1
    return cnt


@njit(cache=True)
def interaction_matvec(occ, keys, pows, g_half, psi, out):
    """out += g_half * V @ psi, matrix-free (V real symmetric).

    Uses the gather form: V[i, t] equals the amplitude enumerated from row i
    toward target t, so each output entry is accumulated independently with a
    fixed summation order (bitwise deterministic).
    """
    dim, w = occ.shape
    nbuf = w * w * w
    idx_buf = np.empty(nbuf, np.int64)
    amp_buf = np.empty(nbuf, np.float64)
    for i in range(dim):
        c = _row_terms(occ, keys, pows, i, idx_buf, amp_buf)
        acc = 0.0j
        for t in range(c):
            acc += amp_buf[t] * psi[idx_buf[t]]
        out[i] += g_half * acc


@njit(cache=True)
def interaction_csr_count(occ, keys, pows):
    """Distinct interaction targets per row (CSR counting pass)."""
    dim, w = occ.shape
    nbuf = w * w * w
    idx_buf = np.empty(nbuf, np.int64)
    amp_buf = np.empty(nbuf, np.float64)
    seen = np.full(dim, -1, np.int64)
    counts = np.zeros(dim, np.int64)
    for i in range(dim):
        c = _row_terms(occ, keys, pows, i, idx_buf, amp_buf)
        k = 0
        for t in range(c):
            j = idx_buf[t]
            if seen[j] != i:
                seen[j] = i
                k += 1
        counts[i] = k
    return counts


@njit(cache=True)
def interaction_csr_fill(occ, keys, pows, g_half, indptr, indices, data):
    """Fill CSR arrays for the interaction block (duplicates merged)."""
    dim, w = occ.shape
    nbuf = w * w * w
    idx_buf = np.empty(nbuf, np.int64)
    amp_buf = np.empty(nbuf, np.float64)
    scratch = np.zeros(dim, np.float64)
    seen = np.full(dim, -1, np.int64)
    local = np.empty(nbuf, np.int64)
    for i in range(dim):
        c = _row_terms(occ, keys, pows, i, idx_buf, amp_buf)
        nloc = 0
        for t in range(c):
            j = idx_buf[t]
            if seen[j] != i:
                seen[j] = i
                local[nloc] = j
                nloc += 1
                scratch[j] = 0.0
            scratch[j] += amp_buf[t]
        p = indptr[i]
        for t in range(nloc):
            j = local[t]
            indices[p] = j
            data[p] = g_half * scratch[j]
            p += 1
