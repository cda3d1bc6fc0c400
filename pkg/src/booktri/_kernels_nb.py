"""Numba-compiled counting kernels.

Every function here has a twin with the same signature in ``_kernels_np``.
Rows are ``uint64`` bit masks, so these kernels cover ``n <= 64``.
"""
from __future__ import annotations

import numpy as np
from numba import njit, prange

_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)


@njit(inline="always")
def popcount(x):
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    return np.int64((x * _H01) >> _S56)


@njit(inline="always")
def lowbit_index(x):
    return popcount((x & (~x + _ONE)) - _ONE)


@njit(inline="always")
def above(v):
    """Mask of bit positions strictly greater than ``v``."""
    upto = (_ONE << np.uint64(v)) - _ONE
    upto = upto | (_ONE << np.uint64(v))
    return ~upto


@njit(cache=True, nogil=True)
def graph_stats(rows, n):
    """(e, t, book, k4, k4_iso3, sum of squared degrees) of one graph."""
    e2 = 0
    dsq = 0
    for v in range(n):
        d = popcount(rows[v])
        e2 += d
        dsq += d * d
    t = 0
    book = 0
    k4 = 0
    iso = 0
    for u in range(n):
        ru = rows[u]
        hv = ru & above(u)
        while hv != _ZERO:
            v = lowbit_index(hv)
            hv &= hv - _ONE
            rv = rows[v]
            common = ru & rv
            cd = popcount(common)
            if cd > book:
                book = cd
            hw = common & above(v)
            while hw != _ZERO:
                w = lowbit_index(hw)
                hw &= hw - _ONE
                rw = rows[w]
                t += 1
                k4 += popcount(common & rw & above(w))
                iso += n - popcount(ru | rv | rw)
    return e2 // 2, t, book, k4, iso, dsq


@njit(cache=True, nogil=True)
def bn_batch(rows_flat, offsets, ns):
    """Both sides of the Bollobas-Nikiforov inequality for a batch of graphs."""
    m = ns.shape[0]
    lhs = np.empty(m, dtype=np.int64)
    rhs = np.empty(m, dtype=np.int64)
    for i in range(m):
        n = ns[i]
        rows = rows_flat[offsets[i]:offsets[i] + n]
        e, t, book, k4, iso, dsq = graph_stats(rows, n)
        lhs[i] = (6 * t - dsq + n * e) * book
        rhs[i] = n * t + 8 * k4 + 2 * iso
    return lhs, rhs


# Tally columns for the exhaustive scan.
T_CHECKED, T_BN_VIOL, T_RAD_APPL, T_RAD_VIOL, T_EDW_APPL, T_EDW_VIOL = range(6)
N_TALLY = 6
CHECK_BN, CHECK_RAD, CHECK_EDW = 1, 2, 4


@njit(cache=True, nogil=True)
def _scan_range(n, edge_min, checks, lo, hi, pu, pv, tally, wit, max_wit):
    rows = np.zeros(n, dtype=np.uint64)
    hyp = (n * n) // 4 + 1
    half = n // 2
    nw = np.zeros(3, dtype=np.int64)
    for mask in range(lo, hi):
        pc = popcount(np.uint64(mask))
        if pc < edge_min:
            continue
        tally[T_CHECKED] += 1
        for v in range(n):
            rows[v] = _ZERO
        bits = np.uint64(mask)
        while bits != _ZERO:
            idx = lowbit_index(bits)
            bits &= bits - _ONE
            a = pu[idx]
            c = pv[idx]
            rows[a] |= _ONE << np.uint64(c)
            rows[c] |= _ONE << np.uint64(a)
        e, t, book, k4, iso, dsq = graph_stats(rows, n)
        if checks & CHECK_BN:
            if (6 * t - dsq + n * e) * book < n * t + 8 * k4 + 2 * iso:
                tally[T_BN_VIOL] += 1
                if nw[0] < max_wit:
                    wit[0, nw[0]] = mask
                    nw[0] += 1
        if pc >= hyp:
            if checks & CHECK_RAD:
                tally[T_RAD_APPL] += 1
                if t < half:
                    tally[T_RAD_VIOL] += 1
                    if nw[1] < max_wit:
                        wit[1, nw[1]] = mask
                        nw[1] += 1
            if checks & CHECK_EDW:
                tally[T_EDW_APPL] += 1
                if 6 * book < n:
                    tally[T_EDW_VIOL] += 1
                    if nw[2] < max_wit:
                        wit[2, nw[2]] = mask
                        nw[2] += 1


@njit(cache=True, parallel=True)
def exhaustive_chunks(n, edge_min, checks, starts, ends, pu, pv, max_wit):
    """Scan edge masks chunk by chunk; returns per-chunk tallies and witnesses."""
    nchunks = starts.shape[0]
    tallies = np.zeros((nchunks, N_TALLY), dtype=np.int64)
    wits = np.full((nchunks, 3, max_wit), -1, dtype=np.int64)
    for c in prange(nchunks):
        _scan_range(n, edge_min, checks, starts[c], ends[c], pu, pv,
                    tallies[c], wits[c], max_wit)
    return tallies, wits


@njit(cache=True, nogil=True)
def blowup_scan(n, bs, max_keep, a1_lo, a1_hi):
    """Scan the 6-part compositions of ``n`` with a1 in [a1_lo, a1_hi).

    Each book bound in ``bs`` gets its own tallies.
    Returns (scanned, admissible, min_t, n_min, minimizers, n_zero, zero_vecs);
    min_t is -1 when no admissible vector has a triangle.  Vectors come
    out in lexicographic order, so chunk results concatenate in order.
    """
    nb = bs.shape[0]
    floor_ = (n * n) // 4
    admissible = np.zeros(nb, dtype=np.int64)
    min_t = np.full(nb, -1, dtype=np.int64)
    n_min = np.zeros(nb, dtype=np.int64)
    mins = np.zeros((nb, max_keep, 6), dtype=np.int64)
    n_zero = np.zeros(nb, dtype=np.int64)
    zeros = np.zeros((nb, max_keep, 6), dtype=np.int64)
    scanned = 0
    for a1 in range(a1_lo, min(a1_hi, n + 1)):
        for a2 in range(n - a1 + 1):
            for a3 in range(n - a1 - a2 + 1):
                for a4 in range(n - a1 - a2 - a3 + 1):
                    for a5 in range(n - a1 - a2 - a3 - a4 + 1):
                        a6 = n - a1 - a2 - a3 - a4 - a5
                        scanned += 1
                        s = (a1 * a2 + a2 * a3 + a1 * a3 + a1 * a4 + a2 * a5
                             + a3 * a6 + a4 * a5 + a5 * a6 + a4 * a6)
                        if s < floor_:
                            continue
                        t = a1 * a2 * a3 + a4 * a5 * a6
                        book = 0
                        if a1 > 0 and a2 > 0 and a3 > book:
                            book = a3
                        if a2 > 0 and a3 > 0 and a1 > book:
                            book = a1
                        if a1 > 0 and a3 > 0 and a2 > book:
                            book = a2
                        if a4 > 0 and a5 > 0 and a6 > book:
                            book = a6
                        if a5 > 0 and a6 > 0 and a4 > book:
                            book = a4
                        if a4 > 0 and a6 > 0 and a5 > book:
                            book = a5
                        for i in range(nb):
                            if book > bs[i]:
                                continue
                            admissible[i] += 1
                            if t == 0:
                                if n_zero[i] < max_keep:
                                    _put(zeros, i, n_zero[i], a1, a2, a3, a4, a5, a6)
                                n_zero[i] += 1
                                continue
                            if min_t[i] < 0 or t < min_t[i]:
                                min_t[i] = t
                                n_min[i] = 0
                            if t == min_t[i]:
                                if n_min[i] < max_keep:
                                    _put(mins, i, n_min[i], a1, a2, a3, a4, a5, a6)
                                n_min[i] += 1
    return scanned, admissible, min_t, n_min, mins, n_zero, zeros


@njit(inline="always")
def _put(buf, i, j, a1, a2, a3, a4, a5, a6):
    buf[i, j, 0] = a1
    buf[i, j, 1] = a2
    buf[i, j, 2] = a3
    buf[i, j, 3] = a4
    buf[i, j, 4] = a5
    buf[i, j, 5] = a6


# Annealer state slots.
S_E, S_T, S_OVER, S_BEST, S_HITS, S_ACC, S_AUDITS, S_BAD = range(8)


@njit(cache=True, nogil=True)
def recount(adj, codeg, b):
    """Full recount of (e, t, total codegree excess) and the codegree table."""
    n = adj.shape[0]
    e = 0
    t = 0
    over = 0
    for u in range(n):
        for v in range(n):
            c = 0
            if u != v:
                for w in range(n):
                    c += adj[u, w] & adj[v, w]
            codeg[u, v] = c
    for u in range(n):
        for v in range(u + 1, n):
            if adj[u, v]:
                e += 1
                t += codeg[u, v]
                if codeg[u, v] > b:
                    over += codeg[u, v] - b
    return e, t // 3, over


@njit(inline="always")
def _flip_delta(adj, codeg, u, v, b):
    """(dt, dover) for toggling uv; ``over`` is the total codegree excess
    sum of max(0, codeg - b) over edges."""
    n = adj.shape[0]
    cuv = codeg[u, v]
    exc = cuv - b if cuv > b else 0
    if adj[u, v]:
        dt = -cuv
        dover = -exc
        for w in range(n):
            if adj[u, w] and adj[v, w]:
                if codeg[u, w] > b:
                    dover -= 1
                if codeg[v, w] > b:
                    dover -= 1
    else:
        dt = cuv
        dover = exc
        for w in range(n):
            if adj[u, w] and adj[v, w]:
                if codeg[u, w] >= b:
                    dover += 1
                if codeg[v, w] >= b:
                    dover += 1
    return dt, dover


@njit(inline="always")
def _apply_flip(adj, codeg, u, v):
    n = adj.shape[0]
    sign = -1 if adj[u, v] else 1
    for w in range(n):
        if w != u and adj[v, w]:
            codeg[u, w] += sign
            codeg[w, u] += sign
        if w != v and adj[u, w]:
            codeg[v, w] += sign
            codeg[w, v] += sign
    adj[u, v] = 1 - adj[u, v]
    adj[v, u] = adj[u, v]


@njit(cache=True, nogil=True)
def anneal_block(adj, codeg, state, best_adj, pu, pv, picks, partner, thresh,
                 k0, hard_from, b, emin, penalty, audit_mask, scratch):
    """Run ``picks.shape[0]`` annealing steps in place.

    Step k toggles pair ``picks[k]``, or, when ``partner[k] >= 0``, swaps an
    edge for a non-edge among the two pairs (e is unchanged).  ``thresh[k]``
    is ``-T_k * log(u_k)`` and ``penalty[k]`` the weight on codegree excess:
    a move with energy change ``d = dt + penalty[k] * dover`` is taken when
    ``d <= 0`` or ``d < thresh[k]``.
    """
    n = adj.shape[0]
    for k in range(picks.shape[0]):
        step = k0 + k
        if (step & audit_mask) == 0:
            state[S_AUDITS] += 1
            re, rt, rover = recount(adj, scratch, b)
            if re != state[S_E] or rt != state[S_T] or rover != state[S_OVER]:
                state[S_BAD] += 1
            else:
                same = True
                for x in range(n):
                    for y in range(n):
                        if scratch[x, y] != codeg[x, y]:
                            same = False
                if not same:
                    state[S_BAD] += 1
        p = picks[k]
        q = partner[k]
        e = state[S_E]
        t = state[S_T]
        over = state[S_OVER]
        if q < 0:
            u = pu[p]
            v = pv[p]
            de = -1 if adj[u, v] else 1
            if e + de < emin:
                continue
            dt, dover = _flip_delta(adj, codeg, u, v, b)
            ru = -1
            rv = -1
        else:
            if adj[pu[p], pv[p]] == adj[pu[q], pv[q]]:
                continue
            if adj[pu[p], pv[p]]:
                ru, rv, u, v = pu[p], pv[p], pu[q], pv[q]
            else:
                ru, rv, u, v = pu[q], pv[q], pu[p], pv[p]
            de = 0
            dt1, dov1 = _flip_delta(adj, codeg, ru, rv, b)
            _apply_flip(adj, codeg, ru, rv)
            dt, dover = _flip_delta(adj, codeg, u, v, b)
            dt += dt1
            dover += dov1
        new_t = t + dt
        new_over = over + dover
        reject = False
        if new_t == 0:
            state[S_HITS] += 1
            reject = True
        elif step >= hard_from and over == 0 and new_over > 0:
            reject = True
        else:
            d = dt + penalty[k] * dover
            if d > 0 and not (d < thresh[k]):
                reject = True
        if reject:
            if ru >= 0:
                _apply_flip(adj, codeg, ru, rv)
            continue
        _apply_flip(adj, codeg, u, v)
        state[S_E] = e + de
        state[S_T] = new_t
        state[S_OVER] = new_over
        state[S_ACC] += 1
        if new_over == 0 and (state[S_BEST] < 0 or new_t < state[S_BEST]):
            state[S_BEST] = new_t
            best_adj[:, :] = adj
