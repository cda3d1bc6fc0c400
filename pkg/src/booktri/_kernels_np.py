"""Pure-numpy twins of the kernels in ``_kernels_nb``.

Same signatures, same outputs, same iteration order wherever order is
observable (witness lists, minimizer lists, annealer decisions).
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

T_CHECKED, T_BN_VIOL, T_RAD_APPL, T_RAD_VIOL, T_EDW_APPL, T_EDW_VIOL = range(6)
N_TALLY = 6
CHECK_BN, CHECK_RAD, CHECK_EDW = 1, 2, 4

S_E, S_T, S_OVER, S_BEST, S_HITS, S_ACC, S_AUDITS, S_BAD = range(8)

_BATCH = 1 << 12


def _popcount64(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    x -= (x >> np.uint64(1)) & np.uint64(0x5555555555555555)
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return ((x * np.uint64(0x0101010101010101)) >> np.uint64(56)).astype(np.int64)


def rows_to_matrix(rows: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n, dtype=np.uint64)
    return ((rows[:n, None] >> shifts[None, :]) & np.uint64(1)).astype(np.int64)


def _stats_batch(A: np.ndarray):
    """Invariants of a stack of adjacency matrices ``A`` with shape (B, n, n)."""
    n = A.shape[1]
    deg = A.sum(axis=2)
    e = deg.sum(axis=1) // 2
    dsq = (deg * deg).sum(axis=1)
    co = A @ A
    t = np.einsum("bij,bji->b", co, A) // 6
    book = (co * A).reshape(A.shape[0], -1).max(axis=1) if n > 1 else np.zeros(A.shape[0], np.int64)
    # P[b,u,v,w] = A_uw A_vw ; triangles through uv are P[b,u,v,w] * A_uv
    P = A[:, :, None, :] * A[:, None, :, :]
    in_common = np.einsum("buvw,bwx,buvx->buv", P, A, P)
    k4 = (in_common * A).sum(axis=(1, 2)) // 24
    B = 1 - A
    Q = B[:, :, None, :] * B[:, None, :, :]
    Y = np.einsum("buvx,bwx->buvw", Q, B)
    iso = (A[:, :, :, None] * P * Y).sum(axis=(1, 2, 3)) // 6
    return e, t, book, k4, iso, dsq


def graph_stats(rows, n):
    """(e, t, book, k4, k4_iso3, sum of squared degrees) of one graph."""
    A = rows_to_matrix(np.asarray(rows, dtype=np.uint64), n)[None]
    return tuple(int(x[0]) for x in _stats_batch(A))


def bn_batch(rows_flat, offsets, ns):
    m = ns.shape[0]
    lhs = np.empty(m, dtype=np.int64)
    rhs = np.empty(m, dtype=np.int64)
    for i in range(m):
        n = int(ns[i])
        e, t, book, k4, iso, dsq = graph_stats(rows_flat[offsets[i]:offsets[i] + n], n)
        lhs[i] = (6 * t - dsq + n * e) * book
        rhs[i] = n * t + 8 * k4 + 2 * iso
    return lhs, rhs


def _scan_range(n, edge_min, checks, lo, hi, pu, pv, tally, wit, max_wit):
    hyp = (n * n) // 4 + 1
    half = n // 2
    nw = [0, 0, 0]
    npairs = pu.shape[0]
    idx = np.arange(npairs, dtype=np.uint64)
    for start in range(lo, hi, _BATCH):
        masks = np.arange(start, min(start + _BATCH, hi), dtype=np.int64)
        pc = _popcount64(masks.astype(np.uint64))
        keep = pc >= edge_min
        masks, pc = masks[keep], pc[keep]
        if masks.size == 0:
            continue
        tally[T_CHECKED] += masks.size
        bits = ((masks.astype(np.uint64)[:, None] >> idx[None, :]) & np.uint64(1)).astype(np.int64)
        A = np.zeros((masks.size, n, n), dtype=np.int64)
        A[:, pu, pv] = bits
        A[:, pv, pu] = bits
        e, t, book, k4, iso, dsq = _stats_batch(A)
        flags = []
        if checks & CHECK_BN:
            bad = (6 * t - dsq + n * e) * book < n * t + 8 * k4 + 2 * iso
            tally[T_BN_VIOL] += int(bad.sum())
            flags.append((0, bad))
        app = pc >= hyp
        if checks & CHECK_RAD:
            tally[T_RAD_APPL] += int(app.sum())
            bad = app & (t < half)
            tally[T_RAD_VIOL] += int(bad.sum())
            flags.append((1, bad))
        if checks & CHECK_EDW:
            tally[T_EDW_APPL] += int(app.sum())
            bad = app & (6 * book < n)
            tally[T_EDW_VIOL] += int(bad.sum())
            flags.append((2, bad))
        for slot, bad in flags:
            for m in masks[bad][: max(0, max_wit - nw[slot])]:
                wit[slot, nw[slot]] = m
                nw[slot] += 1


def exhaustive_chunks(n, edge_min, checks, starts, ends, pu, pv, max_wit):
    nchunks = starts.shape[0]
    tallies = np.zeros((nchunks, N_TALLY), dtype=np.int64)
    wits = np.full((nchunks, 3, max_wit), -1, dtype=np.int64)
    for c in range(nchunks):
        _scan_range(n, edge_min, checks, int(starts[c]), int(ends[c]), pu, pv,
                    tallies[c], wits[c], max_wit)
    return tallies, wits


@lru_cache(maxsize=None)
def compositions(n: int, k: int) -> np.ndarray:
    """All compositions of ``n`` into ``k`` ordered parts, lexicographic."""
    if k == 1:
        return np.array([[n]], dtype=np.int64)
    blocks = []
    for first in range(n + 1):
        rest = compositions(n - first, k - 1)
        head = np.full((rest.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([head, rest]))
    return np.vstack(blocks)


def blowup_scan(n, bs, max_keep, a1_lo, a1_hi):
    a = compositions(int(n), 6)
    a = a[(a[:, 0] >= a1_lo) & (a[:, 0] < a1_hi)]
    a1, a2, a3, a4, a5, a6 = a.T
    s = a1 * a2 + a2 * a3 + a1 * a3 + a1 * a4 + a2 * a5 + a3 * a6 + a4 * a5 + a5 * a6 + a4 * a6
    t = a1 * a2 * a3 + a4 * a5 * a6
    book = np.zeros(a.shape[0], dtype=np.int64)
    for (x, y, z) in ((a1, a2, a3), (a2, a3, a1), (a1, a3, a2),
                      (a4, a5, a6), (a5, a6, a4), (a4, a6, a5)):
        book = np.maximum(book, np.where((x > 0) & (y > 0), z, 0))
    dense = s >= (n * n) // 4
    nb = bs.shape[0]
    admissible = np.zeros(nb, dtype=np.int64)
    min_t = np.full(nb, -1, dtype=np.int64)
    n_min = np.zeros(nb, dtype=np.int64)
    mins = np.zeros((nb, max_keep, 6), dtype=np.int64)
    n_zero = np.zeros(nb, dtype=np.int64)
    zeros = np.zeros((nb, max_keep, 6), dtype=np.int64)
    for i in range(nb):
        ok = dense & (book <= bs[i])
        admissible[i] = ok.sum()
        z = ok & (t == 0)
        n_zero[i] = z.sum()
        zv = a[z][:max_keep]
        zeros[i, : zv.shape[0]] = zv
        pos = ok & (t > 0)
        if pos.any():
            mt = t[pos].min()
            hit = pos & (t == mt)
            min_t[i] = mt
            n_min[i] = hit.sum()
            mv = a[hit][:max_keep]
            mins[i, : mv.shape[0]] = mv
    return a.shape[0], admissible, min_t, n_min, mins, n_zero, zeros


def recount(adj, codeg, b):
    A = adj.astype(np.int64)
    co = A @ A
    np.fill_diagonal(co, 0)
    codeg[:, :] = co
    upper = np.triu(A, 1).astype(bool)
    e = int(upper.sum())
    t = int(co[upper].sum()) // 3
    over = int(np.maximum(co[upper] - b, 0).sum())
    return e, t, over


def _flip_delta(adj, codeg, u, v, b):
    cuv = int(codeg[u, v])
    exc = max(0, cuv - b)
    common = (adj[u] & adj[v]).astype(bool)
    if adj[u, v]:
        return -cuv, -exc - int((codeg[u, common] > b).sum()) - int((codeg[v, common] > b).sum())
    return cuv, exc + int((codeg[u, common] >= b).sum()) + int((codeg[v, common] >= b).sum())


def _apply_flip(adj, codeg, u, v):
    sign = -1 if adj[u, v] else 1
    nv = adj[v].astype(bool)
    nv[u] = False
    nu = adj[u].astype(bool)
    nu[v] = False
    codeg[u, nv] += sign
    codeg[nv, u] += sign
    codeg[v, nu] += sign
    codeg[nu, v] += sign
    adj[u, v] = adj[v, u] = 1 - adj[u, v]


def anneal_block(adj, codeg, state, best_adj, pu, pv, picks, partner, thresh,
                 k0, hard_from, b, emin, penalty, audit_mask, scratch):
    for k in range(picks.shape[0]):
        step = k0 + k
        if (step & audit_mask) == 0:
            state[S_AUDITS] += 1
            re, rt, rover = recount(adj, scratch, b)
            if (re, rt, rover) != (state[S_E], state[S_T], state[S_OVER]) \
                    or not np.array_equal(scratch, codeg):
                state[S_BAD] += 1
        p, q = int(picks[k]), int(partner[k])
        e, t, over = int(state[S_E]), int(state[S_T]), int(state[S_OVER])
        rem = None
        if q < 0:
            u, v = int(pu[p]), int(pv[p])
            de = -1 if adj[u, v] else 1
            if e + de < emin:
                continue
            dt, dover = _flip_delta(adj, codeg, u, v, b)
        else:
            if adj[pu[p], pv[p]] == adj[pu[q], pv[q]]:
                continue
            if not adj[pu[p], pv[p]]:
                p, q = q, p
            rem = (int(pu[p]), int(pv[p]))
            u, v = int(pu[q]), int(pv[q])
            de = 0
            dt1, dov1 = _flip_delta(adj, codeg, *rem, b)
            _apply_flip(adj, codeg, *rem)
            dt, dover = _flip_delta(adj, codeg, u, v, b)
            dt += dt1
            dover += dov1
        new_t = t + dt
        new_over = over + dover
        if new_t == 0:
            state[S_HITS] += 1
            reject = True
        elif step >= hard_from and over == 0 and new_over > 0:
            reject = True
        else:
            d = dt + penalty[k] * dover
            reject = d > 0 and not (d < thresh[k])
        if reject:
            if rem is not None:
                _apply_flip(adj, codeg, *rem)
            continue
        _apply_flip(adj, codeg, u, v)
        state[S_E] = e + de
        state[S_T] = new_t
        state[S_OVER] = new_over
        state[S_ACC] += 1
        if new_over == 0 and (state[S_BEST] < 0 or new_t < state[S_BEST]):
            state[S_BEST] = new_t
            best_adj[:, :] = adj
