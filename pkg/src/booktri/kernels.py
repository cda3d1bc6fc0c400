"""Kernel dispatch: numba when available and enabled, numpy otherwise."""
from __future__ import annotations

import numpy as np

from . import _accel
from . import _kernels_np as np_backend

if _accel.USE_NUMBA:
    from . import _kernels_nb as backend
else:
    backend = np_backend

BACKEND = _accel.BACKEND

T_CHECKED, T_BN_VIOL, T_RAD_APPL, T_RAD_VIOL, T_EDW_APPL, T_EDW_VIOL = range(6)
CHECK_BN, CHECK_RAD, CHECK_EDW = 1, 2, 4
S_E, S_T, S_OVER, S_BEST, S_HITS, S_ACC, S_AUDITS, S_BAD = range(8)


def pair_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertex pairs in graph6 bit order: (0,1), (0,2), (1,2), (0,3), ..."""
    pu, pv = [], []
    for j in range(1, n):
        for i in range(j):
            pu.append(i)
            pv.append(j)
    return np.array(pu, dtype=np.int64), np.array(pv, dtype=np.int64)


def graph_stats(rows: np.ndarray, n: int) -> tuple[int, ...]:
    return tuple(int(x) for x in backend.graph_stats(rows, n))


def bn_batch(rows_flat, offsets, ns):
    return backend.bn_batch(rows_flat, offsets, ns)


def exhaustive_chunks(n, edge_min, checks, starts, ends, max_wit):
    pu, pv = pair_index(n)
    return backend.exhaustive_chunks(n, edge_min, checks, starts, ends, pu, pv, max_wit)


def blowup_scan(n: int, bs, max_keep: int, a1_lo: int = 0, a1_hi: int | None = None):
    hi = n + 1 if a1_hi is None else a1_hi
    return backend.blowup_scan(n, np.asarray(bs, dtype=np.int64), max_keep, a1_lo, hi)


def recount(adj, codeg, b):
    return backend.recount(adj, codeg, b)


def anneal_block(*args):
    return backend.anneal_block(*args)
