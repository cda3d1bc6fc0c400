"""Compare the numba kernels with the pure-numpy fallback on the same inputs.

Both backends are imported directly, so the environment flag is irrelevant
here.  Every workload also checks that the two backends agree.

    python3 benchmarks/bench_kernels.py --repeat 3
"""
import argparse
import json
import time

import numpy as np

from booktri import _kernels_nb as nb
from booktri import _kernels_np as npk
from booktri.kernels import pair_index
from booktri.search import random_rows


def _timeit(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _bn_inputs(count, seed):
    rng = np.random.default_rng(seed)
    ns = rng.integers(8, 65, size=count).astype(np.int64)
    offsets = np.zeros(count, dtype=np.int64)
    offsets[1:] = np.cumsum(ns)[:-1]
    flat = np.concatenate([random_rows(rng, int(n), float(rng.random())) for n in ns])
    return flat, offsets, ns


def bench_bn(repeat, count=300):
    args = _bn_inputs(count, 7)
    return args, lambda mod: mod.bn_batch(*args)


def bench_exhaustive(repeat, n=6):
    pu, pv = pair_index(n)
    starts = np.array([0], dtype=np.int64)
    ends = np.array([1 << len(pu)], dtype=np.int64)
    return None, lambda mod: mod.exhaustive_chunks(n, 0, 7, starts, ends, pu, pv, 4)


def bench_blowups(repeat, n=24):
    bs = np.array([4, 5], dtype=np.int64)
    return None, lambda mod: mod.blowup_scan(n, bs, 1 << 12, 0, n + 1)


def bench_anneal(repeat, n=16, b=3, steps=20000):
    pu, pv = pair_index(n)
    rng = np.random.default_rng(3)
    picks = rng.integers(0, len(pu), size=steps)
    partner = rng.integers(0, len(pu), size=steps)
    partner[rng.random(steps) < 0.5] = -1
    thresh = -0.5 * np.log1p(-rng.random(steps))
    pen = np.full(steps, float(n))
    upper = np.triu(rng.random((n, n)) < 0.6, 1)
    adj0 = (upper | upper.T).astype(np.uint8)

    def run(mod):
        adj = adj0.copy()
        codeg = np.zeros((n, n), dtype=np.int32)
        e, t, over = mod.recount(adj, codeg, b)
        state = np.array([e, t, over, -1, 0, 0, 0, 0], dtype=np.int64)
        mod.anneal_block(adj, codeg, state, adj.copy(), pu, pv, picks, partner, thresh,
                         0, steps // 2, b, n * n // 4, pen, 1023, np.zeros_like(codeg))
        return state, adj

    return None, run


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


WORKLOADS = {"bn_batch": bench_bn, "exhaustive_n6": bench_exhaustive,
             "blowup_scan_n24": bench_blowups, "anneal_20k": bench_anneal}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--only", choices=sorted(WORKLOADS))
    ap.add_argument("--json", action="store_true", help="print one JSON line per workload")
    args = ap.parse_args()
    for name, make in WORKLOADS.items():
        if args.only and name != args.only:
            continue
        _, fn = make(args.repeat)
        fn(nb)  # compile
        t_nb, out_nb = _timeit(lambda: fn(nb), args.repeat)
        t_np, out_np = _timeit(lambda: fn(npk), args.repeat)
        row = {"workload": name, "numba_s": round(t_nb, 6), "numpy_s": round(t_np, 6),
               "speedup": round(t_np / t_nb, 1) if t_nb > 0 else None,
               "outputs_agree": _same(out_nb, out_np)}
        if args.json:
            print(json.dumps(row))
        else:
            print(f"{name:18s} numba {t_nb:10.4f}s  numpy {t_np:10.4f}s  "
                  f"x{row['speedup']:<8} agree={row['outputs_agree']}")


if __name__ == "__main__":
    main()
