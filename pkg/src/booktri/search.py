"""Exhaustive small-n checks, random BN batches, and annealing for triangle minimisers."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import kernels
from .graph import (Graph, balanced_bipartite, construct_s_bn, is_isomorphic_small,
                    parse_graph6, write_graph6)
from .invariants import stats

DEFAULT_SEED = 20240601
EVIDENCE_NOTE = "stochastic search result: evidence, not proof"
CHECK_NAMES = {"bn": kernels.CHECK_BN, "rademacher": kernels.CHECK_RAD, "edwards": kernels.CHECK_EDW}
MAX_EXHAUSTIVE_N = 8


def conjecture_bound(n: int, b: int) -> int:
    return b * b * (n - 4 * b)


def mubayi_bound(n: int, alpha, delta) -> Fraction:
    """Quadratic baseline (alpha(1-alpha) - delta) n^2 / 4, exact."""
    a = Fraction(str(alpha)) if isinstance(alpha, float) else Fraction(alpha)
    d = Fraction(str(delta)) if isinstance(delta, float) else Fraction(delta)
    if not (Fraction(1, 2) < a < 1):
        raise ValueError(f"alpha must lie in (1/2, 1), got {alpha}")
    if d <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return (a * (1 - a) - d) * n * n / 4


# -- exhaustive -------------------------------------------------------------

@dataclass
class ScanConfig:
    n: int
    edge_min: int = 0
    checks: tuple[str, ...] = ("bn",)
    chunks: int = 1
    max_witnesses: int = 16

    def __post_init__(self):
        self.checks = tuple(sorted(set(self.checks)))
        if not (1 <= self.n <= MAX_EXHAUSTIVE_N):
            raise ValueError(f"exhaustive mode supports 1 <= n <= {MAX_EXHAUSTIVE_N}, got {self.n}")
        if not (0 <= self.edge_min <= self.pairs):
            raise ValueError(f"edge_min must lie in [0, {self.pairs}], got {self.edge_min}")
        bad = set(self.checks) - set(CHECK_NAMES)
        if bad or not self.checks:
            raise ValueError(f"checks must be a nonempty subset of {sorted(CHECK_NAMES)}, got {self.checks}")
        if self.chunks < 1:
            raise ValueError("chunks must be >= 1")

    @property
    def pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def flags(self) -> int:
        f = 0
        for c in self.checks:
            f |= CHECK_NAMES[c]
        return f

    def to_json(self) -> dict:
        d = asdict(self)
        d["checks"] = list(self.checks)
        return d


def mask_to_graph(n: int, mask: int) -> Graph:
    pu, pv = kernels.pair_index(n)
    rows = [0] * n
    for i in range(len(pu)):
        if (mask >> i) & 1:
            u, v = int(pu[i]), int(pv[i])
            rows[u] |= 1 << v
            rows[v] |= 1 << u
    return Graph(n, tuple(rows))


@dataclass
class ScanReport:
    n: int
    edge_min: int
    checks: tuple[str, ...]
    masks: int = 0
    checked: int = 0
    applicable: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)
    witness_masks: dict = field(default_factory=dict)
    max_witnesses: int = 16

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())

    def merge(self, other: "ScanReport") -> "ScanReport":
        if (self.n, self.edge_min, self.checks) != (other.n, other.edge_min, other.checks):
            raise ValueError("cannot merge scans with different configurations")
        out = ScanReport(self.n, self.edge_min, self.checks, self.masks + other.masks,
                         self.checked + other.checked, max_witnesses=self.max_witnesses)
        for c in self.checks:
            out.applicable[c] = self.applicable[c] + other.applicable[c]
            out.violations[c] = self.violations[c] + other.violations[c]
            out.witness_masks[c] = sorted(set(self.witness_masks[c]) | set(other.witness_masks[c]))[: self.max_witnesses]
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n, "edge_min": self.edge_min, "checks": list(self.checks),
            "masks": self.masks, "checked": self.checked,
            "results": {c: {"applicable": self.applicable[c], "violations": self.violations[c],
                            "witnesses": [write_graph6(mask_to_graph(self.n, m)) for m in self.witness_masks[c]]}
                        for c in self.checks},
            "total_violations": self.total_violations,
        }


_COLS = {"bn": (kernels.T_CHECKED, kernels.T_BN_VIOL, 0),
         "rademacher": (kernels.T_RAD_APPL, kernels.T_RAD_VIOL, 1),
         "edwards": (kernels.T_EDW_APPL, kernels.T_EDW_VIOL, 2)}


def scan_range(cfg: ScanConfig, lo: int, hi: int, chunks: int = 1) -> ScanReport:
    """Scan edge masks in [lo, hi) split into ``chunks`` kernel chunks."""
    bounds = np.linspace(lo, hi, chunks + 1).round().astype(np.int64)
    tallies, wits = kernels.exhaustive_chunks(cfg.n, cfg.edge_min, cfg.flags,
                                              bounds[:-1].copy(), bounds[1:].copy(), cfg.max_witnesses)
    tot = tallies.sum(axis=0)
    rep = ScanReport(cfg.n, cfg.edge_min, cfg.checks, hi - lo, int(tot[kernels.T_CHECKED]),
                     max_witnesses=cfg.max_witnesses)
    for c in cfg.checks:
        appl, viol, slot = _COLS[c]
        rep.applicable[c] = int(tot[appl])
        rep.violations[c] = int(tot[viol])
        found = sorted(int(m) for m in wits[:, slot, :].ravel() if m >= 0)
        rep.witness_masks[c] = found[: cfg.max_witnesses]
    return rep


def exhaustive_scan(cfg: ScanConfig) -> ScanReport:
    """All 2^C(n,2) labelled graphs with at least ``edge_min`` edges."""
    return scan_range(cfg, 0, 1 << cfg.pairs, cfg.chunks)


# -- random BN batches ------------------------------------------------------

def random_rows(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    upper = np.triu(rng.random((n, n)) < p, 1)
    adj = upper | upper.T
    weights = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
    return (adj.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def bn_random_batch(count: int, seed: int = DEFAULT_SEED, n_lo: int = 8, n_hi: int = 64,
                    max_witnesses: int = 16) -> dict:
    """BN inequality on ``count`` random graphs, n uniform in [n_lo, n_hi], density uniform."""
    if not (1 <= n_lo <= n_hi <= 64):
        raise ValueError("need 1 <= n_lo <= n_hi <= 64")
    rng = np.random.default_rng(seed)
    ns = rng.integers(n_lo, n_hi + 1, size=count).astype(np.int64)
    ps = rng.random(count)
    offsets = np.zeros(count, dtype=np.int64)
    offsets[1:] = np.cumsum(ns)[:-1]
    flat = np.empty(int(ns.sum()), dtype=np.uint64)
    for i in range(count):
        flat[offsets[i]:offsets[i] + ns[i]] = random_rows(rng, int(ns[i]), float(ps[i]))
    lhs, rhs = kernels.bn_batch(flat, offsets, ns)
    bad = np.nonzero(lhs < rhs)[0]
    wit = []
    for i in bad[:max_witnesses]:
        rows = tuple(int(x) for x in flat[offsets[i]:offsets[i] + ns[i]])
        wit.append(write_graph6(Graph(int(ns[i]), rows)))
    return {"count": count, "seed": seed, "n_range": [n_lo, n_hi],
            "violations": int(bad.size), "witnesses": wit,
            "min_slack": int((lhs - rhs).min()) if count else None}


# -- annealing --------------------------------------------------------------

@dataclass
class AnnealConfig:
    iters: int = 10**6
    restarts: int = 8
    t_start: float = 2.0
    t_end: float = 0.01
    hard_fraction: float = 0.5
    # per-restart penalty ramps, cycled every two restarts; None means n
    penalty_starts: tuple = (None, 0.5)
    penalty_end: float | None = None
    audit_log2: int = 12
    block: int = 1 << 16
    perturb_edges: int = 1
    swap_fraction: float = 0.5
    workers: int = 1

    def __post_init__(self):
        if self.iters < 1 or self.restarts < 1:
            raise ValueError("iters and restarts must be positive")
        self.penalty_starts = tuple(self.penalty_starts)
        if not self.penalty_starts or any(p is not None and p <= 0 for p in self.penalty_starts):
            raise ValueError("penalty_starts must be a nonempty list of positive values or null")
        if not (0 < self.t_end <= self.t_start):
            raise ValueError("need 0 < t_end <= t_start")
        if not (0 <= self.swap_fraction <= 1):
            raise ValueError("swap_fraction must lie in [0, 1]")
        if not (0 <= self.hard_fraction <= 1):
            raise ValueError("hard_fraction must lie in [0, 1]")


@dataclass
class SearchReport:
    n: int
    b: int
    seed: int
    iterations: int
    restarts: int
    best_t: int | None
    bound: int
    best_graph: str | None
    counterexample_found: bool
    excluded_bipartite_hits: int
    audits: int
    audit_mismatches: int
    accepted: int
    verification: dict
    restart_details: list
    config: dict
    note: str = EVIDENCE_NOTE

    def to_json(self) -> dict:
        return asdict(self)


def _initial_state(rng: np.random.Generator, n: int, b: int, emin: int, kind: str, extra: int) -> np.ndarray:
    if kind == "s_bn":
        adj = construct_s_bn(n, b).adjacency_matrix().astype(np.uint8)
        add = extra
    else:
        p = 0.5 + 0.3 * rng.random()
        upper = np.triu(rng.random((n, n)) < p, 1)
        adj = (upper | upper.T).astype(np.uint8)
        add = 0
    iu, iv = np.triu_indices(n, 1)
    order = rng.permutation(len(iu))
    e = int(adj[iu, iv].sum())
    for k in order:
        if e >= emin and add <= 0:
            break
        u, v = iu[k], iv[k]
        if not adj[u, v]:
            adj[u, v] = adj[v, u] = 1
            e += 1
            add -= 1
    return adj


def _run_restart(n: int, b: int, idx: int, seq: np.random.SeedSequence, cfg: AnnealConfig) -> dict:
    rng = np.random.default_rng(seq)
    emin = n * n // 4
    kind = "s_bn" if idx % 2 == 0 else "random_dense"
    extra = cfg.perturb_edges
    adj = _initial_state(rng, n, b, emin, kind, extra)
    codeg = np.zeros((n, n), dtype=np.int32)
    scratch = np.zeros((n, n), dtype=np.int32)
    e, t, over = kernels.recount(adj, codeg, b)
    state = np.zeros(8, dtype=np.int64)
    state[kernels.S_E], state[kernels.S_T], state[kernels.S_OVER] = e, t, over
    state[kernels.S_BEST] = t if over == 0 and t > 0 else -1
    best_adj = adj.copy()
    pu, pv = kernels.pair_index(n)
    npairs = len(pu)
    p_end = cfg.penalty_end if cfg.penalty_end is not None else float(n)
    p_start = cfg.penalty_starts[(idx // 2) % len(cfg.penalty_starts)]
    p_start = p_end if p_start is None else min(p_start, p_end)
    p_ratio = math.log(p_end / p_start)
    hard_from = int(cfg.hard_fraction * cfg.iters)
    audit_mask = (1 << cfg.audit_log2) - 1
    ratio = math.log(cfg.t_end / cfg.t_start)
    denom = max(1, cfg.iters - 1)
    for k0 in range(0, cfg.iters, cfg.block):
        m = min(cfg.block, cfg.iters - k0)
        picks = rng.integers(0, npairs, size=m)
        partner = rng.integers(0, npairs, size=m)
        partner[rng.random(m) >= cfg.swap_fraction] = -1
        steps = np.arange(k0, k0 + m, dtype=np.float64)
        temps = cfg.t_start * np.exp(ratio * steps / denom)
        thresh = -temps * np.log1p(-rng.random(m))
        pen = p_start * np.exp(p_ratio * steps / denom)
        kernels.anneal_block(adj, codeg, state, best_adj, pu, pv, picks, partner, thresh,
                             k0, hard_from, b, emin, pen, audit_mask, scratch)
    # closing audit against a full recount
    fe, ft, fover = kernels.recount(adj, scratch, b)
    state[kernels.S_AUDITS] += 1
    if (fe, ft, fover) != (state[kernels.S_E], state[kernels.S_T], state[kernels.S_OVER]) \
            or not np.array_equal(scratch, codeg):
        state[kernels.S_BAD] += 1
    best = int(state[kernels.S_BEST])
    g6 = None
    if best >= 0:
        rows = tuple(int(sum(1 << int(w) for w in np.nonzero(best_adj[v])[0])) for v in range(n))
        g6 = write_graph6(Graph(n, rows))
    return {"restart": idx, "start": kind, "penalty_start": p_start, "best_t": best if best >= 0 else None, "best_graph": g6,
            "final_t": int(state[kernels.S_T]), "accepted": int(state[kernels.S_ACC]),
            "bipartite_hits": int(state[kernels.S_HITS]), "audits": int(state[kernels.S_AUDITS]),
            "audit_mismatches": int(state[kernels.S_BAD])}


def check_anneal_range(n: int, b: int) -> None:
    if isinstance(b, bool) or not isinstance(b, (int, np.integer)):
        raise ValueError(f"b must be an integer, got {b!r}")
    if not (6 * b >= n and 4 * b < n):
        raise ValueError(f"b={b} is outside [n/6, n/4) for n={n}")


def anneal_min_triangles(n: int, b: int, seed: int = DEFAULT_SEED, iters: int = 10**6,
                         config: AnnealConfig | None = None) -> SearchReport:
    """Simulated annealing for few triangles under the edge floor and book cap.

    Moves are single-edge flips, mixed with edge-for-non-edge swaps so the
    walk can move along the edge floor.

    Edge floor e >= floor(n^2/4) is enforced by rejection; edges with codegree
    above b are penalised, and after ``hard_fraction`` of the run a feasible
    state may not become infeasible.  Triangle-free states are rejected and
    counted: with e >= floor(n^2/4) they are balanced complete bipartite.
    """
    check_anneal_range(n, b)
    cfg = replace(config or AnnealConfig(), iters=iters)
    kids = np.random.SeedSequence(seed).spawn(cfg.restarts)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            runs = list(pool.map(lambda a: _run_restart(n, b, a[0], a[1], cfg), enumerate(kids)))
    else:
        runs = [_run_restart(n, b, i, s, cfg) for i, s in enumerate(kids)]
    found = [r for r in runs if r["best_t"] is not None]
    best = min(found, key=lambda r: (r["best_t"], r["restart"])) if found else None
    bound = conjecture_bound(n, b)
    verification: dict = {"performed": False}
    counterexample = False
    if best is not None:
        g = parse_graph6(best["best_graph"])
        e, t, book, *_ = stats(g)
        feasible = e >= n * n // 4 and book <= b
        bip = is_isomorphic_small(g, balanced_bipartite(n)) if t == 0 else False
        verification = {"performed": True, "e": e, "t": t, "book": book,
                        "edge_floor_ok": e >= n * n // 4, "book_ok": book <= b,
                        "t_matches_search": t == best["best_t"], "balanced_bipartite": bip}
        counterexample = feasible and t < bound and not bip
    drop = {"workers"}
    return SearchReport(
        n=n, b=b, seed=seed, iterations=cfg.iters, restarts=cfg.restarts,
        best_t=best["best_t"] if best else None, bound=bound,
        best_graph=best["best_graph"] if best else None,
        counterexample_found=counterexample,
        excluded_bipartite_hits=sum(r["bipartite_hits"] for r in runs),
        audits=sum(r["audits"] for r in runs),
        audit_mismatches=sum(r["audit_mismatches"] for r in runs),
        accepted=sum(r["accepted"] for r in runs),
        verification=verification,
        restart_details=runs,
        config={k: v for k, v in asdict(cfg).items() if k not in drop},
    )
