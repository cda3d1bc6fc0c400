"""Blow-up invariants in closed form and the blow-up-class conjecture scan."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .calculus import extremal_vector
from .graph import PRISM, PRISM_AUTOMORPHISMS, GraphError, PatternGraph

# Vectors kept per bound; verdicts refuse to certify if a list was truncated.
MAX_KEEP = 1 << 16


def _check_sizes(h: PatternGraph, sizes: Sequence[int]) -> list[int]:
    if len(sizes) != h.k:
        raise GraphError(f"pattern has {h.k} vertices but {len(sizes)} sizes were given")
    return [int(s) for s in sizes]


def blowup_edges(h: PatternGraph, sizes: Sequence[int]) -> int:
    a = _check_sizes(h, sizes)
    return sum(a[u] * a[v] for u, v in h.edges)


def blowup_triangles(h: PatternGraph, sizes: Sequence[int]) -> int:
    a = _check_sizes(h, sizes)
    return sum(a[u] * a[v] * a[w] for u, v, w in h.triangles)


def blowup_book_number(h: PatternGraph, sizes: Sequence[int]) -> int:
    """Largest codegree over realised edges: only pattern edges with both parts nonempty count."""
    a = _check_sizes(h, sizes)
    best = 0
    for u, v in h.edges:
        if a[u] and a[v]:
            best = max(best, sum(a[w] for w in h.adjacency[u] & h.adjacency[v]))
    return best


def enumerate_part_vectors(n: int, k: int = 6) -> Iterator[tuple[int, ...]]:
    """Compositions of ``n`` into ``k`` ordered parts, lexicographic (a1 slowest)."""
    if n < 0:
        return
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in enumerate_part_vectors(n - first, k - 1):
            yield (first,) + rest


def prism_orbit(a: Sequence[int]) -> set[tuple[int, ...]]:
    """All relabelings of ``a`` by prism automorphisms."""
    return {tuple(a[p[i]] for i in range(6)) for p in PRISM_AUTOMORPHISMS}


def orbit_key(a: Sequence[int]) -> tuple[int, ...]:
    return min(prism_orbit(a))


def is_balanced_bipartite_vector(a: Sequence[int], n: int, h: PatternGraph = PRISM) -> bool:
    """Whether the blow-up of ``a`` is K_{floor(n/2), ceil(n/2)}, judged from the pattern."""
    support = [i for i in range(h.k) if a[i] > 0]
    if not support:
        return False
    side = {support[0]: 0}
    stack = [support[0]]
    while stack:
        u = stack.pop()
        for w in h.adjacency[u]:
            if a[w] > 0 and w not in side:
                side[w] = 1 - side[u]
                stack.append(w)
    if len(side) != len(support):
        return False
    for u in support:
        for w in support:
            if u < w and (side[u] != side[w]) != h.has_edge(u, w):
                return False
    sums = sorted(sum(a[i] for i in support if side[i] == s) for s in (0, 1))
    return sums == [n // 2, n - n // 2]


@dataclass
class BlowupVerdict:
    n: int
    b: int
    vectors_scanned: int = 0
    admissible: int = 0
    min_t: int = -1
    minimizers: list[tuple[int, ...]] = field(default_factory=list)
    minimizer_count: int = 0
    zero_t_vectors: list[tuple[int, ...]] = field(default_factory=list)
    zero_t_count: int = 0

    @property
    def bound(self) -> int:
        return self.b * self.b * (self.n - 4 * self.b)

    @property
    def conjecture_holds_in_class(self) -> bool:
        return self.min_t >= self.bound and self.zero_t_all_bipartite

    @property
    def minimizers_are_extremal_orbit(self) -> bool:
        if self.min_t != self.bound or self.minimizer_count != len(self.minimizers):
            return False
        ext = tuple(extremal_vector(self.n, self.b))
        return set(self.minimizers) == prism_orbit(ext)

    @property
    def zero_t_all_bipartite(self) -> bool:
        if self.zero_t_count != len(self.zero_t_vectors):
            return False
        return all(is_balanced_bipartite_vector(a, self.n) for a in self.zero_t_vectors)

    def merge(self, other: "BlowupVerdict") -> "BlowupVerdict":
        """Combine two verdicts over disjoint parts of the composition stream."""
        if (self.n, self.b) != (other.n, other.b):
            raise ValueError("cannot merge verdicts for different (n, b)")
        out = BlowupVerdict(self.n, self.b,
                            self.vectors_scanned + other.vectors_scanned,
                            self.admissible + other.admissible)
        cands = [v for v in (self, other) if v.min_t >= 0]
        if cands:
            out.min_t = min(v.min_t for v in cands)
            for v in cands:
                if v.min_t == out.min_t:
                    out.minimizers += v.minimizers
                    out.minimizer_count += v.minimizer_count
        out.minimizers = sorted(set(out.minimizers))
        out.zero_t_vectors = sorted(set(self.zero_t_vectors + other.zero_t_vectors))
        out.zero_t_count = self.zero_t_count + other.zero_t_count
        return out

    def to_json(self) -> dict:
        classes = sorted({orbit_key(a) for a in self.minimizers})
        return {
            "n": self.n, "b": self.b, "bound": self.bound,
            "vectors_scanned": self.vectors_scanned, "admissible": self.admissible,
            "min_t": self.min_t,
            "minimizers": [list(a) for a in self.minimizers],
            "minimizer_classes": [list(a) for a in classes],
            "zero_t_admissible": self.zero_t_count,
            "zero_t_all_balanced_bipartite": self.zero_t_all_bipartite,
            "conjecture_holds_in_class": self.conjecture_holds_in_class,
            "minimizers_are_extremal_orbit": self.minimizers_are_extremal_orbit,
        }


def conjecture_b_range(n: int) -> range:
    """Integer b with n/6 <= b < n/4."""
    return range(-(-n // 6), -(-n // 4))


def check_conjecture_range(n: int, b: int) -> None:
    if not isinstance(b, (int, np.integer)) or isinstance(b, bool):
        raise GraphError(f"b must be an integer, got {b!r}")
    if not (6 * b >= n and 4 * b < n):
        raise GraphError(f"b={b} is outside [n/6, n/4) for n={n}")


def _scan_chunk(n: int, bs: list[int], lo: int, hi: int) -> list[BlowupVerdict]:
    scanned, adm, min_t, n_min, mins, n_zero, zeros = kernels.blowup_scan(n, bs, MAX_KEEP, lo, hi)
    out = []
    for i, b in enumerate(bs):
        v = BlowupVerdict(n, b, int(scanned), int(adm[i]), int(min_t[i]))
        v.minimizer_count = int(n_min[i])
        v.minimizers = [tuple(int(x) for x in row) for row in mins[i, : min(v.minimizer_count, MAX_KEEP)]]
        v.zero_t_count = int(n_zero[i])
        v.zero_t_vectors = [tuple(int(x) for x in row) for row in zeros[i, : min(v.zero_t_count, MAX_KEEP)]]
        out.append(v)
    return out


def scan_blowups(n: int, bs: Sequence[int], workers: int = 1, chunks: int | None = None
                 ) -> list[BlowupVerdict]:
    """One pass over all compositions of ``n``, one verdict per bound in ``bs``."""
    bs = [int(b) for b in bs]
    nchunks = max(1, chunks if chunks is not None else workers)
    edges = np.linspace(0, n + 1, nchunks + 1).round().astype(int)
    spans = [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda s: _scan_chunk(n, bs, *s), spans))
    else:
        parts = [_scan_chunk(n, bs, *s) for s in spans]
    merged = parts[0]
    for part in parts[1:]:
        merged = [x.merge(y) for x, y in zip(merged, part)]
    return merged


def verify_conjecture_blowups(n: int, b: int, workers: int = 1) -> BlowupVerdict:
    check_conjecture_range(n, b)
    return scan_blowups(n, [b], workers)[0]


def verify_range(n_lo: int, n_hi: int, workers: int = 1) -> Iterator[BlowupVerdict]:
    """Every (n, b) with n_lo <= n <= n_hi and b in the conjecture range."""
    for n in range(n_lo, n_hi + 1):
        bs = list(conjecture_b_range(n))
        if bs:
            yield from scan_blowups(n, bs, workers)
