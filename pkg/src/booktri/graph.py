"""Bit-row graphs, the named constructions, graph6 I/O and small isomorphism.

A :class:`Graph` stores one Python ``int`` per vertex whose set bits are the
neighbours.  Rows for ``n <= 64`` fit a machine word, which is what the
numba kernels consume; larger graphs (up to 256 vertices) keep the same
semantics through arbitrary precision ints.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_VERTICES = 256
FAST_PATH_VERTICES = 64
GRAPH6_MAX = 258047

# Checked after every construction unless python runs with -O.
CHECK_INVARIANTS = __debug__


class GraphError(ValueError):
    pass


class Graph6Error(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise GraphError(f"vertex count must be a positive integer, got {self.n!r}")
        if self.n > MAX_VERTICES:
            raise GraphError(f"at most {MAX_VERTICES} vertices are supported, got {self.n}")
        if len(self.rows) != self.n:
            raise GraphError("need exactly one adjacency row per vertex")
        if CHECK_INVARIANTS:
            self._check()

    def _check(self) -> None:
        full = (1 << self.n) - 1
        rows = self.rows
        for v, row in enumerate(rows):
            if row & ~full:
                raise GraphError(f"row {v} uses bits at or above n={self.n}")
            if (row >> v) & 1:
                raise GraphError(f"loop at vertex {v}")
            r = row
            while r:
                low = r & -r
                u = low.bit_length() - 1
                if not (rows[u] >> v) & 1:
                    raise GraphError(f"asymmetric adjacency between {v} and {u}")
                r ^= low

    # -- queries ---------------------------------------------------------
    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def neighbors(self, v: int) -> list[int]:
        return bits_of(self.rows[v])

    @cached_property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, row in enumerate(self.rows):
            for v in bits_of(row >> (u + 1)):
                yield u, u + 1 + v

    def induced_mask(self, vertices: Iterable[int]) -> int:
        mask = 0
        for v in vertices:
            mask |= 1 << v
        return mask

    def np_rows(self) -> np.ndarray:
        """Rows as ``uint64`` words; only valid on the fast path."""
        if self.n > FAST_PATH_VERTICES:
            raise GraphError("uint64 rows need n <= 64")
        return np.array(self.rows, dtype=np.uint64)

    def adjacency_matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.uint8)
        for u, row in enumerate(self.rows):
            for v in bits_of(row):
                out[u, v] = 1
        return out

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabeling must be a permutation of the vertices")
        rows = [0] * self.n
        for u, row in enumerate(self.rows):
            new = 0
            for v in bits_of(row):
                new |= 1 << perm[v]
            rows[perm[u]] = new
        return Graph(self.n, tuple(rows))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, e={self.edge_count})"


def bits_of(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


# -- construction --------------------------------------------------------

def empty_graph(n: int) -> Graph:
    return Graph(n, (0,) * max(n, 0))


def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    rows = [0] * n
    for u, v in edges:
        _check_pair(n, u, v)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, tuple(rows))


def _check_pair(n: int, u: int, v: int) -> None:
    if not (0 <= u < n and 0 <= v < n):
        raise GraphError(f"vertex out of range: ({u}, {v}) with n={n}")
    if u == v:
        raise GraphError(f"loops are not allowed: ({u}, {v})")


def set_edge(g: Graph, u: int, v: int, present: bool = True) -> Graph:
    _check_pair(g.n, u, v)
    rows = list(g.rows)
    if present:
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    else:
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)
    return Graph(g.n, tuple(rows))


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, tuple(full & ~(1 << v) for v in range(n)))


def cycle_graph(n: int) -> Graph:
    return from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def disjoint_union(g: Graph, h: Graph) -> Graph:
    return Graph(g.n + h.n, g.rows + tuple(r << g.n for r in h.rows))


def complete_bipartite(p: int, q: int) -> Graph:
    if p < 0 or q < 0 or p + q < 1:
        raise GraphError(f"complete_bipartite needs p, q >= 0 and p + q >= 1, got ({p}, {q})")
    left = (1 << p) - 1
    right = ((1 << q) - 1) << p
    return Graph(p + q, (right,) * p + (left,) * q)


# -- patterns and blow-ups ----------------------------------------------

@dataclass(frozen=True)
class PatternGraph:
    """Small labelled pattern on vertices ``0..k-1``."""

    k: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.k and 0 <= v < self.k) or u == v:
                raise GraphError(f"bad pattern edge ({u}, {v}) for k={self.k}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"repeated pattern edge {key}")
            seen.add(key)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.k)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def triangles(self) -> tuple[tuple[int, int, int], ...]:
        adj = self.adjacency
        return tuple(
            (u, v, w)
            for u, v, w in itertools.combinations(range(self.k), 3)
            if v in adj[u] and w in adj[u] and w in adj[v]
        )

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    @cached_property
    def automorphisms(self) -> tuple[tuple[int, ...], ...]:
        """All permutations preserving the edge set (brute force, k <= 8)."""
        if self.k > 8:
            raise GraphError("automorphism enumeration is limited to k <= 8")
        eset = {frozenset(e) for e in self.edges}
        return tuple(
            perm
            for perm in itertools.permutations(range(self.k))
            if all(frozenset((perm[u], perm[v])) in eset for u, v in self.edges)
        )


def _prism() -> PatternGraph:
    labelled = "12,23,13,14,25,36,45,56,46"
    return PatternGraph(6, tuple((int(p[0]) - 1, int(p[1]) - 1) for p in labelled.split(",")))


# The 3-prism: triangles {1,2,3} and {4,5,6} matched by 14, 25, 36 (0-based here).
PRISM = _prism()
PRISM_TRIANGLES = PRISM.triangles
PRISM_AUTOMORPHISMS = PRISM.automorphisms

EDGE_PATTERN = PatternGraph(2, ((0, 1),))
TRIANGLE_PATTERN = PatternGraph(3, ((0, 1), (1, 2), (0, 2)))


def blowup(h: PatternGraph, sizes: Sequence[int]) -> Graph:
    """Replace pattern vertex ``i`` by an independent set of ``sizes[i]`` vertices.

    Vertices are numbered part-major: part 0 occupies ``0..sizes[0]-1`` and so on.
    """
    if len(sizes) != h.k:
        raise GraphError(f"need {h.k} part sizes, got {len(sizes)}")
    if any(int(s) != s or s < 0 for s in sizes):
        raise GraphError(f"part sizes must be nonnegative integers, got {tuple(sizes)}")
    sizes = [int(s) for s in sizes]
    total = sum(sizes)
    if total < 1:
        raise GraphError("a blow-up needs at least one vertex")
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    masks = [((1 << sizes[i]) - 1) << offsets[i] for i in range(h.k)]
    part_rows = []
    for i in range(h.k):
        row = 0
        for j in h.adjacency[i]:
            row |= masks[j]
        part_rows.append(row)
    rows: list[int] = []
    for i in range(h.k):
        rows.extend([part_rows[i]] * sizes[i])
    return Graph(total, tuple(rows))


def part_ranges(sizes: Sequence[int]) -> list[range]:
    out, start = [], 0
    for s in sizes:
        out.append(range(start, start + s))
        start += s
    return out


def s_bn_sizes(n: int, b: int) -> tuple[int, int, int, int, int, int]:
    """Part sizes ``(b, b, floor((n-4b)/2), b, b, ceil((n-4b)/2))`` of S_{b,n}."""
    check_book_range(n, b)
    rest = n - 4 * b
    return (b, b, rest // 2, b, b, rest - rest // 2)


def check_book_range(n: int, b: int) -> None:
    if not isinstance(n, (int, np.integer)) or not isinstance(b, (int, np.integer)):
        raise GraphError(f"n and b must be integers, got n={n!r}, b={b!r}")
    if n < 1:
        raise GraphError(f"n must be positive, got {n}")
    if not (n <= 6 * b and 4 * b <= n):
        raise GraphError(f"b={b} is outside [n/6, n/4] = [{n / 6:.4g}, {n / 4:.4g}] for n={n}")


def construct_s_bn(n: int, b: int) -> Graph:
    return blowup(PRISM, s_bn_sizes(n, b))


def balanced_bipartite(n: int) -> Graph:
    return complete_bipartite(n // 2, n - n // 2)


# -- graph6 ---------------------------------------------------------------

def _graph6_size_prefix(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= GRAPH6_MAX:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    raise Graph6Error(f"graph6 cannot encode n={n}")


def write_graph6(g: Graph) -> str:
    bits = []
    rows = g.rows
    for j in range(1, g.n):
        rj = rows[j]
        for i in range(j):
            bits.append((rj >> i) & 1)
    bits.extend([0] * (-len(bits) % 6))
    body = []
    for k in range(0, len(bits), 6):
        chunk = bits[k:k + 6]
        val = 0
        for bit in chunk:
            val = (val << 1) | bit
        body.append(chr(val + 63))
    return _graph6_size_prefix(g.n) + "".join(body)


def parse_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise Graph6Error("empty graph6 string")
    codes = [ord(c) - 63 for c in s]
    if any(c < 0 or c > 63 for c in codes):
        bad = next(ch for ch, c in zip(s, codes) if c < 0 or c > 63)
        raise Graph6Error(f"invalid graph6 character {bad!r}")
    if codes[0] == 63:
        if len(codes) >= 2 and codes[1] == 63:
            raise Graph6Error("n too large: 36-bit graph6 sizes are not supported")
        if len(codes) < 4:
            raise Graph6Error("truncated graph6 size field")
        n = (codes[1] << 12) | (codes[2] << 6) | codes[3]
        if n <= 62:
            raise Graph6Error(f"non-canonical long size field for n={n}")
        body = codes[4:]
    else:
        n = codes[0]
        body = codes[1:]
    nbits = n * (n - 1) // 2
    if len(body) != (nbits + 5) // 6:
        raise Graph6Error(f"graph6 body has {len(body)} chars, expected {(nbits + 5) // 6} for n={n}")
    if n == 0:
        raise Graph6Error("graphs need at least one vertex")
    if n > MAX_VERTICES:
        raise Graph6Error(f"n too large: n={n} exceeds the constructible limit of {MAX_VERTICES}")
    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            if (body[k // 6] >> (5 - k % 6)) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    if nbits % 6 and body[-1] & ((1 << (6 - nbits % 6)) - 1):
        raise Graph6Error("nonzero padding bits in graph6 body")
    return Graph(n, tuple(rows))


def read_graph6_lines(lines: Iterable[str]) -> Iterator[Graph]:
    for line in lines:
        line = line.strip()
        if line:
            yield parse_graph6(line)


# -- isomorphism ---------------------------------------------------------

def _refine(g: Graph) -> list[int]:
    """Stable colouring by degree then neighbour-colour multisets."""
    colors = g.degrees()
    while True:
        sigs = [
            (colors[v], tuple(sorted(colors[u] for u in bits_of(g.rows[v]))))
            for v in range(g.n)
        ]
        palette = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [palette[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _signature_colors(g: Graph) -> tuple[list[int], list[tuple]]:
    base = _refine(g)
    sigs = []
    for v in range(g.n):
        codeg = sorted(
            ((g.rows[v] & g.rows[u]).bit_count(), base[u]) for u in bits_of(g.rows[v])
        )
        sigs.append((base[v], tuple(codeg)))
    return base, sigs


def is_isomorphic_small(g: Graph, h: Graph) -> bool:
    """Exact isomorphism test by colour refinement plus backtracking."""
    if g.n != h.n or g.edge_count != h.edge_count:
        return False
    if sorted(g.degrees()) != sorted(h.degrees()):
        return False
    _, sg = _signature_colors(g)
    _, sh = _signature_colors(h)
    if sorted(sg) != sorted(sh):
        return False
    keys = sorted(set(sg))
    cg = [keys.index(s) for s in sg]
    ch = [keys.index(s) for s in sh]
    # Map rare classes first; within a class prefer high degree.
    freq = {c: cg.count(c) for c in set(cg)}
    order = sorted(range(g.n), key=lambda v: (freq[cg[v]], -g.degree(v), v))
    by_color: dict[int, list[int]] = {}
    for w in range(h.n):
        by_color.setdefault(ch[w], []).append(w)

    mapping = [-1] * g.n
    used = 0

    def extend(depth: int) -> bool:
        nonlocal used
        if depth == g.n:
            return True
        v = order[depth]
        rv = g.rows[v]
        for w in by_color[cg[v]]:
            if (used >> w) & 1:
                continue
            rw = h.rows[w]
            ok = True
            for d in range(depth):
                u = order[d]
                if ((rv >> u) & 1) != ((rw >> mapping[u]) & 1):
                    ok = False
                    break
            if not ok:
                continue
            mapping[v] = w
            used |= 1 << w
            if extend(depth + 1):
                return True
            used &= ~(1 << w)
            mapping[v] = -1
        return False

    return extend(0)
