"""Exact graph invariants: edges, codegrees, triangles, books, 4-cliques.

Everything is integer arithmetic.  Graphs on at most 64 vertices go through
the compiled kernel; larger ones use Python big-int rows.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from . import kernels
from .graph import FAST_PATH_VERTICES, Graph, GraphError


@dataclass(frozen=True)
class InvariantReport:
    n: int
    e: int
    t: int
    b: int
    k4: int
    k4_iso3: int
    degree_sq_sum: int
    degrees: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


def _stats_bigint(g: Graph) -> tuple[int, int, int, int, int, int]:
    rows = g.rows
    n = g.n
    degs = [r.bit_count() for r in rows]
    t = book = k4 = iso = 0
    for u in range(n):
        ru = rows[u]
        hv = ru >> (u + 1) << (u + 1)
        while hv:
            low = hv & -hv
            v = low.bit_length() - 1
            hv ^= low
            common = ru & rows[v]
            book = max(book, common.bit_count())
            hw = common >> (v + 1) << (v + 1)
            while hw:
                lw = hw & -hw
                w = lw.bit_length() - 1
                hw ^= lw
                t += 1
                k4 += ((common & rows[w]) >> (w + 1)).bit_count()
                iso += n - (ru | rows[v] | rows[w]).bit_count()
    return sum(degs) // 2, t, book, k4, iso, sum(d * d for d in degs)


def stats(g: Graph) -> tuple[int, int, int, int, int, int]:
    """(e, t, b, k4, k4_iso3, sum of squared degrees)."""
    if g.n <= FAST_PATH_VERTICES:
        return kernels.graph_stats(g.np_rows(), g.n)
    return _stats_bigint(g)


def invariant_report(g: Graph) -> InvariantReport:
    e, t, b, k4, iso, dsq = stats(g)
    return InvariantReport(g.n, e, t, b, k4, iso, dsq, sorted(g.degrees()))


def edge_count(g: Graph) -> int:
    return g.edge_count


def codegree(g: Graph, u: int, v: int) -> int:
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise GraphError(f"vertex out of range for n={g.n}: ({u}, {v})")
    if u == v:
        raise GraphError("codegree needs two distinct vertices")
    return (g.rows[u] & g.rows[v]).bit_count()


def triangle_count(g: Graph) -> int:
    return stats(g)[1]


def book_number(g: Graph) -> int:
    return stats(g)[2]


def k4_count(g: Graph) -> int:
    return stats(g)[3]


def k4_iso3_count(g: Graph) -> int:
    return stats(g)[4]


@dataclass(frozen=True)
class BNResult:
    lhs: int
    rhs: int
    holds: bool


def bn_inequality(g: Graph) -> BNResult:
    """Both sides of  (6t - sum d^2 + n e) b  >=  n t + 8 k4 + 2 k4_iso3."""
    e, t, b, k4, iso, dsq = stats(g)
    n = g.n
    lhs = (6 * t - dsq + n * e) * b
    rhs = n * t + 8 * k4 + 2 * iso
    return BNResult(lhs, rhs, lhs >= rhs)


# -- rearrangement helpers -------------------------------------------------

Triple = Sequence[int | Fraction]


def _dot(x: Triple, y: Triple):
    return sum(a * b for a, b in zip(x, y))


def rearrange_desc(front: Triple, back: Triple) -> tuple:
    """The permutation of ``back`` pairing largest with largest."""
    return tuple(sorted(back, reverse=True))


def rearrange_equality_holds(front: Triple, back: Triple) -> bool:
    """Stated equality condition: (f_i - f_j)(b_i - b_j) >= 0 for all i < j."""
    return all((front[i] - front[j]) * (back[i] - back[j]) >= 0
               for i, j in itertools.combinations(range(3), 2))


def rearrange_equality_bruteforce(front: Triple, back: Triple) -> bool:
    """True iff the given pairing already attains the maximum dot product."""
    best = max(_dot(front, p) for p in itertools.permutations(back))
    return _dot(front, back) == best


def rearrangement_monitor(lo: int = 0, hi: int = 6) -> dict:
    """Compare the stated and brute-force equality tests on an integer grid."""
    checked = 0
    disagreements = []
    grid = range(lo, hi + 1)
    for front in itertools.product(grid, repeat=3):
        if not (front[0] >= front[1] >= front[2]):
            continue
        for back in itertools.product(grid, repeat=3):
            checked += 1
            a = rearrange_equality_holds(front, back)
            b = rearrange_equality_bruteforce(front, back)
            if a != b:
                disagreements.append({"front": list(front), "back": list(back),
                                      "stated": a, "brute_force": b})
    return {"checked": checked, "disagreements": len(disagreements),
            "examples": disagreements[:20]}
