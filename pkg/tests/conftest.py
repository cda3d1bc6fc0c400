import itertools

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from booktri.graph import Graph, from_edges

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def graphs(draw, min_n=1, max_n=14):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    if not pairs:
        return Graph(n, (0,) * n)
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return from_edges(n, [p for p, k in zip(pairs, keep) if k])


def brute_counts(g: Graph):
    """Independent oracle: plain itertools over vertex subsets."""
    n = g.n
    adj = g.has_edge
    e = sum(1 for u, v in itertools.combinations(range(n), 2) if adj(u, v))
    tris = [c for c in itertools.combinations(range(n), 3)
            if adj(c[0], c[1]) and adj(c[1], c[2]) and adj(c[0], c[2])]
    k4 = sum(1 for c in itertools.combinations(range(n), 4)
             if all(adj(x, y) for x, y in itertools.combinations(c, 2)))
    iso = sum(1 for tri in tris for w in range(n)
              if w not in tri and not any(adj(w, x) for x in tri))
    book = 0
    for u, v in itertools.combinations(range(n), 2):
        if adj(u, v):
            book = max(book, sum(1 for w in range(n) if adj(u, w) and adj(v, w)))
    dsq = sum(sum(1 for w in range(n) if adj(v, w)) ** 2 for v in range(n))
    return {"e": e, "t": len(tris), "k4": k4, "iso": iso, "b": book, "dsq": dsq}


@pytest.fixture
def brute():
    return brute_counts


def part_labels(sizes):
    """True part index per vertex for a part-major blow-up."""
    return [i for i, s in enumerate(sizes) for _ in range(s)]


def flip_edges(g: Graph, k: int, seed: int) -> Graph:
    """Toggle ``k`` distinct vertex pairs chosen by a seeded RNG."""
    import random
    from booktri.graph import set_edge
    rng = random.Random(seed)
    for u, v in rng.sample(list(itertools.combinations(range(g.n), 2)), k):
        g = set_edge(g, u, v, not g.has_edge(u, v))
    return g
