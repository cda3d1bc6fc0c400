import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from booktri.blowups import (BlowupVerdict, blowup_book_number, blowup_edges, blowup_triangles,
                             conjecture_b_range, enumerate_part_vectors, is_balanced_bipartite_vector,
                             orbit_key, prism_orbit, scan_blowups, verify_conjecture_blowups,
                             verify_range)
from booktri.calculus import extremal_vector, s_fn, t_fn
from booktri.graph import (PRISM, PRISM_AUTOMORPHISMS, GraphError, PatternGraph, blowup,
                           complete_bipartite, construct_s_bn, is_isomorphic_small)
from booktri.invariants import book_number, stats

EDGE = PatternGraph(2, ((0, 1),))
TRI = PatternGraph(3, ((0, 1), (1, 2), (0, 2)))
C4 = PatternGraph(4, ((0, 1), (1, 2), (2, 3), (0, 3)))


def test_closed_form_examples():
    assert blowup_edges(PRISM, (1,) * 6) == 9
    assert blowup_edges(PRISM, (2,) * 6) == construct_s_bn(12, 2).edge_count == 36
    assert blowup_edges(EDGE, (3, 5)) == 15
    assert blowup_triangles(PRISM, (2,) * 6) == 16
    assert blowup_triangles(TRI, (2, 3, 4)) == 24
    assert blowup_triangles(C4, (3, 3, 3, 3)) == 0
    assert blowup_book_number(PRISM, (3, 3, 0, 3, 3, 1)) == 3
    assert book_number(blowup(PRISM, (3, 3, 0, 3, 3, 1))) == 3
    assert blowup_book_number(C4, (2, 2, 2, 2)) == 0
    with pytest.raises(GraphError):
        blowup_edges(PRISM, (1, 2, 3))


def test_edge_pattern_is_complete_bipartite():
    assert blowup(EDGE, (3, 4)) == complete_bipartite(3, 4)
    assert blowup(TRI, (1, 1, 1)).edge_count == 3


def test_book_number_of_s_bn_is_b():
    for n in range(12, 61):
        for b in range(-(-n // 6), n // 4 + 1):
            # at b = n/4 the graph is bipartite and has no books at all
            want = 0 if 4 * b == n else b
            assert blowup_book_number(PRISM, extremal_vector(n, b)) == want


def test_enumeration_counts():
    assert len(list(enumerate_part_vectors(1))) == 6
    assert len(list(enumerate_part_vectors(2))) == 21
    for n in (0, 5, 12):
        vs = list(enumerate_part_vectors(n))
        assert len(vs) == math.comb(n + 5, 5) == len(set(vs))
        assert all(sum(v) == n and len(v) == 6 for v in vs)


def test_prism_closed_forms_exhaustive():
    # every vector up to n = 18, then a seeded sample per n up to 48
    for n in range(0, 19):
        for a in enumerate_part_vectors(n):
            assert blowup_edges(PRISM, a) == s_fn(a)
            assert blowup_triangles(PRISM, a) == t_fn(a)
    rng = random.Random(4)
    for n in range(19, 49):
        for _ in range(500):
            cuts = sorted(rng.randint(0, n) for _ in range(5))
            a = [y - x for x, y in zip([0] + cuts, cuts + [n])]
            assert blowup_edges(PRISM, a) == s_fn(a)
            assert blowup_triangles(PRISM, a) == t_fn(a)


def test_closed_forms_match_constructed_graphs():
    rng = random.Random(11)
    for _ in range(1500):
        k = rng.randint(1, 6)
        edges = [p for p in itertools.combinations(range(k), 2) if rng.random() < 0.6]
        h = PatternGraph(k, tuple(edges))
        sizes = [rng.randint(0, 8) for _ in range(k)]
        if sum(sizes) == 0:
            continue
        e, t, b, *_ = stats(blowup(h, sizes))
        assert (e, t, b) == (blowup_edges(h, sizes), blowup_triangles(h, sizes),
                             blowup_book_number(h, sizes))


@given(st.lists(st.integers(0, 6), min_size=6, max_size=6))
def test_orbit_preserves_invariants(a):
    orb = prism_orbit(a)
    assert len(orb) <= 12 and tuple(a) in orb
    for v in orb:
        assert (s_fn(v), t_fn(v)) == (s_fn(a), t_fn(a))
        assert blowup_book_number(PRISM, v) == blowup_book_number(PRISM, a)
        assert orbit_key(v) == orbit_key(a)
    if 0 < sum(a) <= 12:
        perm = PRISM_AUTOMORPHISMS[5]
        v = tuple(a[perm[i]] for i in range(6))
        assert is_isomorphic_small(blowup(PRISM, a), blowup(PRISM, v))


def test_balanced_bipartite_detection():
    assert is_balanced_bipartite_vector((6, 0, 0, 6, 0, 0), 12)  # edge 14 only
    assert is_balanced_bipartite_vector((3, 0, 3, 3, 0, 3), 12)  # 4-cycle 1-3-6-4, sides 6/6
    assert not is_balanced_bipartite_vector((5, 0, 0, 7, 0, 0), 12)
    assert not is_balanced_bipartite_vector((1, 1, 1, 0, 0, 0), 3)
    assert not is_balanced_bipartite_vector((6, 0, 0, 0, 6, 0), 12)  # no edge between 1 and 5


def brute_verdict(n, b):
    """Pure python scan used as an oracle for the compiled scan."""
    floor = n * n // 4
    best, mins, zeros = None, set(), set()
    for a in enumerate_part_vectors(n):
        if s_fn(a) < floor or blowup_book_number(PRISM, a) > b:
            continue
        t = t_fn(a)
        if t == 0:
            zeros.add(a)
            continue
        if best is None or t < best:
            best, mins = t, {a}
        elif t == best:
            mins.add(a)
    return best, mins, zeros


@pytest.mark.parametrize("n,b", [(12, 2), (13, 3), (14, 3), (16, 3), (17, 4)])
def test_scan_matches_brute_force(n, b):
    v = verify_conjecture_blowups(n, b)
    best, mins, zeros = brute_verdict(n, b)
    assert v.min_t == best == b * b * (n - 4 * b)
    assert set(v.minimizers) == mins == prism_orbit(extremal_vector(n, b))
    assert set(v.zero_t_vectors) == zeros
    assert v.conjecture_holds_in_class and v.minimizers_are_extremal_orbit


def test_verdict_examples():
    v = verify_conjecture_blowups(24, 4)
    assert v.min_t == 128 and v.conjecture_holds_in_class
    assert v.vectors_scanned == math.comb(29, 5)
    js = v.to_json()
    assert js["minimizer_classes"] == [list(orbit_key(extremal_vector(24, 4)))]
    with pytest.raises(GraphError):
        verify_conjecture_blowups(12, 3)  # b = n/4 is outside the strict range
    with pytest.raises(GraphError):
        verify_conjecture_blowups(12, 2.0)


def test_chunked_scan_merges_to_same_verdict():
    one = [v.to_json() for v in scan_blowups(20, [4], chunks=1)]
    for chunks in (2, 5, 21):
        assert [v.to_json() for v in scan_blowups(20, [4], chunks=chunks)] == one
    assert [v.to_json() for v in scan_blowups(20, [4], workers=3)] == one


def test_merge_is_commutative():
    assert scan_blowups(18, [3], chunks=2)[0].to_json() == scan_blowups(18, [3])[0].to_json()
    a = BlowupVerdict(18, 3, 10, 2, 60, [(1,) * 6], 1)
    b = BlowupVerdict(18, 3, 5, 1, 54, [(2,) * 6], 1)
    assert a.merge(b).to_json() == b.merge(a).to_json()
    assert a.merge(b).min_t == 54 and a.merge(b).vectors_scanned == 15
    with pytest.raises(ValueError):
        a.merge(BlowupVerdict(19, 3))


def test_conjecture_range_and_verify_range():
    assert list(conjecture_b_range(12)) == [2]
    assert list(conjecture_b_range(13)) == [3]
    assert list(conjecture_b_range(24)) == [4, 5]
    out = list(verify_range(12, 16))
    assert [(v.n, v.b) for v in out] == [(12, 2), (13, 3), (14, 3), (15, 3), (16, 3)]
