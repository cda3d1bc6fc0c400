import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import assume, given, strategies as st

from booktri.calculus import (CalculusError, PartVector, adjust_a2_to_a1, adjust_move_sides,
                              adjustment_monotonicity_suite, adjustment_step_bound,
                              case1_sides, case1_transform, case2_sides, case2_transform,
                              delta_identity_suite, equalize_a4_a5, equalize_sides,
                              extremal_vector, f_fn, full_adjustment, h1_fn, h2_fn, balanced_closed_form_sides,
                              qfloor, balance_sides, s_fn, sort_back_triple, t_fn)
from booktri.graph import PRISM


def sym_s(x):
    return sum(x[i] * x[j] for i, j in PRISM.edges)


def sym_h2(x, b, r):
    n1 = sum(x)
    return sym_s(x) - x[2] * (x[0] - b) - sp.floor(sp.Rational(n1 * n1, 4)) - sp.Rational(n1 * r, 12)


# -- examples ------------------------------------------------------------------

def test_s_t_examples():
    assert s_fn((1,) * 6) == 9
    assert s_fn((2,) * 6) == 36
    assert t_fn((1,) * 6) == 2
    assert t_fn((2,) * 6) == 16
    assert t_fn((3, 3, 0, 3, 3, 1)) == 9


def test_s_symbolic_expansion_of_extremal_shape():
    b, x, y = sp.symbols("b x y")
    expr = sp.expand(sym_s((b, b, x, b, b, y)).subs(y, sp.Symbol("n") - 4 * b - x))
    n = sp.Symbol("n")
    want = sp.expand((2 * b * n - 4 * b ** 2 + x * y).subs(y, n - 4 * b - x))
    assert sp.simplify(expr - want) == 0
    rng = random.Random(1)
    for _ in range(200):
        bb, xx, yy = rng.randint(0, 20), rng.randint(0, 20), rng.randint(0, 20)
        nn = 4 * bb + xx + yy
        assert s_fn((bb, bb, xx, bb, bb, yy)) == 2 * bb * nn - 4 * bb * bb + xx * yy


def test_f_h1_h2_examples():
    assert f_fn(extremal_vector(12, 2), 2) == 0
    assert f_fn((1,) * 6, 1) == 0
    assert f_fn((2,) * 6, 2) == 0
    assert h1_fn((1,) * 6, 0) == 0
    assert h1_fn((1,) * 6, 12) == -6
    assert h1_fn(extremal_vector(12, 2), 0) == 0
    assert h2_fn(extremal_vector(12, 2), 2, 0) == 0
    assert h2_fn((1,) * 6, 1, 0) == 0


def test_h2_3222221_against_sympy():
    a = (3, 2, 2, 2, 2, 1)
    assert h2_fn(a, 2, 0) == int(sym_h2([sp.Integer(v) for v in a], 2, 0)) == -2


@given(st.lists(st.fractions(0, 12, max_denominator=4), min_size=6, max_size=6),
       st.fractions(0, 6, max_denominator=4), st.integers(0, 20))
def test_functions_match_sympy(a, b, r):
    xs = [sp.Rational(q.numerator, q.denominator) for q in a]
    bs = sp.Rational(b.numerator, b.denominator)
    assert s_fn(a) == sym_s(xs)
    n1 = sum(xs)
    fl = sp.floor(n1 * n1 / 4)
    assert t_fn(a) == xs[0] * xs[1] * xs[2] + xs[3] * xs[4] * xs[5]
    assert f_fn(a, b) == (xs[0] * xs[1] * xs[2] + xs[3] * xs[4] * xs[5]
                          - xs[0] * (sym_s(xs) - fl) - bs * bs * (n1 - 4 * bs))
    assert h1_fn(a, r) == sym_s(xs) - fl - n1 * r / 12
    assert h2_fn(a, b, r) == sym_h2(xs, bs, r)


def test_extremal_vector_examples():
    assert tuple(extremal_vector(12, 2)) == (2,) * 6
    assert tuple(extremal_vector(13, 3)) == (3, 3, 0, 3, 3, 1)
    assert tuple(extremal_vector(24, 4)) == (4,) * 6
    with pytest.raises(Exception):
        extremal_vector(12, 1)


def test_floor_consistency():
    for n1 in range(0, 201):
        assert qfloor(Fraction(n1 * n1, 4)) == n1 * n1 // 4
    assert qfloor(Fraction(-1, 2)) == -1


def test_certificate_zeros_small_range():
    for n in range(1, 121):
        for b in range(-(-n // 6), n // 4 + 1):
            v = extremal_vector(n, b)
            assert (f_fn(v, b), h1_fn(v, 0), h2_fn(v, b, 0)) == (0, 0, 0)


# -- sort / adjust / equalize / cases --------------------------------------------

def test_sort_back_examples():
    assert tuple(sort_back_triple((5, 4, 3, 3, 4, 5))) == (5, 4, 3, 5, 4, 3)
    assert tuple(sort_back_triple((5, 4, 3, 5, 4, 3))) == (5, 4, 3, 5, 4, 3)


def test_sort_back_monotone_random():
    rng = random.Random(7)
    for _ in range(10**4):
        front = sorted((rng.randint(0, 20) for _ in range(3)), reverse=True)
        a = PartVector(front + [rng.randint(0, 20) for _ in range(3)])
        b = rng.randint(0, 20)
        r = rng.randint(0, 20)
        s = sort_back_triple(a)
        assert s.norm1 == a.norm1
        assert f_fn(s, b) <= f_fn(a, b)
        assert h2_fn(s, b, r) >= h2_fn(a, b, r)


def test_adjust_examples():
    tr = adjust_a2_to_a1((5, 4, 3, 5, 4, 3), 4)
    assert tuple(tr.terminal) == (5, 5, 2, 5, 4, 3) and tr.n_moves == 1
    assert [s.label for s in tr.steps] == ["start", "inc23"]
    tr = adjust_a2_to_a1((5, 5, 3, 5, 4, 3), 4)
    assert tuple(tr.terminal) == (5, 5, 3, 5, 4, 3) and tr.n_moves == 0


@pytest.mark.parametrize("bad", [(5, 4, 3, 5, 4, 3.5), (4, 5, 3, 3, 2, 1), (5, 3, 4, 3, 2, 1),
                                 (5, 4, 3, 3, 4, 1), (5, 4, 3, 4, 3, 2, 0)])
def test_adjust_rejects_preconditions(bad):
    with pytest.raises(CalculusError):
        adjust_a2_to_a1(bad, 3)
    with pytest.raises(CalculusError):
        adjust_a2_to_a1((5, 4, 3, 3, 2, 1), 4.5)  # a1 < b + 1


def test_step_bound_counterexample():
    # the closing "+ (a1 - a5) + 2" form is too small here; swap45 then a second phase
    a = (8, 4, 4, 5, 5, 5)
    tr = adjust_a2_to_a1(a, 3)
    assert tr.n_moves == 10
    assert 10 > (8 - 4) + (8 - 5) + 2
    assert tr.n_moves <= adjustment_step_bound(a)
    assert tr.f_nonincreasing() and tr.h2_nondecreasing()


@st.composite
def admissible(draw):
    a1 = draw(st.integers(2, 14))
    a2 = draw(st.integers(0, a1))
    a3 = draw(st.integers(0, a2))
    back = sorted((draw(st.integers(0, a1)) for _ in range(3)), reverse=True)
    b = draw(st.integers(0, a1 - 1))
    return PartVector([a1, a2, a3] + back), b, draw(st.integers(0, 20))


@given(admissible())
def test_adjust_trace_properties(sample):
    a, b, r = sample
    try:
        tr = adjust_a2_to_a1(a, b, r)
    except CalculusError:
        assume(False)
    assert tr.f_nonincreasing() and tr.h2_nondecreasing()
    assert tr.n_moves <= adjustment_step_bound(a)
    prev = tr.steps[0].vector
    for step in tr.steps[1:]:
        v = step.vector
        assert v.norm1 == a.norm1
        diff = [y - x for x, y in zip(prev, v)]
        if step.label == "swap45":
            assert (v[3], v[4]) == (prev[4], prev[3])
        else:
            assert sorted(diff) == [-1, 0, 0, 0, 0, 1]
        prev = v
    if tr.status == "a2_reached":
        assert tr.terminal[1] == a[0]


def test_equalize_examples():
    assert tuple(equalize_a4_a5((5, 5, 2, 5, 3, 3))) == (5, 5, 2, 4, 4, 3)
    e = equalize_a4_a5((5, 5, 2, 4, 3, 3))
    assert tuple(e) == (5, 5, 2, Fraction(7, 2), Fraction(7, 2), 3)
    (fl, fr), (hl, hr) = equalize_sides((5, 5, 2, 4, 3, 3), 4, 0)
    assert (fl, hl) == (fr, hr) == (Fraction(-1, 2), Fraction(1, 4))
    (fl, fr), (hl, hr) = equalize_sides((5, 5, 2, 4, 4, 3), 4, 0)
    assert fl == fr == hl == hr == 0
    with pytest.raises(CalculusError):
        equalize_a4_a5((5, 4, 2, 4, 3, 3))


def test_case_examples():
    v = (4, 4, 4, 4, 4, 4)
    assert tuple(case1_transform(v, 4)) == v  # 2b - a1 = a4
    assert tuple(case1_transform((5, 5, 4, 4, 4, 4), 4)) == (5, 5, 6, 3, 3, 4)
    assert PartVector(case1_transform((5, 5, 4, 4, 4, 4), 4)).norm1 == 26
    assert tuple(case2_transform((5, 5, 2, 5, 5, 4))) == (5, 5, 2, 5, 5, 4)
    assert tuple(case2_transform((5, 5, 4, 4, 4, 4))) == (5, 5, 2, 5, 5, 4)
    with pytest.raises(CalculusError):
        case2_transform((5, 5, 0, 4, 4, 4))


@given(st.integers(1, 30), st.fractions(0, 30, max_denominator=2),
       st.fractions(0, 30, max_denominator=2), st.fractions(0, 30, max_denominator=2),
       st.integers(0, 20))
def test_case_identities(top, a3, mid, a6, r):
    assume(mid <= top and a3 <= top and a6 <= top)
    v = PartVector((top, top, a3, mid, mid, a6))
    b = Fraction(top + mid, 2)  # keeps case1 entries nonnegative
    lhs, rhs = case1_sides(v, b)
    assert lhs == rhs
    if a3 + 2 * mid >= 2 * top:
        lhs, rhs = case2_sides(v, b, r)
        assert lhs == rhs
        assert case2_transform(v).norm1 == v.norm1


def test_balance_identity_examples():
    lhs, rhs = balance_sides((5, 4, 3, 5, 4, 3), 4)
    assert lhs == rhs
    for n, b in [(12, 2), (13, 3), (30, 6)]:
        lhs, rhs = balanced_closed_form_sides(n, b, b)
        assert lhs == rhs == 0


@given(admissible())
def test_move_identities(sample):
    a, b, r = sample
    for (fl, fr), (hl, hr) in adjust_move_sides(a, b, r).values():
        assert fl == fr and hl == hr


def test_delta_suite_and_monotonicity_small():
    rep = delta_identity_suite(seed=3, trials=500)
    assert rep["mismatch_count"] == 0
    assert all(v > 0 for v in rep["evaluations"].values())
    mono = adjustment_monotonicity_suite(seed=3, trials=500)
    assert mono["failure_count"] == 0 and mono["step_bound_exceeded"] == 0


def test_full_adjustment_labels():
    tr = full_adjustment((7, 5, 5, 4, 5, 6), 4, 0)
    labels = [s.label for s in tr.steps]
    assert labels == ["start", "sort456", "inc23", "inc56", "inc23", "equalize", "case2"]
    assert tr.status == "a2_reached"
    assert all(s.vector.norm1 == 32 for s in tr.steps)
    with pytest.raises(CalculusError):
        full_adjustment((6, 4, 3, 3, 4, 5), 4, 0)  # case2 would need a negative a3


def test_part_vector_validation():
    with pytest.raises(CalculusError):
        PartVector((1, 2, 3))
    with pytest.raises(CalculusError):
        PartVector((1, 2, 3, 4, 5, -1))
    v = PartVector(("1/2", 1, 1, 1, 1, 1))
    assert not v.is_integral and v.norm1 == Fraction(11, 2)
    assert v.to_json()[0] == "1/2"
