"""Exact rational calculus on six-part vectors of the prism.

S, T, F, H1, H2 are evaluated with ``fractions.Fraction`` (plain ints when
everything is integral).  The adjustment moves record every intermediate
vector together with F and H2 so monotonicity can be checked step by step.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .graph import PRISM

Number = int | Fraction

PRISM_EDGES_0 = PRISM.edges  # 0-based (i, j) pairs


class CalculusError(ValueError):
    pass


def _num(x) -> Number:
    t = type(x)
    if t is int:
        return x
    if t is Fraction:
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, bool):
        raise CalculusError("booleans are not part sizes")
    if isinstance(x, int):
        return x
    if isinstance(x, Rational):
        q = Fraction(x)
    elif isinstance(x, str):
        q = Fraction(x)
    elif isinstance(x, float):
        if not math.isfinite(x):
            raise CalculusError(f"non-finite entry {x!r}")
        q = Fraction(x)
    else:
        q = Fraction(int(x)) if hasattr(x, "__index__") else Fraction(x)
    return q.numerator if q.denominator == 1 else q


def fmt(x: Number) -> int | str:
    """JSON form: ints stay ints, proper fractions become 'p/q' strings."""
    x = _num(x)
    return x if isinstance(x, int) else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class PartVector:
    a: tuple

    def __init__(self, entries: Iterable):
        vals = tuple(_num(x) for x in entries)
        if len(vals) != 6:
            raise CalculusError(f"a part vector has 6 entries, got {len(vals)}")
        if any(x < 0 for x in vals):
            raise CalculusError(f"entries must be nonnegative: {vals}")
        object.__setattr__(self, "a", vals)

    def __getitem__(self, i):
        return self.a[i]

    def __iter__(self):
        return iter(self.a)

    def __len__(self):
        return 6

    @property
    def norm1(self) -> Number:
        return _num(sum(self.a))

    @property
    def is_integral(self) -> bool:
        return all(isinstance(x, int) for x in self.a)

    def replace(self, **idx) -> "PartVector":
        """``v.replace(a3=7)`` with 1-based names."""
        vals = list(self.a)
        for k, x in idx.items():
            vals[int(k[1:]) - 1] = x
        return PartVector(vals)

    def permuted(self, perm: Sequence[int]) -> "PartVector":
        """Entry ``i`` of the result is entry ``perm[i]`` of self."""
        return PartVector(self.a[p] for p in perm)

    def to_json(self) -> list:
        return [fmt(x) for x in self.a]

    def __repr__(self) -> str:
        return "PartVector(" + ", ".join(str(x) for x in self.a) + ")"


def as_vector(a) -> PartVector:
    return a if isinstance(a, PartVector) else PartVector(a)


def qfloor(q: Number) -> int:
    """Greatest integer <= q."""
    return q if isinstance(q, int) else math.floor(q)


def _quarter_floor(n1: Number) -> int:
    if isinstance(n1, int):
        return (n1 * n1) // 4
    return math.floor(n1 * n1 / 4)


def _norm(x) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _over12(x: Number) -> Number:
    if isinstance(x, int):
        return x // 12 if x % 12 == 0 else Fraction(x, 12)
    return x / 12


def _entries(a) -> tuple:
    return a.a if isinstance(a, PartVector) else PartVector(a).a


def _st_int(x):
    a1, a2, a3, a4, a5, a6 = x
    s = a1 * a2 + a2 * a3 + a1 * a3 + a1 * a4 + a2 * a5 + a3 * a6 + a4 * a5 + a5 * a6 + a4 * a6
    return s, a1 * a2 * a3 + a4 * a5 * a6


def _st(x: tuple):
    if all(type(v) is int for v in x):
        return _st_int(x)
    d, y = _scaled(x)
    s, t = _st_int(y)
    return Fraction(s, d * d), Fraction(t, d ** 3)


def _scaled(vals) -> tuple[int, list[int]]:
    """Common denominator d and the entries times d, all as ints."""
    d = math.lcm(*(v.denominator if type(v) is Fraction else 1 for v in vals))
    if d == 1:
        return 1, [int(v) for v in vals]
    return d, [int(v * d) for v in vals]


def s_fn(a) -> Number:
    return _norm(_st(_entries(a))[0])


def t_fn(a) -> Number:
    return _norm(_st(_entries(a))[1])


def f_fn(a, b) -> Number:
    # evaluated on entries scaled by a common denominator d, so only the
    # final division leaves the integers
    d, y = _scaled(_entries(a) + (_num(b),))
    bb = y.pop()
    n1 = sum(y)
    s, t = _st_int(y)
    q = (n1 * n1) // (4 * d * d)
    return _norm(Fraction(t - y[0] * (s - q * d * d) - bb * bb * (n1 - 4 * bb), d ** 3))


def h1_fn(a, r) -> Number:
    x = _entries(a)
    n1 = _norm(sum(x))
    return _norm(_st(x)[0] - _quarter_floor(n1) - _over12(n1 * _num(r)))


def h2_fn(a, b, r) -> Number:
    d, y = _scaled(_entries(a) + (_num(b), _num(r)))
    rr = y.pop()
    bb = y.pop()
    n1 = sum(y)
    q = (n1 * n1) // (4 * d * d)
    s = _st_int(y)[0]
    return _norm(Fraction(12 * (s - y[2] * (y[0] - bb) - q * d * d) - n1 * rr, 12 * d * d))


def extremal_vector(n: int, b: int) -> PartVector:
    if not (6 * b >= n and 4 * b <= n):
        raise CalculusError(f"b={b} outside [n/6, n/4] for n={n}")
    rest = n - 4 * b
    return PartVector((b, b, rest // 2, b, b, rest - rest // 2))


def sort_back_triple(a) -> PartVector:
    a = as_vector(a)
    return PartVector(a.a[:3] + tuple(sorted(a.a[3:], reverse=True)))


# -- Adjustment process ----------------------------------------------------

@dataclass
class TraceStep:
    label: str
    vector: PartVector
    F: Number
    H2: Number

    def to_json(self) -> dict:
        return {"label": self.label, "vector": self.vector.to_json(),
                "F": fmt(self.F), "H2": fmt(self.H2)}


@dataclass
class AdjustmentTrace:
    b: Number
    r: Number
    steps: list[TraceStep] = field(default_factory=list)
    status: str = ""

    @property
    def terminal(self) -> PartVector:
        return self.steps[-1].vector

    @property
    def n_moves(self) -> int:
        return sum(1 for s in self.steps if s.label != "start")

    def record(self, label: str, v: PartVector) -> None:
        self.steps.append(TraceStep(label, v, f_fn(v, self.b), h2_fn(v, self.b, self.r)))

    def f_nonincreasing(self) -> bool:
        return all(y.F <= x.F for x, y in zip(self.steps, self.steps[1:]))

    def h2_nondecreasing(self) -> bool:
        return all(y.H2 >= x.H2 for x, y in zip(self.steps, self.steps[1:]))

    def to_json(self) -> dict:
        return {"b": fmt(self.b), "r": fmt(self.r), "status": self.status,
                "moves": self.n_moves, "terminal": self.terminal.to_json(),
                "f_nonincreasing": self.f_nonincreasing(),
                "h2_nondecreasing": self.h2_nondecreasing(),
                "steps": [s.to_json() for s in self.steps]}


def _inc23(v: PartVector) -> PartVector:
    return PartVector((v[0], v[1] + 1, v[2] - 1, v[3], v[4], v[5]))


def _inc56(v: PartVector) -> PartVector:
    return PartVector((v[0], v[1], v[2], v[3], v[4] + 1, v[5] - 1))


def _swap45(v: PartVector) -> PartVector:
    return PartVector((v[0], v[1], v[2], v[4], v[3], v[5]))


def check_adjust_preconditions(a: PartVector, b) -> None:
    if not a.is_integral:
        raise CalculusError(f"adjustment needs integer entries: {a}")
    if a[0] != max(a):
        raise CalculusError(f"a1 must be the maximum entry: {a}")
    if not (a[0] >= a[1] >= a[2]):
        raise CalculusError(f"need a1 >= a2 >= a3: {a}")
    if not (a[3] >= a[4] >= a[5]):
        raise CalculusError(f"entries 4..6 must be sorted nonincreasing: {a}")
    if a[0] < _num(b) + 1:
        raise CalculusError(f"need a1 >= b + 1, got a1={a[0]}, b={b}")


def adjustment_step_bound(a) -> int:
    """Moves needed in the worst case, counting the swap."""
    a = as_vector(a)
    return (a[0] - a[1]) + (a[0] - a[4]) + (a[0] - a[3]) + 1


def adjust_a2_to_a1(a, b, r: Number = 0) -> AdjustmentTrace:
    """Push a2 up to a1 by unit moves, swapping entries 4 and 5 if a5 gets there first.

    ``status`` is ``"a2_reached"`` on success and ``"a5_reached_twice"`` when
    the second phase also stops on a5 (a configuration excluded by a
    contradiction argument; reported here rather than raised).
    """
    a = as_vector(a)
    b = _num(b)
    check_adjust_preconditions(a, b)
    trace = AdjustmentTrace(b=b, r=r)
    trace.record("start", a)
    cap = 4 * max(a)
    a1 = a[0]
    v = a
    for phase in (1, 2):
        while v[1] != a1 and v[4] != a1:
            if trace.n_moves >= cap:
                raise CalculusError(f"adjustment exceeded the hard cap of {cap} moves")
            if v[4] - v[5] >= v[1] - v[2]:
                if v[2] < 1:
                    raise CalculusError(f"inc23 would make a3 negative at {v}")
                v, label = _inc23(v), "inc23"
            else:
                if v[5] < 1:
                    raise CalculusError(f"inc56 would make a6 negative at {v}")
                v, label = _inc56(v), "inc56"
            trace.record(label, v)
        if v[1] == a1:
            trace.status = "a2_reached"
            return trace
        if phase == 1:
            v = _swap45(v)
            trace.record("swap45", v)
    trace.status = "a5_reached_twice"
    return trace


def equalize_a4_a5(a) -> PartVector:
    a = as_vector(a)
    if not (a[0] == a[1] == max(a)):
        raise CalculusError(f"equalize needs a1 = a2 = max entry: {a}")
    if a[5] > min(a[3], a[4]):
        raise CalculusError(f"equalize needs a6 minimal among entries 4..6: {a}")
    mid = _num(Fraction(a[3] + a[4]) / 2)
    return PartVector((a[0], a[1], a[2], mid, mid, a[5]))


def case1_transform(a, b) -> PartVector:
    a = as_vector(a)
    b = _num(b)
    a1 = a[0]
    a3 = a[2] + a[3] + a[4] - 4 * b + 2 * a1
    out = (a1, a[1], a3, 2 * b - a1, 2 * b - a1, a[5])
    if any(x < 0 for x in out):
        raise CalculusError(f"case1 transform gives a negative entry: {out}")
    return PartVector(out)


def case2_transform(a) -> PartVector:
    a = as_vector(a)
    a1 = a[0]
    a3 = a[2] + a[3] + a[4] - 2 * a1
    if a3 < 0:
        raise CalculusError(f"case2 transform gives a3 = {a3} < 0")
    return PartVector((a1, a[1], a3, a1, a1, a[5]))


def case_one_applies(a, b, r) -> bool:
    """The split between the two final transforms."""
    a = as_vector(a)
    if not a[0] > a[5]:
        return False
    return a[0] - 2 * _num(b) + a[3] <= -Fraction(a.norm1 * _num(r), 13 * (a[0] - a[5]))


def full_adjustment(a, b, r: Number = 0) -> AdjustmentTrace:
    """Sort, adjust, equalize, then apply the case transform that fits."""
    a = as_vector(a)
    b = _num(b)
    trace = AdjustmentTrace(b=b, r=r)
    trace.record("start", a)
    s = sort_back_triple(a)
    if s != a:
        trace.record("sort456", s)
    adj = adjust_a2_to_a1(s, b, r)
    trace.steps.extend(adj.steps[1:])
    trace.status = adj.status
    if adj.status != "a2_reached":
        return trace
    eq = equalize_a4_a5(adj.terminal)
    trace.record("equalize", eq)
    if case_one_applies(eq, b, r):
        trace.record("case1", case1_transform(eq, b))
    else:
        trace.record("case2", case2_transform(eq))
    return trace


# -- Closed-form delta identities ------------------------------------------

def sort_back_sides(a, b):
    a = as_vector(a)
    a1, a2, a3, a4, a5, a6 = a
    p = sort_back_triple(a)
    lhs = f_fn(p, b) - f_fn(a, b)
    rhs = a1 * (a1 * a4 + a2 * a5 + a3 * a6 - a1 * p[3] - a2 * p[4] - a3 * p[5])
    return lhs, rhs


def balance_sides(a, b):
    """F(a'') - F(a') against its closed form; ``a`` is the sorted vector a'."""
    a = as_vector(a)
    a1, a2, a3, a4, a5, a6 = a
    n1 = a.norm1
    rest = n1 - 4 * a1
    app = PartVector((a1, a1, -((-rest) // 2), a1, a1, rest // 2))
    lhs = f_fn(app, b) - f_fn(a, b)
    rhs = (a1 * (a2 - a1) * (a5 - a6) - a4 * (a1 - a5) * (a1 - a6)
           - a1 * (a1 - a4) * (a1 - a6)
           - a1 * qfloor(Fraction((a3 + a2 + a5 + a4 - 3 * a1 - a6) ** 2, 4)))
    return lhs, rhs


def balanced_closed_form_sides(n1: int, a1: int, b):
    rest = n1 - 4 * a1
    app = PartVector((a1, a1, -((-rest) // 2), a1, a1, rest // 2))
    lhs = f_fn(app, b)
    rhs = (b - a1) * (4 * a1 * a1 + 4 * b * b + 4 * a1 * b - a1 * n1 - b * n1)
    return lhs, rhs


def equalize_sides(a, b, r):
    a = as_vector(a)
    e = equalize_a4_a5(a)
    d45 = Fraction((a[3] - a[4]) ** 2, 4)
    return ((f_fn(e, b) - f_fn(a, b), d45 * (a[5] - a[0])),
            (h2_fn(e, b, r) - h2_fn(a, b, r), d45))


def case1_sides(a, b):
    a = as_vector(a)
    d = case1_transform(a, b)
    a1, a4, a6 = a[0], a[3], a[5]
    return f_fn(d, b) - f_fn(a, b), (a1 - 2 * b + a4) * (2 * b + a4 - a1) * (a1 - a6)


def case2_sides(a, b, r):
    a = as_vector(a)
    d = case2_transform(a)
    a1, a4 = a[0], a[3]
    return h2_fn(d, b, r) - h2_fn(a, b, r), (a1 - a4) * (a1 - 2 * b + a4)


def adjust_move_sides(a, b, r):
    """Closed-form F and H2 deltas of each unit move at ``a`` (when legal)."""
    a = as_vector(a)
    a1, a2, a3, a4, a5, a6 = a
    out = {}
    if a3 >= 1:
        v = _inc23(a)
        out["inc23"] = ((f_fn(v, b) - f_fn(a, b), a1 * (a6 - a5)),
                        (h2_fn(v, b, r) - h2_fn(a, b, r), a1 - a2 + a3 - b + a5 - a6 - 1))
    if a6 >= 1:
        v = _inc56(a)
        out["inc56"] = ((f_fn(v, b) - f_fn(a, b),
                         a1 * (1 - a2 + a3 + a5 - a6) + a4 * (-1 - a5 + a6)),
                        (h2_fn(v, b, r) - h2_fn(a, b, r), a2 - a3 - a5 + a6 - 1))
    if a5 == a1:
        v = _swap45(a)
        out["swap45"] = ((f_fn(v, b) - f_fn(a, b), a1 * (a1 - a2) * (a4 - a5)),
                         (h2_fn(v, b, r) - h2_fn(a, b, r), (a1 - a2) * (a5 - a4)))
    return out


IDENTITIES = ("sort_back", "balance", "balanced_closed_form", "equalize_F", "equalize_H2",
              "case1", "case2", "inc23_F", "inc23_H2", "inc56_F", "inc56_H2",
              "swap45_F", "swap45_H2")


def _near_balanced(rng: random.Random, m: int, spread: int) -> list[int]:
    return [m + rng.randint(-spread, spread) for _ in range(6)]


def _sorted_sample(rng: random.Random, room: bool = False) -> tuple[list[int], int]:
    """Integer vector with a1 max, a1>=a2>=a3, a4>=a5>=a6, and b <= a1 - 1.

    With ``room`` the vector also satisfies n1 >= 4 a1, so that the
    replacement vector (a1, a1, *, a1, a1, *) has nonnegative entries.
    """
    while True:
        m = rng.randint(2, 40)
        x = _near_balanced(rng, m, min(m, rng.randint(0, 6)))
        x.sort(reverse=True)
        a1 = x[0]
        rest = x[1:]
        rng.shuffle(rest)
        front = sorted(rest[:2], reverse=True)
        back = sorted(rest[2:], reverse=True)
        v = [a1] + front + back
        if not room or sum(v) >= 4 * a1:
            return v, rng.randint(0, max(0, a1 - 1))


def _half(rng: random.Random, lo: int, hi: int) -> Number:
    return _num(Fraction(rng.randint(2 * lo, 2 * hi), 2))


def delta_identity_suite(seed: int = 0, trials: int = 1000) -> dict:
    """Evaluate every closed-form delta against the direct definition."""
    rng = random.Random(seed)
    counts = {k: 0 for k in IDENTITIES}
    mismatches: list[dict] = []

    def check(name, lhs, rhs, **ctx):
        counts[name] += 1
        if lhs != rhs and len(mismatches) < 50:
            mismatches.append({"identity": name, "lhs": fmt(lhs), "rhs": fmt(rhs),
                               **{k: (v.to_json() if isinstance(v, PartVector) else fmt(v))
                                  for k, v in ctx.items()}})
        elif lhs != rhs:
            mismatches.append({"identity": name})

    for _ in range(trials):
        m = rng.randint(1, 40)
        raw = PartVector(_near_balanced(rng, m, min(m, 8)))
        b = rng.randint(0, 2 * m)
        check("sort_back", *sort_back_sides(raw, b), a=raw, b=b)

        s, bs = _sorted_sample(rng, room=True)
        sv = PartVector(s)
        check("balance", *balance_sides(sv, bs), a=sv, b=bs)

        a1 = rng.randint(0, 40)
        n1 = 4 * a1 + rng.randint(0, 2 * a1 + 3)
        bb = rng.randint(0, 40)
        check("balanced_closed_form", *balanced_closed_form_sides(n1, a1, bb), n1=n1, a1=a1, b=bb)

        # a1 = a2 = max, a6 minimal among 4..6 (rational entries allowed)
        top = rng.randint(2, 40)
        a4, a5 = _half(rng, 1, top), _half(rng, 1, top)
        a6 = _half(rng, 0, int(min(a4, a5)))
        ev = PartVector((top, top, _half(rng, 0, top), a4, a5, a6))
        r = rng.randint(0, 30)
        bq = _half(rng, 0, top)
        (fl, fr), (hl, hr) = equalize_sides(ev, bq, r)
        check("equalize_F", fl, fr, a=ev, b=bq)
        check("equalize_H2", hl, hr, a=ev, b=bq, r=r)

        # a1 = a2, a4 = a5 for the case transforms
        top = rng.randint(2, 40)
        mid = _half(rng, 0, top)
        cv = PartVector((top, top, _half(rng, 0, top), mid, mid, _half(rng, 0, top)))
        bq = _half(rng, (top + 1) // 2, top)
        try:
            check("case1", *case1_sides(cv, bq), a=cv, b=bq)
        except CalculusError:
            pass
        try:
            check("case2", *case2_sides(cv, bq, r), a=cv, b=bq, r=r)
        except CalculusError:
            pass

        s, bs = _sorted_sample(rng)
        sv = PartVector(s)
        if rng.random() < 0.25:
            sv = sv.replace(a5=sv[0], a4=sv[0])
        for name, ((fl, fr), (hl, hr)) in adjust_move_sides(sv, bs, r).items():
            check(name + "_F", fl, fr, a=sv, b=bs)
            check(name + "_H2", hl, hr, a=sv, b=bs, r=r)

    return {"seed": seed, "trials": trials, "evaluations": counts,
            "mismatch_count": len(mismatches), "mismatches": mismatches[:50]}


def adjustment_monotonicity_suite(seed: int = 0, trials: int = 1000, full: bool = True) -> dict:
    """Random admissible vectors through the adjustment; F and H2 checked at every step.

    Adjustment traces (inc23 / inc56 / swap45) must have F nonincreasing and
    H2 nondecreasing.  With ``full`` the sort and equalize steps of the whole
    pipeline are checked too; the two case transforms are reported separately
    since their monotonicity carries slack terms.
    """
    rng = random.Random(seed)
    failures: list[dict] = []
    statuses: dict[str, int] = {}
    steps = 0
    longest = 0
    bound_exceeded = 0
    rejected = 0
    for _ in range(trials):
        while True:
            s, b = _sorted_sample(rng)
            a = PartVector(s)
            r = rng.randint(0, 30)
            try:
                trace = adjust_a2_to_a1(a, b, r)
                break
            except CalculusError:
                # a move would drive a3 or a6 negative: outside the process's domain
                rejected += 1
        statuses[trace.status] = statuses.get(trace.status, 0) + 1
        steps += trace.n_moves
        longest = max(longest, trace.n_moves)
        if trace.n_moves > adjustment_step_bound(a):
            bound_exceeded += 1
        ok = trace.f_nonincreasing() and trace.h2_nondecreasing()
        if full and ok and trace.status == "a2_reached":
            eq = equalize_a4_a5(trace.terminal)
            t2 = trace.terminal
            ok = f_fn(eq, b) <= f_fn(t2, b) and h2_fn(eq, b, r) >= h2_fn(t2, b, r)
        if not ok and len(failures) < 50:
            failures.append({"a": a.to_json(), "b": b, "r": r, "trace": trace.to_json()})
        elif not ok:
            failures.append({})
    return {"seed": seed, "trials": trials, "rejected_samples": rejected,
            "statuses": statuses, "moves": steps,
            "longest_trace": longest, "step_bound_exceeded": bound_exceeded,
            "failure_count": len(failures), "failures": failures[:50]}
