"""Stability decomposition into six prism parts, exceptional-vertex split, certificates.

The pipeline follows the constructive steps of the stability argument: drop
vertices of irregular degree (R0), pick a first anchor triangle x1x2x3 whose
common neighbourhoods are nearly independent, split N(x1) into W2, W3, W4,
pick a second anchor x4x5x6 and split B' into W1, W5, W6, then remove the bad
sets B1, B2 and orient the 5/6 labels by a type vote.  The epsilon powers of
the proof are replaced by the tunables in :class:`StabilityParams`.

All vertex sets are Python int bit masks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Iterable, Sequence

from .calculus import PartVector, f_fn, fmt, h1_fn, h2_fn, extremal_vector
from .graph import PRISM, PRISM_AUTOMORPHISMS, Graph, bits_of
from .invariants import book_number

PRISM_ADJ = PRISM.adjacency  # 0-based neighbour sets


class DecompositionError(RuntimeError):
    """The construction could not proceed; ``step`` names where it stopped."""

    def __init__(self, step: str, message: str):
        super().__init__(f"{step}: {message}")
        self.step = step
        self.message = message

    def to_json(self) -> dict:
        return {"ok": False, "failed_step": self.step, "message": self.message}


@dataclass
class StabilityParams:
    tau0: float = 0.05
    tau_tri: float = 0.02
    c0: float = 2.0
    tau1: float = 0.15
    c1: float = 2.0
    b: int | None = None
    iterate_bad_sets: bool = False
    canonicalize: bool = True
    fallback: bool = True

    def __post_init__(self):
        for name in ("tau0", "tau_tri", "tau1"):
            v = getattr(self, name)
            if not (0 < v < 1):
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        for name in ("c0", "c1"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    @classmethod
    def from_dict(cls, d: dict) -> "StabilityParams":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown stability parameters: {sorted(unknown)}")
        return cls(**d)

    def q(self, name: str) -> Fraction:
        """Exact rational value of a float parameter (via its decimal string)."""
        return Fraction(str(getattr(self, name)))

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# -- set helpers ------------------------------------------------------------

def _mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _deg(g: Graph, x: int, mask: int) -> int:
    return (g.rows[x] & mask).bit_count()


def _edges_in(g: Graph, mask: int) -> int:
    return sum(_deg(g, x, mask) for x in bits_of(mask)) // 2


def _edges_between(g: Graph, s: int, t: int) -> int:
    return sum(_deg(g, x, t) for x in bits_of(s))


# -- stages -----------------------------------------------------------------

def compute_r0(g: Graph, tau0: float) -> set[int]:
    """Vertices whose degree is at least tau0*n away from n/2."""
    t = Fraction(str(tau0))
    n = g.n
    return {v for v in range(n) if abs(Fraction(g.degree(v)) - Fraction(n, 2)) >= t * n}


class _CommonEdges:
    """Memoised e(N(x, y)) for pairs of vertices."""

    def __init__(self, g: Graph):
        self.g = g
        self.cache: dict[tuple[int, int], int] = {}

    def __call__(self, x: int, y: int) -> int:
        key = (x, y) if x < y else (y, x)
        if key not in self.cache:
            self.cache[key] = _edges_in(self.g, self.g.rows[x] & self.g.rows[y])
        return self.cache[key]


def _triangles(g: Graph, allowed: int) -> Iterable[tuple[int, int, int]]:
    rows = g.rows
    for u in bits_of(allowed):
        hv = rows[u] & allowed & ~((2 << u) - 1)
        for v in bits_of(hv):
            for w in bits_of(rows[u] & rows[v] & allowed & ~((2 << v) - 1)):
                yield u, v, w


def select_good_triangle(g: Graph, excluded: Iterable[int] = (), tau_tri: float = 0.02,
                         _ce: _CommonEdges | None = None):
    """Triangle avoiding ``excluded`` with all three e(N(x,y)) <= tau_tri*n^2.

    Among qualifying triangles the smallest maximum count wins; ties go to the
    lexicographically first vertex triple.  Returns None if nothing qualifies.
    """
    ce = _ce or _CommonEdges(g)
    limit = Fraction(str(tau_tri)) * g.n * g.n
    allowed = ((1 << g.n) - 1) & ~_mask(excluded)
    best, best_key = None, None
    for tri in _triangles(g, allowed):
        u, v, w = tri
        worst = max(ce(u, v), ce(v, w), ce(u, w))
        if worst > limit:
            continue
        key = (worst, tri)
        if best_key is None or key < best_key:
            best, best_key = tri, key
    return best


def _second_anchor(g: Graph, w4: int, b_mask: int, limit, ce: _CommonEdges):
    best, best_key = None, None
    rows = g.rows
    for x4 in bits_of(w4):
        nb = rows[x4] & b_mask
        for x5 in bits_of(nb):
            for x6 in bits_of(nb & rows[x5] & ~((2 << x5) - 1)):
                worst = max(ce(x4, x5), ce(x4, x6), ce(x5, x6))
                if worst > limit:
                    continue
                key = (worst, (x4, x5, x6))
                if best_key is None or key < best_key:
                    best, best_key = (x4, x5, x6), key
    return best


@dataclass
class DecompositionResult:
    n: int
    parts: list[list[int]]
    exceptional: list[int]
    anchors: list[int | None]
    relabeling: list[int]
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def part_masks(self) -> list[int]:
        return [_mask(p) for p in self.parts]

    def labels(self) -> list[int]:
        """Part index (0..5) per vertex, -1 for R."""
        lab = [-1] * self.n
        for i, p in enumerate(self.parts):
            for v in p:
                lab[v] = i
        return lab

    def is_partition(self) -> bool:
        seen = sorted(itertools.chain(*self.parts, self.exceptional))
        return seen == list(range(self.n))

    @property
    def violations(self) -> int:
        return self.diagnostics["edges_inside_parts"] + self.diagnostics["edges_on_non_prism_pairs"]

    def to_json(self) -> dict:
        return {"ok": True, "n": self.n, "method": self.method,
                "parts": self.parts, "exceptional": self.exceptional,
                "anchors": {"first": self.anchors[:3], "second": self.anchors[3:]},
                "relabeling": self.relabeling, "diagnostics": self.diagnostics}


def part_diagnostics(g: Graph, parts: Sequence[int], extra: dict | None = None) -> dict:
    n = g.n
    inside = sum(_edges_in(g, m) for m in parts)
    nonprism = 0
    for i, j in itertools.combinations(range(6), 2):
        if j not in PRISM_ADJ[i]:
            nonprism += _edges_between(g, parts[i], parts[j])
    min_deg = None
    for i in range(6):
        for j in PRISM_ADJ[i]:
            if parts[j] == 0:
                continue
            for x in bits_of(parts[i]):
                d = _deg(g, x, parts[j])
                min_deg = d if min_deg is None else min(min_deg, d)
    covered = 0
    for m in parts:
        covered |= m
    out = {
        "part_sizes": [m.bit_count() for m in parts],
        "size_deviation_from_n_over_6": [fmt(Fraction(m.bit_count()) - Fraction(n, 6)) for m in parts],
        "edges_inside_parts": inside,
        "edges_on_non_prism_pairs": nonprism,
        "min_prism_edge_degree": min_deg,
        "exceptional_size": n - covered.bit_count(),
    }
    if extra:
        out.update(extra)
    return out


def _bad_sets(g: Graph, W: list[int], p: StabilityParams) -> tuple[int, int]:
    n = g.n
    t1 = p.q("tau1") * n
    low = (Fraction(1, 6) - p.q("tau1")) * n
    b1 = 0
    for x in bits_of(W[1] | W[2]):
        if _deg(g, x, W[4]) >= t1 and _deg(g, x, W[5]) >= t1:
            b1 |= 1 << x
    for y in bits_of(W[4] | W[5]):
        if _deg(g, y, W[1]) >= t1 and _deg(g, y, W[2]) >= t1:
            b1 |= 1 << y
    b2 = 0
    for i, j in ((1, 2), (2, 1), (4, 5), (5, 4)):
        for x in bits_of(W[i]):
            if _deg(g, x, W[j]) <= low:
                b2 |= 1 << x
    return b1, b2


def _types(g: Graph, x: int, a: int, b: int, lim) -> tuple[bool, bool]:
    """(type-a, type-b) flags: few neighbours in part a, resp. part b.

    A vertex qualifying for both keeps only the type with the strictly
    smaller degree; an exact tie stays ambiguous and is sent to R.
    """
    da, db = _deg(g, x, a), _deg(g, x, b)
    ta, tb = da <= lim, db <= lim
    if ta and tb and da != db:
        return da < db, db < da
    return ta, tb


def _construction_pipeline(g: Graph, p: StabilityParams) -> tuple[list[int], list, dict]:
    n = g.n
    full = (1 << n) - 1
    r0 = _mask(compute_r0(g, p.tau0))
    ce = _CommonEdges(g)
    first = select_good_triangle(g, bits_of(r0), p.tau_tri, ce)
    if first is None:
        raise DecompositionError("first_anchor", "no triangle outside R0 has sparse common neighbourhoods")
    x1, x2, x3 = first
    A = g.rows[x1] & ~r0
    B = full & ~(A | r0)
    W2 = A & g.rows[x3]
    W3 = A & g.rows[x2]
    thr = (Fraction(1, 2) - p.q("c0") * p.q("tau0")) * n
    W4 = _mask(x for x in bits_of(A & ~(W2 | W3)) if _deg(g, x, B) >= thr)
    limit = p.q("tau_tri") * n * n
    second = _second_anchor(g, W4, B, limit, ce)
    if second is None:
        raise DecompositionError("second_anchor", "no triangle x4x5x6 with x4 in W4 and x5, x6 in B qualifies")
    x4, x5, x6 = second
    Bp = B & g.rows[x4]
    W5 = Bp & g.rows[x6]
    W6 = Bp & g.rows[x5]
    W1 = _mask(y for y in bits_of(Bp & ~(W5 | W6)) if _deg(g, y, A) >= thr)
    overlap = (W2 & W3) | (W5 & W6)
    W = [W1 & ~overlap, W2 & ~overlap, W3 & ~overlap, W4, W5 & ~overlap, W6 & ~overlap]

    b1_total = b2_total = 0
    while True:
        b1, b2 = _bad_sets(g, W, p)
        b1_total |= b1
        b2_total |= b2
        W = [m & ~(b1 | b2) for m in W]
        if not p.iterate_bad_sets or not (b1 | b2):
            break

    # type vote: W2 should be type-6, W3 type-5, W5 type-3, W6 type-2
    lim = p.q("tau1") * n
    as_is = swapped = 0
    for x in bits_of(W[1]):
        t5, t6 = _types(g, x, W[4], W[5], lim)
        as_is += t6 and not t5
        swapped += t5 and not t6
    for x in bits_of(W[2]):
        t5, t6 = _types(g, x, W[4], W[5], lim)
        as_is += t5 and not t6
        swapped += t6 and not t5
    for y in bits_of(W[4]):
        t2, t3 = _types(g, y, W[1], W[2], lim)
        as_is += t3 and not t2
        swapped += t2 and not t3
    for y in bits_of(W[5]):
        t2, t3 = _types(g, y, W[1], W[2], lim)
        as_is += t2 and not t3
        swapped += t3 and not t2
    oriented_swap = swapped > as_is
    if oriented_swap:
        W[4], W[5] = W[5], W[4]
        x5, x6 = x6, x5
    wrong = 0
    for i, (a, b, want_small) in {1: (4, 5, 5), 2: (4, 5, 4), 4: (1, 2, 2), 5: (1, 2, 1)}.items():
        keep = 0
        for x in bits_of(W[i]):
            small_a, small_b = _types(g, x, W[a], W[b], lim)
            ok = small_b and not small_a if want_small == b else small_a and not small_b
            if ok:
                keep |= 1 << x
            else:
                wrong |= 1 << x
        W[i] = keep
    extra = {
        "r0_size": r0.bit_count(),
        "overlap_to_R": overlap.bit_count(),
        "B1_size": b1_total.bit_count(),
        "B2_size": b2_total.bit_count(),
        "type_rejected": wrong.bit_count(),
        "type_vote": {"as_built": as_is, "swapped": swapped, "swapped_5_6": oriented_swap},
    }
    return W, [x1, x2, x3, x4, x5, x6], extra


def _twin_class_fallback(g: Graph) -> list[int] | None:
    """Exact recovery when g is a blow-up of an induced subgraph of the prism.

    Vertices with identical neighbourhoods form classes; the quotient must be
    an induced subgraph of the prism (classes independent, adjacency exact).
    """
    classes: dict[int, int] = {}
    for v in range(g.n):
        classes[g.rows[v]] = classes.get(g.rows[v], 0) | (1 << v)
    masks = sorted(classes.values(), key=lambda m: (m & -m))
    k = len(masks)
    if k > 6 or any(g.rows[bits_of(m)[0]] & m for m in masks):
        return None
    rep = [bits_of(m)[0] for m in masks]
    for target in itertools.permutations(range(6), k):
        ok = all(((g.rows[rep[c]] >> rep[d]) & 1) == (target[d] in PRISM_ADJ[target[c]])
                 for c in range(k) for d in range(c + 1, k))
        if ok:
            W = [0] * 6
            for c, t in enumerate(target):
                W[t] = masks[c]
            return W
    return None


def canonical_relabeling(W: Sequence[int]) -> tuple[int, ...]:
    """Automorphism sigma minimising (sorted W[sigma[0]], ..., sorted W[sigma[5]])."""
    best, best_key = None, None
    for sigma in PRISM_AUTOMORPHISMS:
        key = tuple(tuple(bits_of(W[sigma[i]])) for i in range(6))
        if best_key is None or key < best_key:
            best, best_key = sigma, key
    return best


def decompose_prism(g: Graph, params: StabilityParams | None = None) -> DecompositionResult:
    p = params or StabilityParams()
    try:
        W, anchors, extra = _construction_pipeline(g, p)
        method = "construction"
    except DecompositionError as err:
        W = _twin_class_fallback(g) if p.fallback else None
        if W is None:
            raise
        anchors = [None] * 6
        extra = {"construction_failed_step": err.step, "construction_message": err.message}
        method = "twin_classes"
    sigma = canonical_relabeling(W) if p.canonicalize else tuple(range(6))
    W = [W[sigma[i]] for i in range(6)]
    anchors = [anchors[sigma[i]] for i in range(6)]
    covered = 0
    for m in W:
        covered |= m
    R = ((1 << g.n) - 1) & ~covered
    res = DecompositionResult(
        n=g.n,
        parts=[bits_of(m) for m in W],
        exceptional=bits_of(R),
        anchors=anchors,
        relabeling=list(sigma),
        method=method,
        diagnostics=part_diagnostics(g, W, extra),
    )
    if not res.is_partition():
        raise AssertionError("decomposition is not a partition")
    return res


def assignment_agreement(dec: DecompositionResult, truth: Sequence[int]) -> Fraction:
    """Best fraction of vertices whose part matches ``truth`` up to a prism automorphism.

    ``truth[v]`` is the true part index of v; vertices placed in R never agree.
    """
    lab = dec.labels()
    best = 0
    for sigma in PRISM_AUTOMORPHISMS:
        hit = sum(1 for v in range(dec.n) if lab[v] >= 0 and lab[v] == sigma[truth[v]])
        best = max(best, hit)
    return Fraction(best, dec.n)


# -- exceptional vertices ---------------------------------------------------

@dataclass
class ExceptionalSplit:
    r1: list[int]
    r2: list[int]
    r3: list[int]
    phi: dict[int, int]
    phi_rule: dict[int, str]
    phi_violations: list[int]
    a: PartVector
    r: int

    def to_json(self) -> dict:
        return {"r1": self.r1, "r2": self.r2, "r3": self.r3,
                "phi": {str(x): i + 1 for x, i in sorted(self.phi.items())},
                "phi_rule": {str(x): s for x, s in sorted(self.phi_rule.items())},
                "phi_violations": self.phi_violations,
                "a": self.a.to_json(), "r": self.r}


def _phi_candidates(g: Graph, x: int, W: Sequence[int]) -> list[int]:
    out = []
    for i in range(6):
        if all(_deg(g, x, W[j]) == 0 for j in range(6) if j not in PRISM_ADJ[i]):
            out.append(i)
    return out


def classify_exceptional(g: Graph, dec: DecompositionResult,
                         params: StabilityParams | None = None) -> ExceptionalSplit:
    p = params or StabilityParams()
    if not dec.is_partition():
        raise ValueError("decomposition does not partition the vertex set")
    n = g.n
    shift = p.q("c1") * p.q("tau1")
    lo = (Fraction(1, 3) + shift) * n
    hi = (Fraction(5, 12) + shift) * n
    W = dec.part_masks
    r1, r2, r3 = [], [], []
    for x in dec.exceptional:
        d = g.degree(x)
        (r1 if d < lo else r2 if d < hi else r3).append(x)
    phi, rule, bad = {}, {}, []
    for x in r2 + r3:
        cands = _phi_candidates(g, x, W)
        if not cands:
            bad.append(x)
            continue
        if len(cands) == 1:
            phi[x], rule[x] = cands[0], "unique"
        else:
            score = {i: sum(_deg(g, x, W[j]) for j in PRISM_ADJ[i]) for i in cands}
            top = max(score.values())
            phi[x], rule[x] = min(i for i in cands if score[i] == top), "max_pattern_degree"
    sizes = [m.bit_count() for m in W]
    for x in r3:
        if x in phi:
            sizes[phi[x]] += 1
    return ExceptionalSplit(sorted(r1), sorted(r2), sorted(r3), phi, rule, sorted(bad),
                            PartVector(sizes), len(r1) + len(r2))


def normalize_vector(a) -> tuple[PartVector, tuple[int, ...]]:
    """Relabel by a prism automorphism so a1 is maximal and a2 >= a3.

    Among the automorphisms achieving this, the lexicographically largest
    result is taken.  Returns the vector and the automorphism used.
    """
    a = PartVector(a)
    cands = []
    for sigma in PRISM_AUTOMORPHISMS:
        v = a.permuted(sigma)
        if v[0] == max(v) and v[1] >= v[2]:
            cands.append((tuple(v), sigma))
    vec, sigma = max(cands)
    return PartVector(vec), sigma


def evaluate_certificate(split: ExceptionalSplit | PartVector | Sequence, b, r: int | None = None) -> dict:
    """Exact F, H1, H2 on the normalised part vector, with sign flags."""
    if isinstance(split, ExceptionalSplit):
        a, r = split.a, split.r if r is None else r
    else:
        a, r = PartVector(split), (0 if r is None else r)
    v, sigma = normalize_vector(a)
    F, H1, H2 = f_fn(v, b), h1_fn(v, r), h2_fn(v, b, r)
    n1 = v.norm1
    extremal = False
    if isinstance(n1, int) and isinstance(b, int) and 6 * b >= n1 >= 4 * b:
        ext = tuple(extremal_vector(n1, b))
        extremal = tuple(v) in {ext, ext[:2] + (ext[5],) + ext[3:5] + (ext[2],)}
    return {
        "a": a.to_json(), "normalized": v.to_json(), "automorphism": list(sigma),
        "b": fmt(b), "r": r, "F": fmt(F), "H1": fmt(H1), "H2": fmt(H2),
        "flags": {"F_nonpositive": F <= 0, "H1_nonnegative": H1 >= 0,
                  "H2_nonnegative": H2 >= 0, "is_extremal_vector": extremal},
    }


def default_b(g: Graph, params: StabilityParams) -> int:
    return params.b if params.b is not None else book_number(g)
