"""Ideals, centers, traces, torsion pairs, TTF triples, and the
classification engines over a bounded module universe.

Everything here is exhaustive at desk scale: ideals are enumerated as
two-sided stable submodules, the module universe holds every module up to
isomorphism below a dimension bound, and torsion pairs are certified by
Hom-vanishing plus an explicit exact sequence for every universe member.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import AlgebraPresheaf, FiniteAlgebra, restrict_presheaf
from .errors import BudgetExceededError, InputError, NotPrimeError
from .fincat import FiniteCategory, full_subcategory
from .grskew import build_gr, build_skew_algebra, enumerate_linear_topologies
from .modules import (
    SkewModule,
    enumerate_skew_module_structures,
    extension_cocycle_space,
    hom_skew,
    quotient_module,
    regular_module,
    submodule_module,
    torsion_check,
    zero_skew_module,
)
from .topology import GrothendieckTopology, matching_subcategories

DEFAULT_UNIVERSE_BUDGET = 2**22


# ---------------------------------------------------------------------------
# ideals and centers


@dataclass(frozen=True)
class TwoSidedIdeal:
    algebra: FiniteAlgebra
    rows: tuple  # Howell-form basis rows, as tuples

    @property
    def matrix(self) -> np.ndarray:
        return linalg.as_matrix([np.array(r, dtype=np.int64) for r in self.rows], self.algebra.rank)

    def key(self):
        return linalg.span_key(self.matrix)

    @property
    def size(self) -> int:
        return linalg.span_size(self.matrix, self.algebra.base.modulus)

    def contains(self, v) -> bool:
        return linalg.in_span(self.matrix, np.asarray(v, dtype=np.int64), self.algebra.base.modulus)

    def __eq__(self, other):
        return isinstance(other, TwoSidedIdeal) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def _two_sided_mats(A: FiniteAlgebra) -> list:
    mats = []
    for j in range(A.rank):
        b = A.basis_vector(j)
        mats.append(A.right_mult_matrix(b))
        mats.append(A.left_mult_matrix(b))
    return mats


def _ideal_from_rows(A: FiniteAlgebra, rows) -> TwoSidedIdeal:
    H = linalg.stable_closure(rows, _two_sided_mats(A), A.base.modulus, A.rank)
    return TwoSidedIdeal(A, tuple(tuple(int(v) for v in r) for r in H))


def ideal_generated_by(A: FiniteAlgebra, elements) -> TwoSidedIdeal:
    """Smallest two-sided ideal containing the given elements."""
    return _ideal_from_rows(A, [np.asarray(e, dtype=np.int64) for e in elements])


def product_ideal(I: TwoSidedIdeal, K: TwoSidedIdeal) -> TwoSidedIdeal:
    if I.algebra is not K.algebra and I.algebra != K.algebra:
        raise InputError("product of ideals in different algebras")
    A = I.algebra
    prods = [
        A.multiply(np.array(i, dtype=np.int64), np.array(k, dtype=np.int64))
        for i in I.rows
        for k in K.rows
    ]
    return _ideal_from_rows(A, prods)


def is_idempotent_ideal(I: TwoSidedIdeal) -> bool:
    return product_ideal(I, I).key() == I.key()


def enumerate_ideals(A: FiniteAlgebra, budget: int = 2**20) -> list:
    """All two-sided ideals, in canonical (size, echelon-key) order."""
    subs = linalg.enumerate_submodules(A.rank, A.base.modulus, _two_sided_mats(A), budget)
    return [TwoSidedIdeal(A, tuple(tuple(int(v) for v in r) for r in H)) for H in subs]


def enumerate_idempotent_ideals(A: FiniteAlgebra, budget: int = 2**20) -> list:
    return [I for I in enumerate_ideals(A, budget) if is_idempotent_ideal(I)]


def center(A: FiniteAlgebra) -> np.ndarray:
    """Howell basis of the center {z : z*b = b*z for all basis b}."""
    n = A.base.modulus
    if A.rank == 0:
        return np.zeros((0, 0), dtype=np.int64)
    blocks = []
    for j in range(A.rank):
        b = A.basis_vector(j)
        blocks.append((A.right_mult_matrix(b) - A.left_mult_matrix(b)) % n)
    return linalg.kernel_left(np.concatenate(blocks, axis=1), n)


def central_idempotents(A: FiniteAlgebra) -> list:
    """All central idempotent elements, in coordinate order."""
    Z = center(A)
    n = A.base.modulus
    out = []
    for v in linalg.span_elements(Z, n):
        if (A.multiply(v, v) == v % n).all():
            out.append(v)
    out.sort(key=lambda v: tuple(int(t) for t in v))
    return out


def is_central_idempotent(A: FiniteAlgebra, v) -> bool:
    v = np.asarray(v, dtype=np.int64) % A.base.modulus
    n = A.base.modulus
    if ((A.multiply(v, v) - v) % n).any():
        return False
    Z = center(A)
    return linalg.in_span(Z, v, n)


def trace_in_module(sources, target: SkewModule) -> np.ndarray:
    """Howell basis of the sum of images of all maps source -> target."""
    n = target.algebra.base.modulus
    rows = []
    for S in sources:
        for H in hom_skew(S, target):
            rows.extend(H % n)
    return linalg.howell_form(linalg.as_matrix(rows, target.dim), n, target.dim)


def trace_ideal(A: FiniteAlgebra, modules) -> TwoSidedIdeal:
    """Sum of images of all module maps from the given modules into A."""
    H = trace_in_module(modules, regular_module(A))
    return _ideal_from_rows(A, list(H))


# ---------------------------------------------------------------------------
# the bounded module universe


def _invertible_matrices(n: int, m: int, budget: int):
    total = n ** (m * m)
    if total > budget:
        raise BudgetExceededError("invertible matrix enumeration", total, budget)
    if m == 0:
        z = np.zeros((1, 0, 0), dtype=np.int64)
        return z, z
    digits = np.arange(total)
    cells = [(digits // (n**c)) % n for c in range(m * m)]
    mats = np.stack(cells, axis=1).reshape(total, m, m).astype(np.int64)
    gs, ginvs = [], []
    for G in mats:
        Ginv = linalg.matrix_inverse(G, n)
        if Ginv is not None:
            gs.append(G)
            ginvs.append(Ginv)
    return np.stack(gs), np.stack(ginvs)


class ModuleUniverse:
    """Every right module of dimension <= bound over A, up to isomorphism.

    Members are canonical representatives: the conjugation-minimal action
    tensor under the full change-of-basis group.  Prime modulus only.
    """

    def __init__(self, A: FiniteAlgebra, dim_bound: int = 3, budget: int = DEFAULT_UNIVERSE_BUDGET):
        n = A.base.modulus
        if not linalg.is_prime(n):
            raise NotPrimeError(n, "module universe")
        self.algebra = A
        self.dim_bound = dim_bound
        self.budget = budget
        self._gl = {}
        self._canon_cache = {}
        seen = {}
        for m in range(dim_bound + 1):
            for V in enumerate_skew_module_structures(A, m, budget):
                key = self._canon_key(V)
                if key not in seen:
                    act = (
                        np.frombuffer(key[1], dtype=np.int64).reshape(A.rank, m, m).copy()
                        if m
                        else np.zeros((A.rank, 0, 0), dtype=np.int64)
                    )
                    seen[key] = SkewModule(A, act)
        self.members = [seen[k] for k in sorted(seen)]
        self._index = {self._canon_key(V): i for i, V in enumerate(self.members)}
        self._hom_dims = {}
        self._sub_rows = {}
        self._sub_classes = {}
        self._quot_classes = {}
        self._middles = {}

    def _gl_group(self, m: int):
        if m not in self._gl:
            self._gl[m] = _invertible_matrices(self.algebra.base.modulus, m, self.budget)
        return self._gl[m]

    def _canon_key(self, V: SkewModule):
        ck = V.act.tobytes()
        hit = self._canon_cache.get((V.dim, ck))
        if hit is not None:
            return hit
        n = self.algebra.base.modulus
        m = V.dim
        if m == 0:
            key = (0, V.act.tobytes())
        else:
            G, Ginv = self._gl_group(m)
            conj = np.matmul(np.matmul(Ginv[:, None], V.act[None]), G[:, None]) % n
            best = min(conj[g].tobytes() for g in range(G.shape[0]))
            key = (m, best)
        self._canon_cache[(m, ck)] = key
        return key

    def index_of(self, V: SkewModule) -> int:
        if V.dim > self.dim_bound:
            raise InputError(f"module of dimension {V.dim} is outside the universe bound {self.dim_bound}")
        key = self._canon_key(V)
        if key not in self._index:
            raise InputError("module is not a member of the universe")
        return self._index[key]

    def __len__(self):
        return len(self.members)

    def hom_dim(self, i: int, j: int) -> int:
        if (i, j) not in self._hom_dims:
            self._hom_dims[(i, j)] = len(hom_skew(self.members[i], self.members[j]))
        return self._hom_dims[(i, j)]

    def submodule_rows(self, i: int) -> list:
        if i not in self._sub_rows:
            V = self.members[i]
            self._sub_rows[i] = linalg.enumerate_submodules(
                V.dim, self.algebra.base.modulus, list(V.act), self.budget
            )
        return self._sub_rows[i]

    def sub_classes(self, i: int) -> frozenset:
        if i not in self._sub_classes:
            V = self.members[i]
            out = set()
            for H in self.submodule_rows(i):
                S, _ = submodule_module(V, H)
                out.add(self.index_of(S))
            self._sub_classes[i] = frozenset(out)
        return self._sub_classes[i]

    def quot_classes(self, i: int) -> frozenset:
        if i not in self._quot_classes:
            V = self.members[i]
            out = set()
            for H in self.submodule_rows(i):
                Q, _ = quotient_module(V, H)
                out.add(self.index_of(Q))
            self._quot_classes[i] = frozenset(out)
        return self._quot_classes[i]

    def middle_classes(self, quot_i: int, sub_j: int) -> frozenset:
        """Classes of middle terms of extensions of member i by member j."""
        key = (quot_i, sub_j)
        if key not in self._middles:
            V, W = self.members[quot_i], self.members[sub_j]
            if V.dim + W.dim > self.dim_bound:
                self._middles[key] = frozenset()
            else:
                Z, _, build = extension_cocycle_space(V, W)
                n = self.algebra.base.modulus
                out = set()
                for c in linalg.span_elements(Z, n):
                    out.add(self.index_of(build(c)))
                self._middles[key] = frozenset(out)
        return self._middles[key]

    def zero_index(self) -> int:
        return self.index_of(zero_skew_module(self.algebra))

    def perp_of(self, xs) -> frozenset:
        return frozenset(
            j
            for j in range(len(self.members))
            if all(self.hom_dim(i, j) == 0 for i in xs)
        )

    def pre_perp_of(self, ys) -> frozenset:
        return frozenset(
            i
            for i in range(len(self.members))
            if all(self.hom_dim(i, j) == 0 for j in ys)
        )


def _normalize_class(universe: ModuleUniverse, given) -> frozenset:
    """Accept an index set, an iterable of modules, or a predicate."""
    if callable(given):
        return frozenset(
            i for i, V in enumerate(universe.members) if given(V)
        )
    items = list(given)
    if all(isinstance(t, (int, np.integer)) for t in items):
        return frozenset(int(t) for t in items)
    return frozenset(universe.index_of(V) for V in items)


# ---------------------------------------------------------------------------
# torsion pairs


@dataclass
class TorsionSequence:
    member: int
    sub_rows: np.ndarray  # basis of x_a inside a
    sub_class: int
    quot_class: int
    projection: np.ndarray
    splits: bool


@dataclass
class TorsionPairWitness:
    ok: bool
    universe: ModuleUniverse
    x_indices: frozenset
    y_indices: frozenset
    hereditary: bool = False
    split: bool = False
    sequences: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _splits(universe: ModuleUniverse, a: SkewModule, sub: SkewModule, incl_rows: np.ndarray) -> bool:
    """Does the inclusion sub -> a admit a module retraction?"""
    n = universe.algebra.base.modulus
    s = sub.dim
    if s == 0 or s == a.dim:
        return True
    homs = hom_skew(a, sub)
    if not homs:
        return False
    rows = linalg.as_matrix(
        [((incl_rows @ H) % n).reshape(-1) for H in homs], s * s
    )
    want = np.eye(s, dtype=np.int64).reshape(-1)
    return linalg.solve_left(rows, want, n) is not None


def torsion_pair_check(X, Y, universe: ModuleUniverse) -> TorsionPairWitness:
    """Certify (X, Y) as a torsion pair on the universe.

    Checks mutual Hom-perpendicularity and constructs, for every member a,
    the sequence x_a -> a -> y_a with x_a the trace of X in a; the
    hereditary flag records closure of X under submodules, the split flag
    records that every sequence admits a retraction.
    """
    xs = _normalize_class(universe, X)
    ys = _normalize_class(universe, Y)
    failures = []
    if universe.perp_of(xs) != ys:
        failures.append(("perp", "Y is not the right perpendicular of X"))
    if universe.pre_perp_of(ys) != xs:
        failures.append(("pre-perp", "X is not the left perpendicular of Y"))
    sequences = []
    x_members = [universe.members[i] for i in sorted(xs)]
    for a_idx, a in enumerate(universe.members):
        rows = trace_in_module(x_members, a)
        S, incl = submodule_module(a, rows)
        Q, proj = quotient_module(a, rows)
        s_cls = universe.index_of(S)
        q_cls = universe.index_of(Q)
        if s_cls not in xs:
            failures.append(("sequence-sub", a_idx, s_cls))
        if q_cls not in ys:
            failures.append(("sequence-quot", a_idx, q_cls))
        sequences.append(
            TorsionSequence(
                a_idx, incl, s_cls, q_cls, proj, _splits(universe, a, S, incl)
            )
        )
    hereditary = all(universe.sub_classes(i) <= xs for i in xs)
    split = all(seq.splits for seq in sequences)
    return TorsionPairWitness(
        not failures, universe, xs, ys, hereditary, split, sequences, failures
    )


@dataclass
class TTFTriple:
    ok: bool
    universe: ModuleUniverse
    x_indices: frozenset
    y_indices: frozenset
    z_indices: frozenset
    pair_xy: TorsionPairWitness
    pair_yz: TorsionPairWitness
    split: bool

    def __bool__(self):
        return self.ok

    def key(self):
        return (tuple(sorted(self.x_indices)), tuple(sorted(self.y_indices)), tuple(sorted(self.z_indices)))


def _module_times_ideal_rows(V: SkewModule, I: TwoSidedIdeal) -> np.ndarray:
    n = V.algebra.base.modulus
    rows = []
    for r in I.rows:
        mat = V.act_of(np.array(r, dtype=np.int64))
        rows.extend(mat % n)
    return linalg.howell_form(linalg.as_matrix(rows, V.dim), n, V.dim)


def _socle_size(V: SkewModule, I: TwoSidedIdeal) -> int:
    n = V.algebra.base.modulus
    if V.dim == 0:
        return 1
    mats = [V.act_of(np.array(r, dtype=np.int64)) for r in I.rows]
    if not mats:
        return n**V.dim
    K = linalg.kernel_left(np.concatenate(mats, axis=1), n)
    return linalg.span_size(K, n)


def ttf_from_idempotent_ideal(I: TwoSidedIdeal, universe: ModuleUniverse) -> TTFTriple:
    """The TTF triple attached to an idempotent ideal.

    X = {M : M*I = M}, Y = {M : M*I = 0}, Z = {M : no nonzero element of M
    is killed by I}.
    """
    if not is_idempotent_ideal(I):
        raise InputError("ideal is not idempotent")
    n = universe.algebra.base.modulus
    xs, ys, zs = set(), set(), set()
    for idx, V in enumerate(universe.members):
        MI = _module_times_ideal_rows(V, I)
        if V.dim == 0 or linalg.span_size(MI, n) == n**V.dim:
            xs.add(idx)
        if MI.shape[0] == 0:
            ys.add(idx)
        if _socle_size(V, I) == 1:
            zs.add(idx)
    pair_xy = torsion_pair_check(xs, ys, universe)
    pair_yz = torsion_pair_check(ys, zs, universe)
    split = pair_xy.split and pair_yz.split
    return TTFTriple(
        pair_xy.ok and pair_yz.ok,
        universe,
        frozenset(xs),
        frozenset(ys),
        frozenset(zs),
        pair_xy,
        pair_yz,
        split,
    )


def split_ttf_from_central_idempotent(e, universe: ModuleUniverse) -> TTFTriple:
    """The split TTF triple attached to a central idempotent."""
    A = universe.algebra
    if not is_central_idempotent(A, e):
        raise InputError("element is not a central idempotent")
    e = np.asarray(e, dtype=np.int64) % A.base.modulus
    xs, ys = set(), set()
    for idx, V in enumerate(universe.members):
        E = V.act_of(e)
        # e idempotent, so M*e = M iff E is the identity
        if (E == np.eye(V.dim, dtype=np.int64)).all():
            xs.add(idx)
        if not E.any():
            ys.add(idx)
    pair_xy = torsion_pair_check(xs, ys, universe)
    pair_yz = torsion_pair_check(ys, xs, universe)
    ok = pair_xy.ok and pair_yz.ok and pair_xy.split and pair_yz.split
    return TTFTriple(
        ok,
        universe,
        frozenset(xs),
        frozenset(ys),
        frozenset(xs),
        pair_xy,
        pair_yz,
        pair_xy.split and pair_yz.split,
    )


# ---------------------------------------------------------------------------
# brute-force oracles


def brute_force_torsion_pairs(universe: ModuleUniverse) -> list:
    """All torsion pairs on the universe by exhaustive subset search."""
    N = len(universe.members)
    zero = universe.zero_index()
    hom_to = [0] * N  # bitmask over j of hom(member i, member j) != 0
    hom_from = [0] * N
    for i in range(N):
        for j in range(N):
            if universe.hom_dim(i, j):
                hom_to[i] |= 1 << j
                hom_from[j] |= 1 << i
    others = [i for i in range(N) if i != zero]
    pairs = []
    seen = set()
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            xmask = (1 << zero) | sum(1 << i for i in combo)
            ymask = sum(1 << j for j in range(N) if not (xmask & hom_from[j]))
            back = sum(1 << i for i in range(N) if not (ymask & hom_to[i]))
            if back != xmask or (xmask, ymask) in seen:
                continue
            seen.add((xmask, ymask))
            xs = frozenset(i for i in range(N) if (xmask >> i) & 1)
            ys = frozenset(j for j in range(N) if (ymask >> j) & 1)
            w = torsion_pair_check(xs, ys, universe)
            if w.ok:
                pairs.append(w)
    return pairs


def brute_force_hereditary_pairs(universe: ModuleUniverse) -> list:
    """Torsion pairs whose torsion class is closed under submodules,
    found by filtering subset candidates closed under submodules,
    quotients, direct sums, and extensions."""
    N = len(universe.members)
    zero = universe.zero_index()
    closed_masks = []
    sub_m = [sum(1 << j for j in universe.sub_classes(i)) for i in range(N)]
    quot_m = [sum(1 << j for j in universe.quot_classes(i)) for i in range(N)]
    others = [i for i in range(N) if i != zero]
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            mask = (1 << zero) | sum(1 << i for i in combo)
            ok = True
            for i in range(N):
                if (mask >> i) & 1:
                    if (sub_m[i] | quot_m[i]) & ~mask:
                        ok = False
                        break
            if ok:
                for i in range(N):
                    if not ok:
                        break
                    if not (mask >> i) & 1:
                        continue
                    for j in range(N):
                        if (mask >> j) & 1:
                            mid = sum(1 << t for t in universe.middle_classes(i, j))
                            if mid & ~mask:
                                ok = False
                                break
            if ok:
                closed_masks.append(mask)
    pairs = []
    for mask in closed_masks:
        xs = frozenset(i for i in range(N) if (mask >> i) & 1)
        ys = universe.perp_of(xs)
        if universe.pre_perp_of(ys) != xs:
            continue
        w = torsion_pair_check(xs, ys, universe)
        if w.ok and w.hereditary:
            pairs.append(w)
    return pairs


def brute_force_ttf_triples(universe: ModuleUniverse) -> list:
    """All TTF triples by matching torsion pairs end to end."""
    pairs = brute_force_torsion_pairs(universe)
    by_x = {p.x_indices: p for p in pairs}
    triples = []
    for p in pairs:
        q = by_x.get(p.y_indices)
        if q is not None:
            triples.append(
                TTFTriple(
                    True,
                    universe,
                    p.x_indices,
                    p.y_indices,
                    q.y_indices,
                    p,
                    q,
                    p.split and q.split,
                )
            )
    return triples


# ---------------------------------------------------------------------------
# the classification report


@dataclass
class ClassificationReport:
    subcategory_objects: tuple
    counts: dict
    hereditary_pairs: list
    ttf_triples: list
    split_ttf_triples: list
    ok: bool

    def summary(self) -> str:
        parts = [f"{k}={v}" for k, v in self.counts.items()]
        return ("pass " if self.ok else "FAIL ") + ", ".join(parts)


def classify(
    cat: FiniteCategory,
    R: AlgebraPresheaf,
    J: GrothendieckTopology,
    dim_bound: int = 3,
    budget: int = DEFAULT_UNIVERSE_BUDGET,
) -> ClassificationReport:
    """Run all three classifications for a site whose topology is J^D.

    Finds the unique full subcategory D with subcategory topology J
    (input error if none), restricts R to D, and classifies: linear
    topologies as hereditary torsion pairs, idempotent ideals as TTF
    triples, central idempotents as split TTF triples.
    """
    matches = matching_subcategories(cat, J)
    if not matches:
        raise InputError("topology is not a subcategory topology; no D matches")
    D = full_subcategory(cat, matches[0])
    RD = restrict_presheaf(R, D)
    sub = RD.cat
    gr = build_gr(sub, RD)
    skew = build_skew_algebra(sub, RD)
    universe = ModuleUniverse(skew, dim_bound, budget)

    hereditary = []
    ok = True
    for Jp in enumerate_linear_topologies(gr, budget=budget):
        xs = frozenset(
            i for i, V in enumerate(universe.members) if torsion_check(V, Jp).value
        )
        ys = universe.perp_of(xs)
        w = torsion_pair_check(xs, ys, universe)
        ok = ok and w.ok and w.hereditary
        hereditary.append(w)
    if len({(p.x_indices, p.y_indices) for p in hereditary}) != len(hereditary):
        ok = False

    triples = []
    for I in enumerate_idempotent_ideals(skew):
        t = ttf_from_idempotent_ideal(I, universe)
        ok = ok and t.ok
        triples.append(t)
    if len({t.key() for t in triples}) != len(triples):
        ok = False

    splits = []
    for e in central_idempotents(skew):
        t = split_ttf_from_central_idempotent(e, universe)
        ok = ok and t.ok and t.split
        splits.append(t)
    if len({t.key() for t in splits}) != len(splits):
        ok = False

    counts = {
        "universe_members": len(universe),
        "linear_topologies": len(hereditary),
        "hereditary_torsion_pairs": len(hereditary),
        "idempotent_ideals": len(triples),
        "ttf_triples": len(triples),
        "central_idempotents": len(splits),
        "split_ttf_triples": len(splits),
    }
    return ClassificationReport(
        tuple(sub.objects), counts, hereditary, triples, splits, ok
    )
