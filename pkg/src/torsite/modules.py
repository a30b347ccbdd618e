"""Presheaves of modules, modules over the skew algebra, and the predicates.

The two sides of the picture:

* a ModulePresheaf assigns to every object x a free Z/n-module with a
  right R(x)-action and to every morphism a restriction map, with the
  usual compatibilities;
* a SkewModule is a right module over R[C] (equivalently over Gr(R)).

``psi_to_gr`` stacks the blocks M(x) into one carrier, letting the basis
element (r at f: x -> y) act by m |-> M(f)(m) * r from the y-block to the
x-block; ``phi_from_gr`` recovers the presheaf from the object
idempotents.  Sheaf, torsion and perpendicular predicates and Ext^1 are
computed here by exact linear algebra.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import AlgebraPresheaf, FiniteAlgebra
from .errors import BudgetExceededError, InputError, NotPrimeError
from .fincat import FiniteCategory
from .grskew import GrCategory, LinearTopology, SkewAlgebra, build_skew_algebra
from .report import ValidationReport


class ModulePresheaf:
    def __init__(self, cat: FiniteCategory, R: AlgebraPresheaf, ranks, maps, actions):
        self.cat = cat
        self.R = R
        self.ranks = tuple(int(r) for r in ranks)
        self.maps = tuple(np.asarray(M, dtype=np.int64) for M in maps)
        self.actions = tuple(np.asarray(a, dtype=np.int64) for a in actions)
        if len(self.ranks) != cat.n_objects or len(self.actions) != cat.n_objects:
            raise InputError("need rank and action data for every object")
        if len(self.maps) != cat.n_morphisms:
            raise InputError("need one map per morphism")
        for f in range(cat.n_morphisms):
            want = (self.ranks[cat.cod(f)], self.ranks[cat.dom(f)])
            if self.maps[f].shape != want:
                raise InputError(
                    f"map of {cat.morphisms[f].name!r} has shape {self.maps[f].shape}, expected {want}"
                )
        for x in range(cat.n_objects):
            want = (R.algebra(x).rank, self.ranks[x], self.ranks[x])
            if self.actions[x].shape != want:
                raise InputError(
                    f"action at {cat.objects[x]!r} has shape {self.actions[x].shape}, expected {want}"
                )

    @property
    def total_rank(self) -> int:
        return sum(self.ranks)

    def map(self, f: int) -> np.ndarray:
        return self.maps[f]

    def action_of(self, x: int, r) -> np.ndarray:
        """Matrix of m |-> m*r on M(x) for an algebra element r."""
        return np.einsum("j,jkl->kl", np.asarray(r, dtype=np.int64), self.actions[x]) % self.R.base.modulus

    def __repr__(self):
        return f"ModulePresheaf(ranks {self.ranks})"


def zero_module_presheaf(cat: FiniteCategory, R: AlgebraPresheaf) -> ModulePresheaf:
    ranks = [0] * cat.n_objects
    maps = [np.zeros((0, 0), dtype=np.int64) for _ in range(cat.n_morphisms)]
    actions = [np.zeros((R.algebra(x).rank, 0, 0), dtype=np.int64) for x in range(cat.n_objects)]
    return ModulePresheaf(cat, R, ranks, maps, actions)


def validate_module_presheaf(M: ModulePresheaf) -> ValidationReport:
    cat, R = M.cat, M.R
    n = R.base.modulus
    rep = ValidationReport("module presheaf")
    for x in range(cat.n_objects):
        e = cat.identity[x]
        rep.checked += 1
        if (M.maps[e] % n != np.eye(M.ranks[x], dtype=np.int64)).any():
            rep.add("identity-map", (cat.objects[x],))
    for g in range(cat.n_morphisms):
        for f in range(cat.n_morphisms):
            gf = int(cat.compose_table[g, f])
            if gf < 0:
                continue
            rep.checked += 1
            if ((M.maps[g] @ M.maps[f]) % n != M.maps[gf] % n).any():
                rep.add("functoriality", (cat.morphisms[g].name, cat.morphisms[f].name))
    for x in range(cat.n_objects):
        alg = R.algebra(x)
        act = M.actions[x] % n
        rep.checked += 1
        unit_act = np.einsum("j,jkl->kl", alg.unit, act) % n
        if (unit_act != np.eye(M.ranks[x], dtype=np.int64)).any():
            rep.add("unital-action", (cat.objects[x],))
        lhs = np.einsum("ijm,mkl->ijkl", alg.mul, act) % n
        rhs = np.einsum("ikm,jml->ijkl", act, act) % n
        rep.checked += alg.rank**2
        for i, j in np.argwhere((lhs != rhs).any(axis=(2, 3)))[:8]:
            rep.add(
                "associative-action",
                (cat.objects[x], alg.basis_names[i], alg.basis_names[j]),
            )
    for f in range(cat.n_morphisms):
        x, y = cat.dom(f), cat.cod(f)
        src = R.algebra(y)
        for j in range(src.rank):
            moved = (src.basis_vector(j) @ R.map(f)) % n
            lhs = (M.actions[y][j] @ M.maps[f]) % n
            rhs = (M.maps[f] @ M.action_of(x, moved)) % n
            rep.checked += 1
            if (lhs != rhs).any():
                rep.add(
                    "map-action-compatibility",
                    (cat.morphisms[f].name, src.basis_names[j]),
                )
    return rep


class SkewModule:
    """Right module over a finite algebra: act[j] is the matrix of -*b_j."""

    def __init__(self, algebra: FiniteAlgebra, act):
        self.algebra = algebra
        self.act = np.asarray(act, dtype=np.int64) % algebra.base.modulus
        if self.act.ndim != 3 or self.act.shape[0] != algebra.rank:
            raise InputError("action tensor must have one matrix per algebra basis element")
        if self.act.shape[1] != self.act.shape[2]:
            raise InputError("action matrices must be square")
        self.dim = self.act.shape[1]

    def act_of(self, v) -> np.ndarray:
        if self.algebra.rank == 0:
            return np.zeros((self.dim, self.dim), dtype=np.int64)
        return np.einsum("j,jkl->kl", np.asarray(v, dtype=np.int64), self.act) % self.algebra.base.modulus

    def apply(self, m, v) -> np.ndarray:
        return (np.asarray(m, dtype=np.int64) @ self.act_of(v)) % self.algebra.base.modulus

    def key(self) -> bytes:
        return self.act.tobytes()

    def __repr__(self):
        return f"SkewModule(dim {self.dim} over rank-{self.algebra.rank} algebra)"


def validate_skew_module(V: SkewModule) -> ValidationReport:
    rep = ValidationReport(f"module of dimension {V.dim}")
    A = V.algebra
    n = A.base.modulus
    rep.checked += 1
    unit_act = V.act_of(A.unit)
    if (unit_act != np.eye(V.dim, dtype=np.int64)).any():
        rep.add("unital")
    lhs = np.einsum("ijm,mkl->ijkl", A.mul, V.act) % n
    rhs = np.einsum("ikm,jml->ijkl", V.act, V.act) % n
    rep.checked += A.rank**2
    for i, j in np.argwhere((lhs != rhs).any(axis=(2, 3)))[:8]:
        rep.add("multiplicative", (A.basis_names[i], A.basis_names[j]))
    return rep


def zero_skew_module(A: FiniteAlgebra) -> SkewModule:
    return SkewModule(A, np.zeros((A.rank, 0, 0), dtype=np.int64))


def regular_module(A: FiniteAlgebra) -> SkewModule:
    return SkewModule(A, A.mul.transpose(1, 0, 2))


def direct_sum(V: SkewModule, W: SkewModule) -> SkewModule:
    A = V.algebra
    act = np.zeros((A.rank, V.dim + W.dim, V.dim + W.dim), dtype=np.int64)
    act[:, : V.dim, : V.dim] = V.act
    act[:, V.dim :, V.dim :] = W.act
    return SkewModule(A, act)


def submodule_module(V: SkewModule, rows) -> tuple:
    """Module structure on a stable submodule; returns (module, inclusion)."""
    n = V.algebra.base.modulus
    H = linalg.howell_form(linalg.as_matrix(rows, V.dim), n, V.dim)
    act = np.zeros((V.algebra.rank, H.shape[0], H.shape[0]), dtype=np.int64)
    for j in range(V.algebra.rank):
        for i, row in enumerate(H):
            img = (row @ V.act[j]) % n
            coeffs = linalg.solve_left(H, img, n)
            if coeffs is None:
                raise InputError("rows do not span a stable submodule")
            act[j][i] = coeffs
    return SkewModule(V.algebra, act), H


def quotient_module(V: SkewModule, rows) -> tuple:
    """Quotient by a stable submodule; returns (module, projection matrix).

    The projection matrix has shape (dim V, dim Q); coset coordinates are
    the non-pivot columns, which requires unit pivots (prime modulus).
    """
    n = V.algebra.base.modulus
    if not linalg.is_prime(n):
        raise NotPrimeError(n, "quotient carrier")
    H = linalg.howell_form(linalg.as_matrix(rows, V.dim), n, V.dim)
    comp = linalg.complement_columns(H, V.dim)
    proj = np.zeros((V.dim, len(comp)), dtype=np.int64)
    for i in range(V.dim):
        e = np.zeros(V.dim, dtype=np.int64)
        e[i] = 1
        proj[i] = linalg.reduce_vector(H, e, n)[comp]
    act = np.zeros((V.algebra.rank, len(comp), len(comp)), dtype=np.int64)
    for j in range(V.algebra.rank):
        for c, col in enumerate(comp):
            e = np.zeros(V.dim, dtype=np.int64)
            e[col] = 1
            act[j][c] = ((e @ V.act[j]) % n @ proj) % n
    Q = SkewModule(V.algebra, act)
    return Q, proj


def hom_skew(V: SkewModule, W: SkewModule) -> list:
    """Basis of the module maps V -> W as (dim V, dim W) matrices."""
    n = V.algebra.base.modulus
    v, w = V.dim, W.dim
    if v == 0 or w == 0:
        return []
    blocks = []
    for j in range(V.algebra.rank):
        Cj = np.kron(V.act[j], np.eye(w, dtype=np.int64)) - np.kron(
            np.eye(v, dtype=np.int64), W.act[j].T
        )
        blocks.append(Cj.T % n)
    Cmat = np.concatenate(blocks, axis=1) if blocks else np.zeros((v * w, 0), dtype=np.int64)
    K = linalg.kernel_left(Cmat, n)
    return [row.reshape(v, w) for row in K]


@dataclass
class NatTransformation:
    source: ModulePresheaf
    target: ModulePresheaf
    components: tuple

    def component(self, x: int) -> np.ndarray:
        return self.components[x]

    def compose(self, other: "NatTransformation") -> "NatTransformation":
        """self followed by other (source of other = target of self)."""
        n = self.source.R.base.modulus
        comps = tuple(
            (a @ b) % n for a, b in zip(self.components, other.components)
        )
        return NatTransformation(self.source, other.target, comps)


def hom_modules(M: ModulePresheaf, N: ModulePresheaf) -> list:
    """Basis of natural R-linear transformations M -> N."""
    cat = M.cat
    n = M.R.base.modulus
    offs = []
    total = 0
    for x in range(cat.n_objects):
        offs.append(total)
        total += M.ranks[x] * N.ranks[x]
    if total == 0:
        return []

    cols = []

    def add_constraint(parts):
        col = np.zeros(total, dtype=np.int64)
        for x, block in parts:
            col[offs[x] : offs[x] + block.size] += block.reshape(-1)
        cols.append(col % n)

    for f in range(cat.n_morphisms):
        x, y = cat.dom(f), cat.cod(f)
        # M(f) phi_x = phi_y N(f): entry (i, c) over phi-unknowns
        for i in range(M.ranks[y]):
            for c in range(N.ranks[x]):
                blk_x = np.outer(M.maps[f][i], (np.arange(N.ranks[x]) == c).astype(np.int64))
                blk_y = np.zeros((M.ranks[y], N.ranks[y]), dtype=np.int64)
                blk_y[i] = (-N.maps[f][:, c]) % n
                add_constraint([(x, blk_x % n), (y, blk_y)])
    for x in range(cat.n_objects):
        alg = M.R.algebra(x)
        for j in range(alg.rank):
            AM = M.actions[x][j]
            AN = N.actions[x][j]
            for i in range(M.ranks[x]):
                for c in range(N.ranks[x]):
                    blk = np.outer(AM[i], (np.arange(N.ranks[x]) == c).astype(np.int64))
                    blk2 = np.zeros_like(blk)
                    blk2[i] = (-AN[:, c]) % n
                    add_constraint([(x, (blk + blk2) % n)])
    Cmat = (
        np.stack(cols, axis=1)
        if cols
        else np.zeros((total, 0), dtype=np.int64)
    )
    K = linalg.kernel_left(Cmat, n)
    out = []
    for row in K:
        comps = []
        for x in range(cat.n_objects):
            size = M.ranks[x] * N.ranks[x]
            comps.append(row[offs[x] : offs[x] + size].reshape(M.ranks[x], N.ranks[x]))
        out.append(NatTransformation(M, N, tuple(comps)))
    return out


def psi_to_gr(M: ModulePresheaf, skew: SkewAlgebra | None = None) -> SkewModule:
    """Stack the blocks of M into a right module over the skew algebra.

    Basis element (b_i at f: x -> y) sends the M(y)-block into the
    M(x)-block by m |-> M(f)(m) * b_i and kills the other blocks.
    """
    if skew is None:
        skew = build_skew_algebra(M.cat, M.R)
    cat = M.cat
    n = M.R.base.modulus
    offsets = []
    total = 0
    for x in range(cat.n_objects):
        offsets.append(total)
        total += M.ranks[x]
    act = np.zeros((skew.rank, total, total), dtype=np.int64)
    for p, (f, i) in enumerate(skew.pairs):
        x, y = cat.dom(f), cat.cod(f)
        block = (M.maps[f] @ M.actions[x][i]) % n
        act[p][offsets[y] : offsets[y] + M.ranks[y], offsets[x] : offsets[x] + M.ranks[x]] = block
    V = SkewModule(skew, act)
    V.block_offsets = tuple(offsets)
    V.block_ranks = tuple(M.ranks)
    return V


def phi_from_gr(V: SkewModule) -> ModulePresheaf:
    """Recover the module presheaf from a module over the skew algebra.

    Blocks are cut out by the object idempotents; their row spaces must be
    free (automatic over a field), otherwise the rank-based presheaf data
    model cannot hold the carrier.
    """
    skew = V.algebra
    if not isinstance(skew, SkewAlgebra):
        raise InputError("phi_from_gr needs a module over a skew category algebra")
    cat = skew.cat
    R = skew.R
    n = skew.base.modulus
    bases = []
    for x in range(cat.n_objects):
        E = V.act_of(skew.object_idempotent(x))
        B = linalg.howell_form(E, n, V.dim)
        if any(int(row[linalg._leading(row)]) != 1 for row in B):
            raise NotPrimeError(n, "free block decomposition")
        bases.append(B)
    if sum(B.shape[0] for B in bases) != V.dim:
        raise InputError("object idempotents do not decompose the carrier")
    ranks = [B.shape[0] for B in bases]

    def express(B, rows):
        out = np.zeros((rows.shape[0], B.shape[0]), dtype=np.int64)
        for i, row in enumerate(rows):
            c = linalg.solve_left(B, row, n)
            if c is None:
                raise InputError("carrier is not spanned by its blocks")
            out[i] = c
        return out

    maps = []
    for f in range(cat.n_morphisms):
        x, y = cat.dom(f), cat.cod(f)
        u = np.zeros(skew.rank, dtype=np.int64)
        for i, cval in enumerate(R.algebra(x).unit):
            u[skew.pair_index[(f, i)]] = cval
        img = (bases[y] @ V.act_of(u)) % n
        maps.append(express(bases[x], img))
    actions = []
    for x in range(cat.n_objects):
        alg = R.algebra(x)
        e = cat.identity[x]
        table = np.zeros((alg.rank, ranks[x], ranks[x]), dtype=np.int64)
        for j in range(alg.rank):
            u = np.zeros(skew.rank, dtype=np.int64)
            u[skew.pair_index[(e, j)]] = 1
            img = (bases[x] @ V.act_of(u)) % n
            table[j] = express(bases[x], img)
        actions.append(table)
    M = ModulePresheaf(cat, R, ranks, maps, actions)
    M.block_bases = tuple(bases)
    return M


def psi_map(nat: NatTransformation, skew: SkewAlgebra | None = None) -> np.ndarray:
    """Block-diagonal matrix of a presheaf map between the stacked carriers."""
    M, N = nat.source, nat.target
    n = M.R.base.modulus
    total_m, total_n = sum(M.ranks), sum(N.ranks)
    H = np.zeros((total_m, total_n), dtype=np.int64)
    om = on = 0
    for x in range(M.cat.n_objects):
        H[om : om + M.ranks[x], on : on + N.ranks[x]] = nat.components[x] % n
        om += M.ranks[x]
        on += N.ranks[x]
    return H


# ---------------------------------------------------------------------------
# sheaf / torsion / perpendicular predicates


@dataclass
class PredicateResult:
    value: bool
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.value


def _object_blocks(V: SkewModule):
    """Howell spanning rows of V*e_x for each object idempotent."""
    skew = V.algebra
    n = skew.base.modulus
    out = []
    for x in range(skew.cat.n_objects):
        E = V.act_of(skew.object_idempotent(x))
        out.append(linalg.howell_form(E, n, V.dim))
    return out


def _embed_hom_vector(skew: SkewAlgebra, gr: GrCategory, y: int, x: int, t) -> np.ndarray:
    out = np.zeros(skew.rank, dtype=np.int64)
    for k, p in enumerate(gr.hom_pairs[(y, x)]):
        out[skew.pair_index[p]] = t[k]
    return out


def sheaf_check(V: SkewModule, Jp: LinearTopology) -> PredicateResult:
    """Evaluation against every cover must be bijective onto the natural maps."""
    gr = Jp.gr
    skew = V.algebra
    n = skew.base.modulus
    cat = skew.cat
    for x in range(cat.n_objects):
        Ex = V.act_of(skew.object_idempotent(x))
        Bx = linalg.howell_form(Ex, n, V.dim)
        fix_x = (Ex - np.eye(V.dim, dtype=np.int64)) % n
        for ci, T in enumerate(Jp.covers_at(x)):
            elems = []
            index = {}
            for y in range(cat.n_objects):
                lst = list(linalg.span_elements(T.components[y], n))
                elems.append(lst)
                index[y] = {v.tobytes(): k for k, v in enumerate(lst)}
            offs = {}
            total = 0
            for y in range(cat.n_objects):
                for k in range(len(elems[y])):
                    offs[(y, k)] = total
                    total += V.dim
            mats = {
                (y, k): V.act_of(_embed_hom_vector(skew, gr, y, x, t))
                for y in range(cat.n_objects)
                for k, t in enumerate(elems[y])
            }
            cols = []

            def slot_constraint(parts):
                col = np.zeros(total, dtype=np.int64)
                for (y, k), vec in parts:
                    col[offs[(y, k)] : offs[(y, k)] + V.dim] += vec
                cols.append(col % n)

            for y in range(cat.n_objects):
                Ey = V.act_of(skew.object_idempotent(y))
                fix = (Ey - np.eye(V.dim, dtype=np.int64)) % n
                zero_k = index[y][np.zeros(gr.hom_rank(y, x), dtype=np.int64).tobytes()]
                for c in range(V.dim):
                    slot_constraint([((y, zero_k), np.eye(V.dim, dtype=np.int64)[c])])
                    for k in range(len(elems[y])):
                        slot_constraint([((y, k), fix[:, c])])
                for k1 in range(len(elems[y])):
                    for k2 in range(k1, len(elems[y])):
                        s = ((elems[y][k1] + elems[y][k2]) % n).tobytes()
                        k3 = index[y][s]
                        for c in range(V.dim):
                            e = np.eye(V.dim, dtype=np.int64)[c]
                            slot_constraint(
                                [((y, k3), e), ((y, k1), (-e) % n), ((y, k2), (-e) % n)]
                            )
                for k, t in enumerate(elems[y]):
                    for z in range(cat.n_objects):
                        for ii in range(gr.hom_rank(z, y)):
                            u = np.zeros(gr.hom_rank(z, y), dtype=np.int64)
                            u[ii] = 1
                            tu = gr.compose(z, y, x, t, u)
                            k2 = index[z].get(tu.tobytes())
                            if k2 is None:
                                raise InputError("cover is not closed under precomposition")
                            U = V.act_of(_embed_hom_vector(skew, gr, z, y, u))
                            for c in range(V.dim):
                                e = np.eye(V.dim, dtype=np.int64)[c]
                                slot_constraint(
                                    [((z, k2), e), ((y, k), (-U[:, c]) % n)]
                                )
            Cmat = (
                np.stack(cols, axis=1) if cols else np.zeros((total, 0), dtype=np.int64)
            )
            solutions = linalg.kernel_left(Cmat, n)

            def ev(mrow):
                out = np.zeros(total, dtype=np.int64)
                for (y, k), mat in mats.items():
                    out[offs[(y, k)] : offs[(y, k)] + V.dim] = (mrow @ mat) % n
                return out

            # injectivity: x-block elements killed by every cover element
            gen_mats = [
                V.act_of(_embed_hom_vector(skew, gr, y, x, trow))
                for y in range(cat.n_objects)
                for trow in T.components[y]
            ]
            inj_cols = [fix_x] + [Mt % n for Mt in gen_mats]
            inj = linalg.kernel_left(np.concatenate(inj_cols, axis=1), n)
            if linalg.span_size(inj, n) != 1:
                return PredicateResult(
                    False,
                    {
                        "object": cat.objects[x],
                        "cover": ci,
                        "reason": "not injective",
                        "kernel-size": linalg.span_size(inj, n),
                    },
                )
            image = linalg.howell_form(
                linalg.as_matrix([ev(row) for row in Bx], total), n, total
            )
            missing = sum(
                0 if linalg.in_span(image, s, n) else 1 for s in solutions
            )
            if missing:
                return PredicateResult(
                    False,
                    {
                        "object": cat.objects[x],
                        "cover": ci,
                        "reason": "not surjective",
                        "unmatched-solutions": missing,
                    },
                )
    return PredicateResult(True)


def torsion_check(V: SkewModule, Jp: LinearTopology) -> PredicateResult:
    """Every element of every block must be killed by some cover."""
    gr = Jp.gr
    skew = V.algebra
    n = skew.base.modulus
    cat = skew.cat
    for x in range(cat.n_objects):
        Ex = V.act_of(skew.object_idempotent(x))
        Bx = linalg.howell_form(Ex, n, V.dim)
        gen_mats = {}
        for ci, T in enumerate(Jp.covers_at(x)):
            gen_mats[ci] = [
                V.act_of(_embed_hom_vector(skew, gr, y, x, trow))
                for y in range(cat.n_objects)
                for trow in T.components[y]
            ]
        for m in linalg.span_elements(Bx, n):
            if not m.any():
                continue
            if not any(
                all(not ((m @ Mt) % n).any() for Mt in gen_mats[ci])
                for ci in gen_mats
            ):
                return PredicateResult(
                    False,
                    {"object": cat.objects[x], "element": [int(t) for t in m]},
                )
    return PredicateResult(True)


def is_sheaf(M: ModulePresheaf, Jp: LinearTopology) -> PredicateResult:
    return sheaf_check(psi_to_gr(M, _skew_of(Jp)), Jp)


def is_torsion(M: ModulePresheaf, Jp: LinearTopology) -> PredicateResult:
    return torsion_check(psi_to_gr(M, _skew_of(Jp)), Jp)


def _skew_of(Jp: LinearTopology) -> SkewAlgebra:
    gr = Jp.gr
    if not hasattr(gr, "_skew"):
        gr._skew = build_skew_algebra(gr.cat, gr.R)
    return gr._skew


def representable_module(skew: SkewAlgebra, x: int) -> tuple:
    """The module hom(-, x), i.e. e_x * A, on its coordinate subset."""
    idx = [
        k for k, (f, _) in enumerate(skew.pairs) if skew.cat.cod(f) == x
    ]
    reg = regular_module(skew)
    act = reg.act[:, :, idx][:, idx, :]
    return SkewModule(skew, act), idx


def representable_quotient(skew: SkewAlgebra, gr: GrCategory, x: int, T) -> SkewModule:
    """hom(-, x) / T for a linear sieve T on x (prime modulus)."""
    P, idx = representable_module(skew, x)
    pos = {skew.pairs[g]: k for k, g in enumerate(idx)}
    rows = []
    for y in range(skew.cat.n_objects):
        for trow in T.components[y]:
            row = np.zeros(len(idx), dtype=np.int64)
            for k, p in enumerate(gr.hom_pairs[(y, x)]):
                row[pos[p]] = trow[k]
            rows.append(row)
    Q, _ = quotient_module(P, linalg.as_matrix(rows, len(idx)))
    return Q


@dataclass
class Ext1Result:
    dim: int
    representatives: list
    hom_omega_dim: int
    details: dict = field(default_factory=dict)


def ext1(M, N, skew: SkewAlgebra | None = None) -> Ext1Result:
    """Ext^1 from a projective presentation 0 -> W -> free -> M -> 0.

    Accepts skew modules over a common algebra or module presheaves (which
    are converted through the stacking equivalence first).
    """
    if isinstance(M, ModulePresheaf):
        skew = skew or build_skew_algebra(M.cat, M.R)
        M = psi_to_gr(M, skew)
    if isinstance(N, ModulePresheaf):
        N = psi_to_gr(N, skew or build_skew_algebra(N.cat, N.R))
    return ext1_skew(M, N)


def ext1_skew(V: SkewModule, W: SkewModule) -> Ext1Result:
    A = V.algebra
    n = A.base.modulus
    if not linalg.is_prime(n):
        raise NotPrimeError(n, "ext1")
    d, m, w = A.rank, V.dim, W.dim
    if m == 0 or (w == 0):
        return Ext1Result(0, [], 0)
    # presentation: free module on the carrier basis, pi((a_i)) = sum b_i . a_i
    PI = np.zeros((m * d, m), dtype=np.int64)
    for i in range(m):
        for j in range(d):
            PI[i * d + j] = V.act[j][i]
    PI %= n
    K = linalg.kernel_left(PI, n)  # Omega, rows in the free module
    kw = K.shape[0]
    right_mult = [A.mul[:, j, :] % n for j in range(d)]
    act_free = [
        np.kron(np.eye(m, dtype=np.int64), right_mult[j]) % n for j in range(d)
    ]
    act_omega = np.zeros((d, kw, kw), dtype=np.int64)
    for j in range(d):
        for i, row in enumerate(K):
            img = (row @ act_free[j]) % n
            coeffs = linalg.solve_left(K, img, n)
            assert coeffs is not None
            act_omega[j][i] = coeffs
    Omega = SkewModule(A, act_omega)
    homs = hom_skew(Omega, W)
    flat = linalg.as_matrix([H.reshape(-1) for H in homs], kw * w)
    if kw == 0 or not homs:
        return Ext1Result(0, [], 0)
    image_rows = []
    for i in range(m):
        blocks = [
            np.einsum("q,qkl->kl", K[:, i * d : (i + 1) * d][r], W.act) % n
            for r in range(kw)
        ]
        # map phi_(i,c): restriction row r = e_c @ act_W(K_r's i-th component)
        for c in range(w):
            rowvals = np.array([blk[c] for blk in blocks], dtype=np.int64)
            image_rows.append(rowvals.reshape(-1))
    image = linalg.howell_form(linalg.as_matrix(image_rows, kw * w), n, kw * w)
    reps = []
    cur = image
    for s in flat:
        if not linalg.in_span(cur, s, n):
            reps.append(s.reshape(kw, w))
            cur = linalg.howell_form(np.vstack([cur, s.reshape(1, -1)]), n, kw * w)
    return Ext1Result(len(reps), reps, len(homs), {"omega_dim": kw})


def extension_cocycle_space(V: SkewModule, W: SkewModule):
    """Cocycle data for extensions 0 -> W -> E -> V -> 0.

    Middle structures on W (+) V are lower block triangular; the unknown
    blocks C_j solve the multiplicativity and unit constraints.  Returns
    (cocycle basis, coboundary span, builder) where the builder turns a
    cocycle vector into the middle-term module.
    """
    A = V.algebra
    n = A.base.modulus
    d, mv, mw = A.rank, V.dim, W.dim
    size = mv * mw
    if size == 0:
        empty = np.zeros((0, d * size), dtype=np.int64)

        def build_trivial(cvec) -> SkewModule:
            return direct_sum(W, V)

        return empty, empty, build_trivial
    cols = []
    for i in range(d):
        for j in range(d):
            # sum_q mul[i,j,q] C_q = C_i actW_j + actV_i C_j, entry by entry
            for a in range(mv):
                for b in range(mw):
                    col = np.zeros(d * size, dtype=np.int64)
                    for q in range(d):
                        if A.mul[i, j, q]:
                            col[q * size + a * mw + b] += int(A.mul[i, j, q])
                    # C_i @ actW[j]: entry (a,b) = sum_t C_i[a,t] actW[j][t,b]
                    for t in range(mw):
                        col[i * size + a * mw + t] -= int(W.act[j][t, b])
                    # actV[i] @ C_j: entry (a,b) = sum_s actV[i][a,s] C_j[s,b]
                    for s in range(mv):
                        col[j * size + s * mw + b] -= int(V.act[i][a, s])
                    cols.append(col % n)
    for a in range(mv):
        for b in range(mw):
            col = np.zeros(d * size, dtype=np.int64)
            for j in range(d):
                if A.unit[j]:
                    col[j * size + a * mw + b] += int(A.unit[j])
            cols.append(col % n)
    Cmat = np.stack(cols, axis=1)
    Z = linalg.kernel_left(Cmat, n)
    cob_rows = []
    for s in range(mv):
        for t in range(mw):
            D = np.zeros((mv, mw), dtype=np.int64)
            D[s, t] = 1
            vec = np.zeros(d * size, dtype=np.int64)
            for j in range(d):
                Cj = (D @ W.act[j] - V.act[j] @ D) % n
                vec[j * size : (j + 1) * size] = Cj.reshape(-1)
            cob_rows.append(vec)
    B = linalg.howell_form(linalg.as_matrix(cob_rows, d * size), n, d * size)

    def build(cvec) -> SkewModule:
        act = np.zeros((d, mw + mv, mw + mv), dtype=np.int64)
        for j in range(d):
            act[j][:mw, :mw] = W.act[j]
            act[j][mw:, mw:] = V.act[j]
            act[j][mw:, :mw] = np.asarray(cvec[j * size : (j + 1) * size]).reshape(
                mv, mw
            )
        return SkewModule(A, act)

    return Z, B, build


def ext1_dimension_by_enumeration(V: SkewModule, W: SkewModule) -> int:
    """Independent route: count extensions of V by W, cocycles mod coboundaries."""
    n = V.algebra.base.modulus
    if not linalg.is_prime(n):
        raise NotPrimeError(n, "ext1 enumeration")
    if V.dim == 0 or W.dim == 0:
        return 0
    Z, B, _ = extension_cocycle_space(V, W)
    return Z.shape[0] - B.shape[0]


def perpendicular_check(M, Jp: LinearTopology) -> PredicateResult:
    """Hom and Ext^1 vanishing against every representable quotient."""
    skew = _skew_of(Jp)
    if isinstance(M, ModulePresheaf):
        V = psi_to_gr(M, skew)
    else:
        V = M
    gr = Jp.gr
    for x in range(skew.cat.n_objects):
        for ci, T in enumerate(Jp.covers_at(x)):
            Q = representable_quotient(skew, gr, x, T)
            if Q.dim == 0:
                continue
            if hom_skew(Q, V):
                return PredicateResult(
                    False,
                    {"object": skew.cat.objects[x], "cover": ci, "reason": "hom"},
                )
            if ext1_skew(Q, V).dim:
                return PredicateResult(
                    False,
                    {"object": skew.cat.objects[x], "cover": ci, "reason": "ext1"},
                )
    return PredicateResult(True)


# ---------------------------------------------------------------------------
# enumeration of module structures


def _generating_words(A: FiniteAlgebra, budget: int):
    """A small generating set of basis indices plus spanning word data."""
    n = A.base.modulus
    d = A.rank
    if d == 0:
        return [], [()], linalg.as_matrix([], 0)
    for size in range(d + 1):
        for gens in itertools.combinations(range(d), size):
            words = [()]
            vecs = [A.unit.copy()]
            span = linalg.howell_form(linalg.as_matrix([A.unit], d), n, d)
            frontier = [((), A.unit.copy())]
            while frontier:
                word, vec = frontier.pop(0)
                for g in gens:
                    w2 = word + (g,)
                    if len(w2) > 2 * d:
                        continue
                    v2 = A.multiply(vec, A.basis_vector(g))
                    if not linalg.in_span(span, v2, n):
                        span = linalg.howell_form(
                            np.vstack([span, v2.reshape(1, -1)]), n, d
                        )
                        words.append(w2)
                        vecs.append(v2)
                        frontier.append((w2, v2))
            if span.shape[0] == d and all(
                int(r[linalg._leading(r)]) == 1 for r in span
            ):
                return list(gens), words, linalg.as_matrix(vecs, d)
    raise InputError("no generating set found (non-free span)")


def enumerate_skew_module_structures(
    A: FiniteAlgebra, dim: int, budget: int = 2**22
) -> list:
    """All unital right-module structures on (Z/n)^dim, as SkewModules."""
    n = A.base.modulus
    if dim == 0:
        return [zero_skew_module(A)]
    if A.rank == 0:
        return []  # only the zero space admits a unital structure
    gens, words, vecs = _generating_words(A, budget)
    coeff = []
    for i in range(A.rank):
        c = linalg.solve_left(vecs, A.basis_vector(i), n)
        if c is None:
            raise InputError("basis not reachable from generating words")
        coeff.append(c)
    coeff = np.array(coeff, dtype=np.int64)  # (rank, n_words)
    img_count = n ** (dim * dim)
    total = img_count ** len(gens)
    if total > budget:
        raise BudgetExceededError("module structure enumeration", total, budget)
    digits = np.arange(img_count)
    cells = [(digits // (n**c)) % n for c in range(dim * dim)]
    all_mats = np.stack(cells, axis=1).reshape(img_count, dim, dim).astype(np.int64)
    eye = np.eye(dim, dtype=np.int64)
    out = []
    chunk = 1 << 14
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        k = len(idx)
        gmats = {}
        for t, g in enumerate(gens):
            sel = (idx // (img_count**t)) % img_count
            gmats[g] = all_mats[sel]  # (k, dim, dim)
        wstack = np.empty((len(words), k, dim, dim), dtype=np.int64)
        for wi, word in enumerate(words):
            Mw = np.broadcast_to(eye, (k, dim, dim)).copy()
            for g in word:
                Mw = np.matmul(Mw, gmats[g]) % n
            wstack[wi] = Mw
        act = np.einsum("iw,wkab->kiab", coeff, wstack) % n
        ok = ~(np.einsum("j,kjab->kab", A.unit, act) % n != eye).any(axis=(1, 2))
        if ok.any():
            sub = act[ok]
            lhs = np.einsum("ijm,kmab->kijab", A.mul, sub) % n
            rhs = np.einsum("kiam,kjmb->kijab", sub, sub) % n
            ok2 = (lhs == rhs).all(axis=(1, 2, 3, 4))
            for a in sub[ok2]:
                out.append(SkewModule(A, a))
    return out


def enumerate_module_presheaves(
    cat: FiniteCategory, R: AlgebraPresheaf, max_total: int, budget: int = 2**22
) -> list:
    """All valid module presheaves of total dimension <= max_total."""
    n = R.base.modulus
    out = []
    obj_structures = {}
    for x in range(cat.n_objects):
        obj_structures[x] = {
            m: enumerate_skew_module_structures(R.algebra(x), m, budget)
            for m in range(max_total + 1)
        }
    rank_tuples = [
        ranks
        for ranks in itertools.product(range(max_total + 1), repeat=cat.n_objects)
        if sum(ranks) <= max_total
    ]
    if cat.n_objects == 0:
        return [zero_module_presheaf(cat, R)]
    nonid = [
        f for f in range(cat.n_morphisms) if f not in cat.identity
    ]
    for ranks in rank_tuples:
        action_choices = [obj_structures[x][ranks[x]] for x in range(cat.n_objects)]
        map_choices = []
        for f in nonid:
            shape = (ranks[cat.cod(f)], ranks[cat.dom(f)])
            count = n ** (shape[0] * shape[1])
            mats = []
            for idx in range(count):
                vals = [(idx // (n**c)) % n for c in range(shape[0] * shape[1])]
                mats.append(np.array(vals, dtype=np.int64).reshape(shape))
            map_choices.append(mats)
        combos = 1
        for ch in action_choices:
            combos *= max(len(ch), 1)
        for ch in map_choices:
            combos *= len(ch)
        if combos > budget:
            raise BudgetExceededError("module presheaf enumeration", combos, budget)
        for actions in itertools.product(*action_choices):
            for mats in itertools.product(*map_choices):
                maps = []
                k = 0
                for f in range(cat.n_morphisms):
                    if f in cat.identity:
                        maps.append(np.eye(ranks[cat.dom(f)], dtype=np.int64))
                    else:
                        maps.append(mats[k])
                        k += 1
                M = ModulePresheaf(
                    cat, R, ranks, maps, [V.act for V in actions]
                )
                if validate_module_presheaf(M).ok:
                    out.append(M)
    return out
