"""Recollement data attached to an idempotent: corner and quotient
algebras, the six functors between their module categories, and the
verification that they form an adjoint-triple diagram on a bounded
universe.

For an idempotent e of A the three rings are eAe (the corner), A, and
A/AeA (the quotient).  All six functors are computed as concrete matrix
constructions on right modules; verification checks image/kernel
matching, full faithfulness of inflation, and all four unit/counit
triangle identities member by member.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import FiniteAlgebra
from .errors import InputError, NotPrimeError
from .modules import SkewModule, hom_skew, quotient_module
from .torsion import ModuleUniverse, ideal_generated_by


def _coords_rows(basis: np.ndarray, vecs, n: int, what: str) -> np.ndarray:
    """Express each vector in the row span of basis; rows of the result."""
    out = np.zeros((len(vecs), basis.shape[0]), dtype=np.int64)
    for i, v in enumerate(vecs):
        c = linalg.solve_left(basis, np.asarray(v, dtype=np.int64) % n, n)
        if c is None:
            raise InputError(f"{what}: vector leaves the expected span")
        out[i] = c
    return out


def corner_algebra(A: FiniteAlgebra, e) -> tuple:
    """The algebra eAe with unit e; returns (algebra, rows embedding it in A)."""
    n = A.base.modulus
    e = np.asarray(e, dtype=np.int64) % n
    prods = [A.multiply(A.multiply(e, A.basis_vector(j)), e) for j in range(A.rank)]
    rows = linalg.howell_form(linalg.as_matrix(prods, A.rank), n, A.rank)
    r = rows.shape[0]
    mul = np.zeros((r, r, r), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            mul[i, j] = _coords_rows(rows, [A.multiply(rows[i], rows[j])], n, "corner product")[0]
    unit = _coords_rows(rows, [e], n, "corner unit")[0] if r else np.zeros(0, dtype=np.int64)
    names = tuple(f"c{i}" for i in range(r))
    return FiniteAlgebra(A.base, mul, unit, names), rows


def quotient_algebra(A: FiniteAlgebra, ideal_rows: np.ndarray) -> tuple:
    """The algebra A/I; returns (algebra, projection, section).

    Coset coordinates are the non-pivot columns of the Howell form of I,
    so the modulus must be prime.  projection has shape (rank A, rank Q),
    section (rank Q, rank A), with section @ projection the identity.
    """
    n = A.base.modulus
    if not linalg.is_prime(n):
        raise NotPrimeError(n, "quotient algebra carrier")
    H = linalg.howell_form(linalg.as_matrix(list(ideal_rows), A.rank), n, A.rank)
    comp = linalg.complement_columns(H, A.rank)
    q = len(comp)
    proj = np.zeros((A.rank, q), dtype=np.int64)
    for i in range(A.rank):
        proj[i] = linalg.reduce_vector(H, A.basis_vector(i), n)[comp]
    sec = np.zeros((q, A.rank), dtype=np.int64)
    for c, col in enumerate(comp):
        sec[c, col] = 1
    mul = np.zeros((q, q, q), dtype=np.int64)
    for i in range(q):
        for j in range(q):
            mul[i, j] = (A.multiply(sec[i], sec[j]) @ proj) % n
    unit = (A.unit @ proj) % n
    names = tuple(f"q{i}" for i in range(q))
    return FiniteAlgebra(A.base, mul, unit, names), proj, sec


def _quotient_with_section(V: SkewModule, rows) -> tuple:
    Q, proj = quotient_module(V, rows)
    n = V.algebra.base.modulus
    H = linalg.howell_form(linalg.as_matrix(list(rows), V.dim), n, V.dim)
    comp = linalg.complement_columns(H, V.dim)
    sec = np.zeros((len(comp), V.dim), dtype=np.int64)
    for c, col in enumerate(comp):
        sec[c, col] = 1
    return Q, proj, sec


def _is_module_map(S: SkewModule, T: SkewModule, F: np.ndarray) -> bool:
    n = S.algebra.base.modulus
    for j in range(S.algebra.rank):
        if ((S.act[j] @ F - F @ T.act[j]) % n).any():
            return False
    return True


class Recollement:
    """Functor data for the idempotent e: eAe <- A -> A/AeA."""

    def __init__(self, A: FiniteAlgebra, e):
        n = A.base.modulus
        e = np.asarray(e, dtype=np.int64) % n
        if not A.is_idempotent(e):
            raise InputError("recollement needs an idempotent element")
        if not linalg.is_prime(n):
            raise NotPrimeError(n, "recollement verification")
        self.A = A
        self.e = e
        self.corner, self.corner_rows = corner_algebra(A, e)
        self.ideal = ideal_generated_by(A, [e])
        self.quotient, self.alg_proj, self.alg_sec = quotient_algebra(
            A, self.ideal.matrix
        )
        # eA: right A-module and left eAe-module
        ea = [A.multiply(e, A.basis_vector(j)) for j in range(A.rank)]
        self.eA_rows = linalg.howell_form(linalg.as_matrix(ea, A.rank), n, A.rank)
        p = self.eA_rows.shape[0]
        self.ea_right = np.stack(
            [
                _coords_rows(
                    self.eA_rows,
                    [A.multiply(x, A.basis_vector(j)) for x in self.eA_rows],
                    n,
                    "eA right action",
                )
                for j in range(A.rank)
            ]
        ) if p else np.zeros((A.rank, 0, 0), dtype=np.int64)
        # Ae: left A-module and right eAe-module
        ae = [A.multiply(A.basis_vector(j), e) for j in range(A.rank)]
        self.Ae_rows = linalg.howell_form(linalg.as_matrix(ae, A.rank), n, A.rank)
        d = self.Ae_rows.shape[0]
        self.ae_corner = np.stack(
            [
                _coords_rows(
                    self.Ae_rows,
                    [A.multiply(v, c) for v in self.Ae_rows],
                    n,
                    "Ae corner action",
                )
                for c in self.corner_rows
            ]
        ) if d and self.corner.rank else np.zeros((self.corner.rank, d, d), dtype=np.int64)
        self.ae_left = np.stack(
            [
                _coords_rows(
                    self.Ae_rows,
                    [A.multiply(A.basis_vector(j), v) for v in self.Ae_rows],
                    n,
                    "Ae left action",
                )
                for j in range(A.rank)
            ]
        ) if d else np.zeros((A.rank, 0, 0), dtype=np.int64)
        self.Ae_corner_module = SkewModule(self.corner, self.ae_corner)
        self.e_in_eA = _coords_rows(self.eA_rows, [e], n, "unit in eA")[0] if p else np.zeros(0, dtype=np.int64)
        self.e_in_Ae = _coords_rows(self.Ae_rows, [e], n, "unit in Ae")[0] if d else np.zeros(0, dtype=np.int64)

    # -- the six functors ---------------------------------------------------

    def j_star(self, M: SkewModule) -> tuple:
        """M -> Me as a corner module; returns (module, rows in M)."""
        n = self.A.base.modulus
        E = M.act_of(self.e)
        rows = linalg.howell_form(E, n, M.dim)
        act = np.zeros((self.corner.rank, rows.shape[0], rows.shape[0]), dtype=np.int64)
        for t in range(self.corner.rank):
            act[t] = _coords_rows(
                rows, [(v @ M.act_of(self.corner_rows[t])) % n for v in rows], n, "Me action"
            )
        return SkewModule(self.corner, act), rows

    def j_star_map(self, M, rowsM, N, rowsN, F) -> np.ndarray:
        n = self.A.base.modulus
        return _coords_rows(rowsN, [(v @ F) % n for v in rowsM], n, "restricted map")

    def i_star(self, N: SkewModule) -> SkewModule:
        """Inflation of a quotient-algebra module along A -> A/AeA."""
        act = np.stack(
            [N.act_of(self.alg_proj[j]) for j in range(self.A.rank)]
        ) if self.A.rank else np.zeros((0, N.dim, N.dim), dtype=np.int64)
        return SkewModule(self.A, act)

    def i_upper(self, M: SkewModule) -> tuple:
        """M -> M / M*AeA; returns (quotient module, projection, section)."""
        n = self.A.base.modulus
        rows = []
        for r in self.ideal.rows:
            rows.extend(M.act_of(np.array(r, dtype=np.int64)) % n)
        Qa, proj, sec = _quotient_with_section(M, linalg.as_matrix(rows, M.dim))
        act = np.stack(
            [Qa.act_of(self.alg_sec[t]) for t in range(self.quotient.rank)]
        ) if self.quotient.rank else np.zeros((0, Qa.dim, Qa.dim), dtype=np.int64)
        return SkewModule(self.quotient, act), proj, sec

    def i_shriek(self, M: SkewModule) -> tuple:
        """The largest submodule killed by AeA; returns (module, rows in M)."""
        n = self.A.base.modulus
        mats = [M.act_of(np.array(r, dtype=np.int64)) for r in self.ideal.rows]
        if mats and M.dim:
            K = linalg.kernel_left(np.concatenate(mats, axis=1), n)
        else:
            K = np.eye(M.dim, dtype=np.int64)
        act = np.zeros((self.quotient.rank, K.shape[0], K.shape[0]), dtype=np.int64)
        for t in range(self.quotient.rank):
            act[t] = _coords_rows(
                K, [(v @ M.act_of(self.alg_sec[t])) % n for v in K], n, "socle action"
            )
        return SkewModule(self.quotient, act), K

    def _free_tensor(self, N: SkewModule) -> SkewModule:
        """N tensor eA over the base ring, as a right A-module."""
        p = self.eA_rows.shape[0]
        m = N.dim * p
        act = np.stack(
            [np.kron(np.eye(N.dim, dtype=np.int64), self.ea_right[j]) for j in range(self.A.rank)]
        ) if self.A.rank else np.zeros((0, m, m), dtype=np.int64)
        return SkewModule(self.A, act)

    def _tensor_relations(self, N: SkewModule) -> np.ndarray:
        n = self.A.base.modulus
        p = self.eA_rows.shape[0]
        rel = []
        for r in range(N.dim):
            for t in range(self.corner.rank):
                nc = N.act[t][r]
                for s in range(p):
                    row = np.zeros(N.dim * p, dtype=np.int64)
                    for r2 in range(N.dim):
                        row[r2 * p + s] += nc[r2]
                    cx = _coords_rows(
                        self.eA_rows,
                        [self.A.multiply(self.corner_rows[t], self.eA_rows[s])],
                        n,
                        "corner action on eA",
                    )[0]
                    for s2 in range(p):
                        row[r * p + s2] -= cx[s2]
                    rel.append(row % n)
        return linalg.as_matrix(rel, N.dim * p)

    def j_shriek(self, N: SkewModule) -> tuple:
        """N tensor_{eAe} eA; returns (module, projection, section)."""
        F = self._free_tensor(N)
        return _quotient_with_section(F, self._tensor_relations(N))

    def j_shriek_map(self, N, dataN, N2, dataN2, G) -> np.ndarray:
        n = self.A.base.modulus
        p = self.eA_rows.shape[0]
        _, projN, secN = dataN
        _, projN2, _ = dataN2
        return (secN @ np.kron(G, np.eye(p, dtype=np.int64)) @ projN2) % n

    def j_lower(self, N: SkewModule) -> tuple:
        """Corner-module maps Ae -> N as a right A-module.

        Returns (module, hom basis matrices); the A-action precomposes
        with the left multiplication of A on Ae.
        """
        n = self.A.base.modulus
        d = self.Ae_rows.shape[0]
        basis = hom_skew(self.Ae_corner_module, N)
        h = len(basis)
        flat = linalg.as_matrix([B.reshape(-1) % n for B in basis], d * N.dim)
        act = np.zeros((self.A.rank, h, h), dtype=np.int64)
        for j in range(self.A.rank):
            imgs = [((self.ae_left[j] @ B) % n).reshape(-1) for B in basis]
            act[j] = _coords_rows(flat, imgs, n, "hom module action") if h else np.zeros((0, 0), dtype=np.int64)
        return SkewModule(self.A, act), basis

    def j_lower_map(self, N, basisN, N2, basisN2, G) -> np.ndarray:
        n = self.A.base.modulus
        d = self.Ae_rows.shape[0]
        flat2 = linalg.as_matrix([B.reshape(-1) % n for B in basisN2], d * N2.dim)
        imgs = [((B @ G) % n).reshape(-1) for B in basisN]
        return _coords_rows(flat2, imgs, n, "hom functor map")


@dataclass
class RecollementReport:
    algebra: FiniteAlgebra
    idempotent: tuple
    corner_rank: int
    quotient_rank: int
    universe_sizes: dict
    checks: dict
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        body = ", ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in self.checks.items())
        return ("pass " if self.ok else "FAIL ") + body


def verify_recollement(
    A: FiniteAlgebra, e, dim_bound: int = 3, budget: int = 2**22
) -> RecollementReport:
    """Build the six functors for e and verify the recollement axioms.

    Checks, on every member of the bounded module universes: the image of
    inflation equals the kernel of the corner restriction, inflation is
    fully faithful, and the four adjunctions (extension -| restriction -|
    coextension and pullback -| inflation -| socle) satisfy both triangle
    identities with genuinely module-linear units and counits.
    """
    rec = Recollement(A, e)
    n = A.base.modulus
    UA = ModuleUniverse(A, dim_bound, budget)
    UX = ModuleUniverse(rec.corner, dim_bound, budget)
    UY = ModuleUniverse(rec.quotient, dim_bound, budget)
    checks = {}
    failures = []

    def fail(name, detail):
        failures.append((name, detail))

    # image of inflation = kernel of corner restriction, as universe classes
    ker = {
        i for i, M in enumerate(UA.members) if not (M.act_of(rec.e) % n).any()
    }
    img = set()
    for N in UY.members:
        M = rec.i_star(N)
        img.add(UA.index_of(M))
    checks["image_matches_kernel"] = img == ker
    if img != ker:
        fail("image_matches_kernel", (sorted(img), sorted(ker)))

    # full faithfulness of inflation
    ff = True
    for a, Na in enumerate(UY.members):
        for b, Nb in enumerate(UY.members):
            lhs = len(hom_skew(Na, Nb))
            rhs = len(hom_skew(rec.i_star(Na), rec.i_star(Nb)))
            if lhs != rhs:
                ff = False
                fail("inflation_fully_faithful", (a, b, lhs, rhs))
    checks["inflation_fully_faithful"] = ff

    eye = lambda k: np.eye(k, dtype=np.int64)

    # (pullback -| inflation): unit M -> i_* i^* M is the quotient projection
    ok1 = True
    for M in UA.members:
        QM, projM, secM = rec.i_upper(M)
        iQM = rec.i_star(QM)
        if not _is_module_map(M, iQM, projM):
            ok1 = False
            fail("pullback_inflation_triangles", ("unit not a module map", M.key()))
            continue
        # F(eta) then the counit at F M must be the identity of F M
        QiQM, projQ, secQ = rec.i_upper(iQM)
        induced = (secM @ projM @ projQ) % n
        counit = linalg.matrix_inverse(projQ, n)
        if counit is None or ((induced @ counit) % n != eye(QM.dim)).any():
            ok1 = False
            fail("pullback_inflation_triangles", ("first identity", M.key()))
    for N in UY.members:
        iN = rec.i_star(N)
        QiN, projN, secN = rec.i_upper(iN)
        counit = linalg.matrix_inverse(projN, n)
        if counit is None or not _is_module_map(QiN, N, counit) or (
            (projN @ counit) % n != eye(N.dim)
        ).any():
            ok1 = False
            fail("pullback_inflation_triangles", ("second identity", N.key()))
    checks["pullback_inflation_triangles"] = ok1

    # (inflation -| socle): counit i_* i^! M -> M is the inclusion
    ok2 = True
    for M in UA.members:
        SM, K = rec.i_shriek(M)
        iSM = rec.i_star(SM)
        if not _is_module_map(iSM, M, K):
            ok2 = False
            fail("inflation_socle_triangles", ("counit not a module map", M.key()))
            continue
        SiSM, K0 = rec.i_shriek(iSM)
        induced = _coords_rows(K, [(v @ K) % n for v in K0], n, "socle map")
        unit = _coords_rows(K0, list(eye(SM.dim)), n, "socle unit")
        if ((unit @ induced) % n != eye(SM.dim)).any():
            ok2 = False
            fail("inflation_socle_triangles", ("second identity", M.key()))
    for N in UY.members:
        iN = rec.i_star(N)
        SiN, K = rec.i_shriek(iN)
        unit = _coords_rows(K, list(eye(N.dim)), n, "socle unit")
        if not _is_module_map(N, SiN, unit) or ((unit @ K) % n != eye(N.dim)).any():
            ok2 = False
            fail("inflation_socle_triangles", ("first identity", N.key()))
    checks["inflation_socle_triangles"] = ok2

    # (extension -| restriction): j_! -| j^*
    ok3 = True
    p = rec.eA_rows.shape[0]
    for N in UX.members:
        data = rec.j_shriek(N)
        JN, projF, secF = data
        # unit: n |-> class(n tensor e), landing in (j_! N) e
        emb = np.zeros((N.dim, N.dim * p), dtype=np.int64)
        for r in range(N.dim):
            emb[r, r * p : (r + 1) * p] = rec.e_in_eA
        JNe, rowsJNe = rec.j_star(JN)
        unit = _coords_rows(rowsJNe, list((emb @ projF) % n), n, "tensor unit")
        if not _is_module_map(N, JNe, unit):
            ok3 = False
            fail("extension_restriction_triangles", ("unit not a module map", N.key()))
            continue
        # first identity at N: j_!(unit) then counit at j_! N
        dataJ = rec.j_shriek(JNe)
        junit = rec.j_shriek_map(N, data, JNe, dataJ, unit)
        counit_free = np.zeros((JNe.dim * p, JN.dim), dtype=np.int64)
        for rho in range(JNe.dim):
            for s in range(p):
                counit_free[rho * p + s] = (
                    rowsJNe[rho] @ JN.act_of(rec.eA_rows[s])
                ) % n
        counit = (dataJ[2] @ counit_free) % n
        if not _is_module_map(dataJ[0], JN, counit) or (
            (junit @ counit) % n != eye(JN.dim)
        ).any():
            ok3 = False
            fail("extension_restriction_triangles", ("first identity", N.key()))
    for M in UA.members:
        Me, rowsMe = rec.j_star(M)
        data = rec.j_shriek(Me)
        JMe, projF, secF = data
        counit_free = np.zeros((Me.dim * p, M.dim), dtype=np.int64)
        for rho in range(Me.dim):
            for s in range(p):
                counit_free[rho * p + s] = (rowsMe[rho] @ M.act_of(rec.eA_rows[s])) % n
        counit = (secF @ counit_free) % n
        if not _is_module_map(JMe, M, counit):
            ok3 = False
            fail("extension_restriction_triangles", ("counit not a module map", M.key()))
            continue
        JMee, rowsJMee = rec.j_star(JMe)
        emb = np.zeros((Me.dim, Me.dim * p), dtype=np.int64)
        for r in range(Me.dim):
            emb[r, r * p : (r + 1) * p] = rec.e_in_eA
        unit = _coords_rows(rowsJMee, list((emb @ projF) % n), n, "tensor unit")
        jcounit = rec.j_star_map(JMe, rowsJMee, M, rowsMe, counit)
        if ((unit @ jcounit) % n != eye(Me.dim)).any():
            ok3 = False
            fail("extension_restriction_triangles", ("second identity", M.key()))
    checks["extension_restriction_triangles"] = ok3

    # (restriction -| coextension): j^* -| j_*
    ok4 = True
    d = rec.Ae_rows.shape[0]
    for M in UA.members:
        Me, rowsMe = rec.j_star(M)
        HN, basis = rec.j_lower(Me)
        flat = linalg.as_matrix([B.reshape(-1) % n for B in basis], d * Me.dim)
        # unit: m |-> (v in Ae |-> m v restricted to Me)
        unit_rows = []
        for i in range(M.dim):
            phi = np.zeros((d, Me.dim), dtype=np.int64)
            for k in range(d):
                img = (np.eye(M.dim, dtype=np.int64)[i] @ M.act_of(rec.Ae_rows[k])) % n
                phi[k] = _coords_rows(rowsMe, [img], n, "unit image")[0]
            unit_rows.append(phi.reshape(-1))
        unit = _coords_rows(flat, unit_rows, n, "hom unit") if basis else np.zeros((M.dim, 0), dtype=np.int64)
        if not _is_module_map(M, HN, unit):
            ok4 = False
            fail("restriction_coextension_triangles", ("unit not a module map", M.key()))
            continue
        HNe, rowsHNe = rec.j_star(HN)
        # counit: psi in (j_* N) e |-> psi(e)
        counit = np.zeros((HNe.dim, Me.dim), dtype=np.int64)
        for row in range(HNe.dim):
            Hmat = np.tensordot(rowsHNe[row], np.stack(basis) if basis else np.zeros((0, d, Me.dim), dtype=np.int64), axes=(0, 0)) % n
            counit[row] = (rec.e_in_Ae @ Hmat) % n
        junit = _coords_rows(rowsHNe, [(v @ unit) % n for v in rowsMe], n, "restricted unit")
        if not _is_module_map(HNe, Me, counit) or (
            (junit @ counit) % n != eye(Me.dim)
        ).any():
            ok4 = False
            fail("restriction_coextension_triangles", ("first identity", M.key()))
    for N in UX.members:
        HN, basis = rec.j_lower(N)
        HNe, rowsHNe = rec.j_star(HN)
        counit = np.zeros((HNe.dim, N.dim), dtype=np.int64)
        for row in range(HNe.dim):
            Hmat = np.tensordot(rowsHNe[row], np.stack(basis) if basis else np.zeros((0, d, N.dim), dtype=np.int64), axes=(0, 0)) % n
            counit[row] = (rec.e_in_Ae @ Hmat) % n
        if not _is_module_map(HNe, N, counit):
            ok4 = False
            fail("restriction_coextension_triangles", ("counit not a module map", N.key()))
            continue
        # second identity at N: unit at j_* N then j_*(counit)
        HHN, basis2 = rec.j_lower(HNe)
        flat2 = linalg.as_matrix([B.reshape(-1) % n for B in basis2], d * HNe.dim)
        unit_rows = []
        for i in range(HN.dim):
            phi = np.zeros((d, HNe.dim), dtype=np.int64)
            for k in range(d):
                img = (np.eye(HN.dim, dtype=np.int64)[i] @ HN.act_of(rec.Ae_rows[k])) % n
                phi[k] = _coords_rows(rowsHNe, [img], n, "unit image")[0]
            unit_rows.append(phi.reshape(-1))
        unit = _coords_rows(flat2, unit_rows, n, "hom unit") if basis2 else np.zeros((HN.dim, 0), dtype=np.int64)
        jcounit = rec.j_lower_map(HNe, basis2, N, basis, counit)
        if ((unit @ jcounit) % n != eye(HN.dim)).any():
            ok4 = False
            fail("restriction_coextension_triangles", ("second identity", N.key()))
    checks["restriction_coextension_triangles"] = ok4

    return RecollementReport(
        A,
        tuple(int(v) for v in rec.e),
        rec.corner.rank,
        rec.quotient.rank,
        {"middle": len(UA), "corner": len(UX), "quotient": len(UY)},
        checks,
        failures,
    )
