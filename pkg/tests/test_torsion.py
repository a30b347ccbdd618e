"""Ideal enumeration, module universes, torsion pair certification, and
the three classifications, pinned to hand-checked values for the upper
triangular 2x2 algebra, the product field, and the order-2 group algebra
over F2."""
import itertools

import numpy as np
import pytest

from torsite import torsion as tn
from torsite.algebra import constant_presheaf
from torsite.errors import BudgetExceededError, InputError, NotPrimeError
from torsite.fixtures import (
    a2_category,
    field_algebra,
    group_algebra_c2,
    idempotent_monoid_category,
    product_field_algebra,
    t2_algebra,
    terminal_category,
)
from torsite.modules import SkewModule, regular_module, submodule_module
from torsite.topology import enumerate_topologies, matching_subcategories

E11 = [1, 0, 0]
E12 = [0, 1, 0]
E22 = [0, 0, 1]


@pytest.fixture(scope="module")
def t2():
    return t2_algebra(2)


@pytest.fixture(scope="module")
def t2_universe(t2):
    return tn.ModuleUniverse(t2, 3)


@pytest.fixture(scope="module")
def kxk_universe():
    return tn.ModuleUniverse(product_field_algebra(2, 2), 3)


def simple_classes(t2, universe):
    s1 = universe.index_of(SkewModule(t2, np.array([[[1]], [[0]], [[0]]])))
    s2 = universe.index_of(SkewModule(t2, np.array([[[0]], [[0]], [[1]]])))
    p1, _ = submodule_module(regular_module(t2), np.array([E11, E12]))
    return s1, s2, universe.index_of(p1)


# ---------------------------------------------------------------------------
# ideals and centers


def test_t2_ideal_lattice(t2):
    ideals = tn.enumerate_ideals(t2)
    assert [I.size for I in ideals] == [1, 2, 4, 4, 8]
    idem = tn.enumerate_idempotent_ideals(t2)
    assert len(idem) == 4
    rad = tn.ideal_generated_by(t2, [E12])
    assert rad.size == 2
    assert not tn.is_idempotent_ideal(rad)
    assert tn.product_ideal(rad, rad).size == 1


def test_ideal_containment_and_products(t2):
    full = tn.ideal_generated_by(t2, [t2.unit])
    assert full.size == 8
    left = tn.ideal_generated_by(t2, [E11])
    right = tn.ideal_generated_by(t2, [E22])
    assert left.size == 4 and right.size == 4
    assert left.contains(E12) and right.contains(E12)
    assert tn.product_ideal(left, right).size == 2  # the radical
    assert tn.product_ideal(right, left).size == 1


def test_product_field_ideals_all_idempotent():
    A = product_field_algebra(2, 2)
    ideals = tn.enumerate_ideals(A)
    assert len(ideals) == 4
    assert all(tn.is_idempotent_ideal(I) for I in ideals)


def test_group_algebra_ideals():
    A = group_algebra_c2(2)
    ideals = tn.enumerate_ideals(A)
    assert [I.size for I in ideals] == [1, 2, 4]
    assert len(tn.enumerate_idempotent_ideals(A)) == 2


def test_centers_and_central_idempotents(t2):
    assert tn.center(t2).shape[0] == 1
    assert [tuple(int(v) for v in e) for e in tn.central_idempotents(t2)] == [
        (0, 0, 0),
        (1, 0, 1),
    ]
    assert tn.center(group_algebra_c2(2)).shape[0] == 2
    assert len(tn.central_idempotents(product_field_algebra(2, 2))) == 4
    assert tn.is_central_idempotent(t2, [1, 0, 1])
    assert not tn.is_central_idempotent(t2, E11)  # idempotent, not central
    assert not tn.is_central_idempotent(t2, E12)  # central test fails earlier: not idempotent


def test_trace_ideal_always_idempotent(t2, t2_universe):
    mods = t2_universe.members
    for picks in itertools.chain(
        itertools.combinations(range(len(mods)), 1),
        itertools.combinations(range(len(mods)), 2),
    ):
        I = tn.trace_ideal(t2, [mods[p] for p in picks])
        assert tn.is_idempotent_ideal(I)


def test_trace_ideal_of_projective_is_corner(t2):
    P1, _ = submodule_module(regular_module(t2), np.array([E11, E12]))
    I = tn.trace_ideal(t2, [P1])
    assert I.size == 4 and I.contains(E11) and I.contains(E12)


# ---------------------------------------------------------------------------
# the module universe


def test_t2_universe_members(t2_universe):
    dims = [V.dim for V in t2_universe.members]
    assert len(t2_universe) == 13
    assert dims == [0, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3]


def test_universe_index_is_isomorphism_invariant(t2, t2_universe):
    V = regular_module(t2)
    idx = t2_universe.index_of(V)
    G = np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    Ginv = tn.linalg.matrix_inverse(G, 2)
    act = np.stack([(Ginv @ M @ G) % 2 for M in V.act])
    assert t2_universe.index_of(SkewModule(t2, act)) == idx


def test_universe_rejects_oversize_and_foreign(t2_universe, t2):
    big = SkewModule(t2, np.stack([np.eye(4, dtype=np.int64)] * 3) * 0)
    with pytest.raises(InputError):
        t2_universe.index_of(big)


def test_universe_needs_prime_modulus():
    from torsite.fixtures import t2_algebra

    with pytest.raises(NotPrimeError):
        tn.ModuleUniverse(t2_algebra(4), 1)


def test_universe_budget():
    with pytest.raises(BudgetExceededError):
        tn.ModuleUniverse(t2_algebra(2), 3, budget=100)


def test_product_field_universe(kxk_universe):
    assert len(kxk_universe) == 10


def test_hom_dims_between_projectives_and_simples(t2, t2_universe):
    s1, s2, p1 = simple_classes(t2, t2_universe)
    assert t2_universe.hom_dim(p1, s1) == 1
    assert t2_universe.hom_dim(p1, s2) == 0
    assert t2_universe.hom_dim(s2, p1) == 1
    assert t2_universe.hom_dim(s1, p1) == 0


def test_sub_quot_middle_classes(t2, t2_universe):
    s1, s2, p1 = simple_classes(t2, t2_universe)
    zero = t2_universe.zero_index()
    assert t2_universe.sub_classes(p1) == {zero, s2, p1}
    assert t2_universe.quot_classes(p1) == {zero, s1, p1}
    # extensions of S1 (quotient) by S2 (sub): split and the projective
    mids = t2_universe.middle_classes(s1, s2)
    assert p1 in mids and len(mids) == 2
    assert t2_universe.middle_classes(s2, s1) == {
        t2_universe.index_of(
            SkewModule(
                t2,
                np.array(
                    [[[0, 0], [0, 1]], [[0, 0], [0, 0]], [[1, 0], [0, 0]]]
                ),
            )
        )
    }


# ---------------------------------------------------------------------------
# torsion pairs


def test_t2_torsion_pairs(t2, t2_universe):
    pairs = tn.brute_force_torsion_pairs(t2_universe)
    assert len(pairs) == 5
    s1, s2, p1 = simple_classes(t2, t2_universe)
    by_x = {p.x_indices: p for p in pairs}
    all_idx = frozenset(range(len(t2_universe)))
    zero = frozenset([t2_universe.zero_index()])
    assert zero in by_x and all_idx in by_x
    add_s1 = frozenset(
        i for i, V in enumerate(t2_universe.members) if _is_add(t2_universe, i, {s1})
    )
    add_s2 = frozenset(
        i for i, V in enumerate(t2_universe.members) if _is_add(t2_universe, i, {s2})
    )
    add_s1_p1 = frozenset(
        i
        for i, V in enumerate(t2_universe.members)
        if _is_add(t2_universe, i, {s1, p1})
    )
    assert set(by_x) == {zero, all_idx, add_s1, add_s2, add_s1_p1}
    assert by_x[add_s1].hereditary and by_x[add_s2].hereditary
    assert not by_x[add_s1_p1].hereditary
    assert by_x[add_s1].split and by_x[add_s1_p1].split
    assert not by_x[add_s2].split  # the projective cover does not decompose


def _is_add(universe, i, gens):
    """Is member i a direct sum of copies of the given classes?"""
    V = universe.members[i]
    if V.dim == 0:
        return True
    from torsite.modules import direct_sum

    parts = [universe.members[g] for g in gens if universe.members[g].dim]
    seen = set()
    for counts in itertools.product(range(V.dim + 1), repeat=len(parts)):
        if sum(c * p.dim for c, p in zip(counts, parts)) != V.dim or not any(counts):
            continue
        pieces = [p for c, p in zip(counts, parts) for _ in range(c)]
        S = pieces[0]
        for extra in pieces[1:]:
            S = direct_sum(S, extra)
        seen.add(universe.index_of(S))
    return i in seen


def test_hereditary_pairs_by_closure(t2_universe):
    hered = tn.brute_force_hereditary_pairs(t2_universe)
    assert len(hered) == 4
    assert all(p.hereditary for p in hered)
    pairs = tn.brute_force_torsion_pairs(t2_universe)
    assert {p.x_indices for p in hered} == {
        p.x_indices for p in pairs if p.hereditary
    }


def test_torsion_pair_check_sequences(t2, t2_universe):
    s1, s2, p1 = simple_classes(t2, t2_universe)
    pairs = tn.brute_force_torsion_pairs(t2_universe)
    w = next(p for p in pairs if s2 in p.x_indices and len(p.x_indices) == 4)
    assert w.y_indices == frozenset(
        i for i in range(len(t2_universe)) if _is_add(t2_universe, i, {s1})
    )
    seq = w.sequences[p1]
    assert seq.sub_class == s2 and seq.quot_class == s1 and not seq.splits
    # the witness sequence really sits inside the member
    assert seq.sub_rows.shape == (1, 2)
    assert seq.projection.shape == (2, 1)


def test_torsion_pair_check_rejects_non_pairs(t2_universe):
    s1 = t2_universe.members
    zero = t2_universe.zero_index()
    xs = frozenset([zero])
    ys = frozenset([zero])  # wrong: Y must be everything
    w = tn.torsion_pair_check(xs, ys, t2_universe)
    assert not w.ok and w.failures


def test_torsion_pair_check_accepts_predicates(t2, t2_universe):
    w = tn.torsion_pair_check(
        lambda V: V.dim == 0,
        lambda V: True,
        t2_universe,
    )
    assert w.ok and w.hereditary and w.split


def test_product_field_torsion_pairs(kxk_universe):
    pairs = tn.brute_force_torsion_pairs(kxk_universe)
    assert len(pairs) == 4
    assert all(p.hereditary and p.split for p in pairs)
    assert len(tn.brute_force_hereditary_pairs(kxk_universe)) == 4


def test_group_algebra_torsion_pairs():
    U = tn.ModuleUniverse(group_algebra_c2(2), 3)
    assert len(U) == 6
    pairs = tn.brute_force_torsion_pairs(U)
    assert len(pairs) == 2  # only the trivial pairs: every nonzero module maps to every other
    assert all(p.hereditary and p.split for p in pairs)


# ---------------------------------------------------------------------------
# TTF triples


def test_t2_ttf_triples(t2, t2_universe):
    triples = tn.brute_force_ttf_triples(t2_universe)
    assert len(triples) == 4
    assert sum(1 for t in triples if t.split) == 2
    s1, s2, p1 = simple_classes(t2, t2_universe)
    sizes = sorted((len(t.x_indices), len(t.y_indices), len(t.z_indices)) for t in triples)
    assert sizes == [(1, 13, 1), (4, 4, 6), (6, 4, 4), (13, 1, 13)]


def test_ttf_from_idempotent_ideal_matches_brute(t2, t2_universe):
    idem = tn.enumerate_idempotent_ideals(t2)
    triples = [tn.ttf_from_idempotent_ideal(I, t2_universe) for I in idem]
    assert all(t.ok for t in triples)
    keys = {t.key() for t in triples}
    assert len(keys) == len(idem)  # injective on ideals
    brute = {t.key() for t in tn.brute_force_ttf_triples(t2_universe)}
    assert keys == brute


def test_ttf_rejects_non_idempotent_ideal(t2, t2_universe):
    rad = tn.ideal_generated_by(t2, [E12])
    with pytest.raises(InputError):
        tn.ttf_from_idempotent_ideal(rad, t2_universe)


def test_split_ttf_from_central_idempotents(t2, t2_universe):
    es = tn.central_idempotents(t2)
    triples = [tn.split_ttf_from_central_idempotent(e, t2_universe) for e in es]
    assert all(t.ok and t.split for t in triples)
    assert len({t.key() for t in triples}) == 2
    for e, t in zip(es, triples):
        via_ideal = tn.ttf_from_idempotent_ideal(
            tn.ideal_generated_by(t2, [e]), t2_universe
        )
        assert via_ideal.key() == t.key()


def test_split_ttf_rejects_non_central(t2, t2_universe):
    with pytest.raises(InputError):
        tn.split_ttf_from_central_idempotent(E11, t2_universe)
    with pytest.raises(InputError):
        tn.split_ttf_from_central_idempotent(E12, t2_universe)


def test_product_field_split_ttf(kxk_universe):
    A = kxk_universe.algebra
    es = tn.central_idempotents(A)
    assert len(es) == 4
    triples = [tn.split_ttf_from_central_idempotent(e, kxk_universe) for e in es]
    assert all(t.ok and t.split for t in triples)
    assert len({t.key() for t in triples}) == 4
    brute = tn.brute_force_ttf_triples(kxk_universe)
    assert {t.key() for t in triples} == {t.key() for t in brute}
    assert all(t.split for t in brute)


# ---------------------------------------------------------------------------
# classification


def test_classify_a2_full_site():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    J = next(
        J
        for J in enumerate_topologies(cat)
        if matching_subcategories(cat, J) == [(0, 1)]
    )
    rep = tn.classify(cat, R, J, dim_bound=3)
    assert rep.ok
    assert rep.counts == {
        "universe_members": 13,
        "linear_topologies": 4,
        "hereditary_torsion_pairs": 4,
        "idempotent_ideals": 4,
        "ttf_triples": 4,
        "central_idempotents": 2,
        "split_ttf_triples": 2,
    }
    assert rep.summary().startswith("pass ")
    assert all(w.hereditary for w in rep.hereditary_pairs)
    assert sum(1 for t in rep.split_ttf_triples if t.split) == 2


def test_classify_counts_match_brute_oracles():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    J = next(
        J
        for J in enumerate_topologies(cat)
        if matching_subcategories(cat, J) == [(0, 1)]
    )
    rep = tn.classify(cat, R, J, dim_bound=3)
    U = tn.ModuleUniverse(tn.build_skew_algebra(cat, R), 3)
    assert rep.counts["hereditary_torsion_pairs"] == len(
        tn.brute_force_hereditary_pairs(U)
    )
    brute_ttf = tn.brute_force_ttf_triples(U)
    assert rep.counts["ttf_triples"] == len(brute_ttf)
    assert rep.counts["split_ttf_triples"] == sum(1 for t in brute_ttf if t.split)


def test_classify_terminal_product_field():
    cat = terminal_category()
    R = constant_presheaf(cat, product_field_algebra(2, 2))
    J = next(
        J
        for J in enumerate_topologies(cat)
        if matching_subcategories(cat, J) == [(0,)]
    )
    rep = tn.classify(cat, R, J, dim_bound=3)
    assert rep.ok
    assert rep.counts["universe_members"] == 10
    assert rep.counts["hereditary_torsion_pairs"] == 4
    assert rep.counts["ttf_triples"] == 4
    assert rep.counts["split_ttf_triples"] == 4


def test_classify_restricts_to_subcategory():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    J = next(
        J
        for J in enumerate_topologies(cat)
        if matching_subcategories(cat, J) == [(1,)]
    )
    rep = tn.classify(cat, R, J, dim_bound=3)
    assert rep.subcategory_objects == ("2",)
    assert rep.counts["universe_members"] == 4  # modules over the base field
    assert rep.counts["hereditary_torsion_pairs"] == 2


def test_classify_rejects_non_subcategory_topology():
    cat = idempotent_monoid_category()
    bad = next(
        J for J in enumerate_topologies(cat) if not matching_subcategories(cat, J)
    )
    R = constant_presheaf(cat, field_algebra(2))
    with pytest.raises(InputError):
        tn.classify(cat, R, bad)


def test_classify_is_deterministic():
    cat = terminal_category()
    R = constant_presheaf(cat, field_algebra(2))
    J = next(
        J
        for J in enumerate_topologies(cat)
        if matching_subcategories(cat, J) == [(0,)]
    )
    a = tn.classify(cat, R, J, dim_bound=2)
    b = tn.classify(cat, R, J, dim_bound=2)
    assert a.summary() == b.summary()
    assert [w.x_indices for w in a.hereditary_pairs] == [
        w.x_indices for w in b.hereditary_pairs
    ]
