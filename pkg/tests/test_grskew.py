"""Skew category algebras, the linear Grothendieck construction, and
linearized topologies, pinned against hand-computed values."""
import numpy as np
import pytest

from torsite import linalg
from torsite.algebra import constant_presheaf, validate_algebra
from torsite.errors import BudgetExceededError
from torsite.fixtures import (
    a2_category,
    a2_mixed_presheaf,
    c2_monoid_category,
    empty_category,
    field_algebra,
    fixture_presheaves,
    group_algebra_c2,
    product_field_algebra,
    standard_fixtures,
    terminal_category,
)
from torsite.grskew import (
    LinearTopology,
    build_gr,
    build_skew_algebra,
    end_generator_iso,
    enumerate_linear_topologies,
    is_linear_topology,
    linearize_sieve,
    linearize_topology,
    maximal_linear_sieve,
    pullback_linear_sieve,
    validate_linear_sieve,
    zero_linear_sieve,
)
from torsite.topology import (
    enumerate_topologies,
    subcategory_topology,
    trivial_topology,
)

EXPECTED_DIMS = {"terminal_f2": 1, "a2_f2": 3, "c2_f2": 2, "terminal_f2xf2": 2}


def test_skew_dimensions():
    for name, cat, alg in standard_fixtures():
        R = constant_presheaf(cat, alg)
        A = build_skew_algebra(cat, R)
        assert A.rank == EXPECTED_DIMS[name], name


def test_skew_dimension_formula():
    # total dimension = sum over morphisms of the rank at the domain
    cat = a2_category()
    R = a2_mixed_presheaf()
    A = build_skew_algebra(cat, R)
    want = sum(R.algebra(cat.dom(f)).rank for f in range(cat.n_morphisms))
    assert A.rank == want == 4


def test_skew_is_valid_algebra():
    for name, cat, alg in standard_fixtures():
        R = constant_presheaf(cat, alg)
        A = build_skew_algebra(cat, R)
        rep = validate_algebra(A)
        assert rep.ok, (name, rep.summary())
    A = build_skew_algebra(a2_category(), a2_mixed_presheaf())
    assert validate_algebra(A).ok


def test_a2_skew_products():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    A = build_skew_algebra(cat, R)
    pos = {name: i for i, name in enumerate(A.basis_names)}
    id1, id2, a = pos["1*id1"], pos["1*id2"], pos["1*a"]

    def prod(i, j):
        return A.multiply(A.basis_vector(i), A.basis_vector(j))

    # a: 1 -> 2, so a absorbs id_1 on the right and id_2 on the left
    assert prod(id2, a)[a] == 1 and prod(id2, a).sum() == 1
    assert prod(a, id1)[a] == 1 and prod(a, id1).sum() == 1
    assert not prod(a, a).any()
    assert not prod(id1, a).any()
    assert not prod(a, id2).any()
    assert not prod(id1, id2).any()
    unit = A.unit.copy()
    want = np.zeros(3, dtype=np.int64)
    want[id1] = 1
    want[id2] = 1
    assert (unit == want).all()


def test_c2_skew_is_group_algebra():
    cat = c2_monoid_category()
    A = build_skew_algebra(cat, constant_presheaf(cat, field_algebra(2)))
    G = group_algebra_c2(2)
    assert A.rank == G.rank == 2
    # identify basis by morphism name suffix
    order = [A.basis_names.index("1*e"), A.basis_names.index("1*g")]
    re_mul = A.mul[np.ix_(order, order, order)]
    assert (re_mul == G.mul).all()


def test_end_generator_iso_all_fixtures():
    for name, cat, alg in standard_fixtures():
        R = constant_presheaf(cat, alg)
        rep = end_generator_iso(cat, R)
        assert rep.ok, (name, rep.summary())
    rep = end_generator_iso(a2_category(), a2_mixed_presheaf())
    assert rep.ok, rep.summary()


def test_empty_category_gives_zero_algebra():
    cat = empty_category()
    R = constant_presheaf(cat, field_algebra(2))
    A = build_skew_algebra(cat, R)
    assert A.rank == 0


def test_gr_hom_ranks_and_composition():
    cat = a2_category()
    R = a2_mixed_presheaf()  # R(1) = F2, R(2) = F2 x F2
    gr = build_gr(cat, R)
    # hom(x, y) = one copy of R(x) per morphism x -> y
    assert gr.hom_rank(0, 0) == 1  # id_1
    assert gr.hom_rank(1, 1) == 2  # id_2 over F2 x F2
    assert gr.hom_rank(0, 1) == 1  # a over R(1) = F2
    assert gr.hom_rank(1, 0) == 0
    # (s at id2) o (r at a) = (R(a)(s) * r at a); R(a) = first projection
    s = np.array([1, 0], dtype=np.int64)
    r = np.array([1], dtype=np.int64)
    out = gr.compose(0, 1, 1, s, r)
    assert (out == np.array([1], dtype=np.int64)).all()
    s2 = np.array([0, 1], dtype=np.int64)
    assert not gr.compose(0, 1, 1, s2, r).any()


def test_linear_sieves_on_a2():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    gr = build_gr(cat, R)
    sieves = gr.linear_sieves_on(1)
    assert len(sieves) == 3
    sizes = sorted(
        sum(linalg.span_size(T.components[y], 2) for y in range(2)) for T in sieves
    )
    # zero sieve, the sieve generated by a, and the maximal sieve
    assert sizes == [2, 3, 4]


def test_linearize_sieve_matches_span():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    gr = build_gr(cat, R)
    a_index = next(
        f for f in range(cat.n_morphisms) if cat.morphisms[f].name == "a"
    )
    from torsite.topology import sieve_generated_by

    S = sieve_generated_by(cat, 1, [a_index])
    T = linearize_sieve(gr, S)
    assert validate_linear_sieve(T).ok
    # T(1) = all of hom(1, 2), T(2) = 0
    assert linalg.span_size(T.components[0], 2) == 2
    assert linalg.span_size(T.components[1], 2) == 1


def test_pullback_linear_sieve_examples():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    gr = build_gr(cat, R)
    T = maximal_linear_sieve(gr, 1)
    f = np.array([1], dtype=np.int64)  # the generator of hom(0, 1)
    P = pullback_linear_sieve(gr, T, 0, f)
    assert P.key() == maximal_linear_sieve(gr, 0).key()
    Z = zero_linear_sieve(gr, 1)
    PZ = pullback_linear_sieve(gr, Z, 0, f)
    # only the zero map precomposes into the zero sieve over a field
    assert linalg.span_size(PZ.components[0], 2) == 1


def test_pullback_along_zero_is_maximal():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    gr = build_gr(cat, R)
    Z = zero_linear_sieve(gr, 1)
    P = pullback_linear_sieve(gr, Z, 0, np.array([0], dtype=np.int64))
    assert P.key() == maximal_linear_sieve(gr, 0).key()


def test_linearize_topology_examples():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    gr = build_gr(cat, R)
    J = subcategory_topology(cat, [0])  # covers: dense at object 1
    Jp = linearize_topology(gr, J)
    assert is_linear_topology(gr, Jp).ok
    assert len(Jp.covers_at(0)) == 1
    covers1 = Jp.covers_at(1)
    assert len(covers1) == 2
    for T in covers1:
        assert linalg.span_size(T.components[0], 2) == 2  # contains all of hom(1,2)


def test_linearize_trivial_topology():
    for name, cat, alg in standard_fixtures():
        R = constant_presheaf(cat, alg)
        gr = build_gr(cat, R)
        Jp = linearize_topology(gr, trivial_topology(cat))
        assert is_linear_topology(gr, Jp).ok, name
        for x in range(cat.n_objects):
            assert len(Jp.covers_at(x)) == 1


def test_linearize_preserves_containment():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    gr = build_gr(cat, R)
    for J in enumerate_topologies(cat):
        Jp = linearize_topology(gr, J)
        assert is_linear_topology(gr, Jp).ok


EXPECTED_LINEAR_COUNTS = {
    "terminal_f2": 2,
    "a2_f2": 4,
    "terminal_f2xf2": 4,
}


def test_enumerate_linear_topologies_counts():
    for name, cat, alg in standard_fixtures():
        if name not in EXPECTED_LINEAR_COUNTS:
            continue
        R = constant_presheaf(cat, alg)
        gr = build_gr(cat, R)
        tops = enumerate_linear_topologies(gr)
        assert len(tops) == EXPECTED_LINEAR_COUNTS[name], name
        keys = {tuple(t.key()) for t in tops}
        assert len(keys) == len(tops)


def test_terminal_f2xf2_linear_topology_structure():
    cat = terminal_category()
    R = constant_presheaf(cat, product_field_algebra(2, 2))
    gr = build_gr(cat, R)
    tops = enumerate_linear_topologies(gr)
    cover_counts = sorted(len(t.covers_at(0)) for t in tops)
    # max only; max + e1-line; max + e2-line; all four sieves
    assert cover_counts == [1, 2, 2, 4]
    for t in tops:
        covers = t.covers_at(0)
        has_zero = any(linalg.span_size(T.components[0], 2) == 1 for T in covers)
        # a zero cover forces every sieve to cover
        assert not has_zero or len(covers) == 4


def test_is_linear_topology_rejects_bad_families():
    cat = terminal_category()
    R = constant_presheaf(cat, product_field_algebra(2, 2))
    gr = build_gr(cat, R)
    e1_line = linalg.howell_form(np.array([[1, 0]], dtype=np.int64), 2, 2)
    e2_line = linalg.howell_form(np.array([[0, 1]], dtype=np.int64), 2, 2)
    mx = maximal_linear_sieve(gr, 0)
    from torsite.grskew import LinearSieve

    T1 = LinearSieve(gr, 0, (e1_line,))
    T2 = LinearSieve(gr, 0, (e2_line,))
    # missing the maximal sieve
    bad = LinearTopology(gr, [[T1]])
    assert not is_linear_topology(gr, bad).ok
    # zero sieve covering forces every sieve to cover
    Z = zero_linear_sieve(gr, 0)
    bad2 = LinearTopology(gr, [[mx, Z]])
    assert not is_linear_topology(gr, bad2).ok
    # {max, e1-line, e2-line} without their intersection fails transitivity
    bad3 = LinearTopology(gr, [[mx, T1, T2]])
    assert not is_linear_topology(gr, bad3).ok
    good = LinearTopology(gr, [[mx, T1]])
    assert is_linear_topology(gr, good).ok


def test_enumeration_budget_guard():
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    gr = build_gr(cat, R)
    with pytest.raises(BudgetExceededError):
        enumerate_linear_topologies(gr, budget=1)
