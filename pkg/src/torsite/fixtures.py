"""Ready-made categories, algebras and presheaves used by tests and demos."""
from __future__ import annotations

import numpy as np

from .algebra import AlgebraPresheaf, BaseRing, FiniteAlgebra, constant_presheaf
from .fincat import FiniteCategory


def terminal_category() -> FiniteCategory:
    return FiniteCategory.from_data(["*"], [("id", "*", "*")], {"*": "id"}, {})


def a2_category() -> FiniteCategory:
    """Two objects and one arrow between them: 1 --a--> 2."""
    return FiniteCategory.from_data(
        ["1", "2"],
        [("id1", "1", "1"), ("id2", "2", "2"), ("a", "1", "2")],
        {"1": "id1", "2": "id2"},
        {},
    )


def a3_category() -> FiniteCategory:
    """Chain 1 --a--> 2 --b--> 3 with composite ba."""
    return FiniteCategory.from_data(
        ["1", "2", "3"],
        [
            ("id1", "1", "1"),
            ("id2", "2", "2"),
            ("id3", "3", "3"),
            ("a", "1", "2"),
            ("b", "2", "3"),
            ("ba", "1", "3"),
        ],
        {"1": "id1", "2": "id2", "3": "id3"},
        {("b", "a"): "ba"},
    )


def c2_monoid_category() -> FiniteCategory:
    """One object with an order-two automorphism."""
    return FiniteCategory.from_data(
        ["*"],
        [("e", "*", "*"), ("g", "*", "*")],
        {"*": "e"},
        {("g", "g"): "e"},
    )


def idempotent_monoid_category() -> FiniteCategory:
    """One object with a non-identity idempotent endomorphism."""
    return FiniteCategory.from_data(
        ["*"],
        [("e", "*", "*"), ("p", "*", "*")],
        {"*": "e"},
        {("p", "p"): "p"},
    )


def empty_category() -> FiniteCategory:
    return FiniteCategory((), (), (), np.zeros((0, 0), dtype=np.int64))


def field_algebra(n: int) -> FiniteAlgebra:
    return FiniteAlgebra(BaseRing(n), [[[1]]], [1], ("1",))


def product_field_algebra(n: int, k: int) -> FiniteAlgebra:
    """Direct product of k copies of Z/n, basis the orthogonal idempotents."""
    mul = np.zeros((k, k, k), dtype=np.int64)
    for i in range(k):
        mul[i, i, i] = 1
    return FiniteAlgebra(
        BaseRing(n), mul, np.ones(k, dtype=np.int64), tuple(f"e{i + 1}" for i in range(k))
    )


def group_algebra_c2(n: int) -> FiniteAlgebra:
    """Group algebra of the order-two group: basis 1, g with g*g = 1."""
    mul = np.zeros((2, 2, 2), dtype=np.int64)
    mul[0, 0, 0] = 1
    mul[0, 1, 1] = 1
    mul[1, 0, 1] = 1
    mul[1, 1, 0] = 1
    return FiniteAlgebra(BaseRing(n), mul, [1, 0], ("1", "g"))


def t2_algebra(n: int) -> FiniteAlgebra:
    """Upper triangular 2x2 matrices: basis e11, e12, e22."""
    names = ("e11", "e12", "e22")
    mul = np.zeros((3, 3, 3), dtype=np.int64)
    prod = {
        ("e11", "e11"): "e11",
        ("e11", "e12"): "e12",
        ("e12", "e22"): "e12",
        ("e22", "e22"): "e22",
    }
    for (a, b), c in prod.items():
        mul[names.index(a), names.index(b), names.index(c)] = 1
    return FiniteAlgebra(BaseRing(n), mul, [1, 0, 1], names)


def zero_algebra(n: int) -> FiniteAlgebra:
    return FiniteAlgebra(
        BaseRing(n), np.zeros((0, 0, 0), dtype=np.int64), np.zeros(0, dtype=np.int64), ()
    )


def a2_mixed_presheaf(n: int = 2) -> AlgebraPresheaf:
    """On the arrow category: a product of fields over 2, a field over 1,
    restriction along the arrow is the first projection."""
    cat = a2_category()
    f = field_algebra(n)
    ff = product_field_algebra(n, 2)
    eye1 = np.eye(1, dtype=np.int64)
    proj = np.array([[1], [0]], dtype=np.int64)
    return AlgebraPresheaf(cat, [f, ff], [eye1, np.eye(2, dtype=np.int64), proj])


def standard_fixtures() -> list:
    """The four (name, category, coefficient algebra) acceptance fixtures."""
    return [
        ("terminal_f2", terminal_category(), field_algebra(2)),
        ("a2_f2", a2_category(), field_algebra(2)),
        ("c2_f2", c2_monoid_category(), field_algebra(2)),
        ("terminal_f2xf2", terminal_category(), product_field_algebra(2, 2)),
    ]


def fixture_presheaves() -> list:
    """Same fixtures with the constant presheaf materialized."""
    return [
        (name, cat, constant_presheaf(cat, alg))
        for name, cat, alg in standard_fixtures()
    ]
