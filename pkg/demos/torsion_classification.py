"""Classify torsion pairs over the 2x2 upper triangular matrix algebra.

Walks the module universe in dimensions <= 3, finds every torsion pair
by brute force, then reproduces the interesting ones from ring-theoretic
data: hereditary pairs from linear topologies, TTF triples from
idempotent ideals, split TTF triples from central idempotents.

Run:  python3 demos/torsion_classification.py
"""
from torsite.fixtures import t2_algebra
from torsite.torsion import (
    ModuleUniverse,
    brute_force_hereditary_pairs,
    brute_force_torsion_pairs,
    brute_force_ttf_triples,
    central_idempotents,
    enumerate_ideals,
    is_idempotent_ideal,
    split_ttf_from_central_idempotent,
    ttf_from_idempotent_ideal,
)

A = t2_algebra(2)
print("algebra: upper triangular 2x2 matrices over F_2, basis", list(A.basis_names))

U = ModuleUniverse(A, dim_bound=3)
dims = [V.dim for V in U.members]
print(f"\nmodule universe: {len(U.members)} iso classes of dimension <= 3")
print("dimensions:", dims)

print("\ntwo-sided ideals:")
for I in enumerate_ideals(A):
    gens = [list(map(int, r)) for r in I.matrix]
    flag = "idempotent" if is_idempotent_ideal(I) else "nilpotent or mixed"
    print(f"  size {I.size:2d}, rows {gens} ({flag})")

pairs = brute_force_torsion_pairs(U)
print(f"\n{len(pairs)} torsion pairs (X, Y), where every module is an")
print("extension of a torsion-free module by a torsion one:")
for w in pairs:
    xs = sorted(w.x_indices)
    ys = sorted(w.y_indices)
    tags = []
    if w.hereditary:
        tags.append("hereditary")
    if w.split:
        tags.append("split")
    print(f"  |X|={len(xs):2d} |Y|={len(ys):2d}  {' '.join(tags) or 'plain'}")

hered = brute_force_hereditary_pairs(U)
print(f"\nhereditary pairs: {len(hered)} (these match the linear topologies)")

triples = brute_force_ttf_triples(U)
print(f"\nTTF triples (X, Y, Z), both (X,Y) and (Y,Z) torsion pairs: {len(triples)}")
built = []
for I in enumerate_ideals(A):
    if is_idempotent_ideal(I):
        built.append(ttf_from_idempotent_ideal(I, U))
assert {t.key() for t in built} == {t.key() for t in triples}
print("each one arises from exactly one idempotent ideal: verified")

cents = central_idempotents(A)
split = [t for t in triples if t.split]
print(f"\ncentral idempotents: {[list(map(int, e)) for e in cents]}")
print(f"split TTF triples: {len(split)}")
assert {split_ttf_from_central_idempotent(e, U).key() for e in cents} == {
    t.key() for t in split
}
print("central idempotents <-> split TTF triples: verified")
