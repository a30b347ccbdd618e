"""Build the skew category algebra of the arrow category over F_2 and
poke at it: basis, multiplication, object idempotents, center.

Run:  python3 demos/skew_algebra_tour.py
"""
import numpy as np

from torsite.algebra import constant_presheaf, validate_algebra
from torsite.fixtures import a2_category, field_algebra
from torsite.grskew import build_skew_algebra, end_generator_iso
from torsite.torsion import center, central_idempotents

cat = a2_category()
R = constant_presheaf(cat, field_algebra(2))
A = build_skew_algebra(cat, R)

print("objects:", list(cat.objects))
print("morphisms:", [m.name for m in cat.morphisms])
print("skew algebra dimension:", A.rank)
print("basis:", list(A.basis_names))
print("unit:", A.unit.tolist())

print("\nmultiplication table (basis x basis):")
width = max(len(b) for b in A.basis_names) + 2
header = " " * width + "".join(f"{b:>{width}}" for b in A.basis_names)
print(header)
for i, bi in enumerate(A.basis_names):
    row = [f"{bi:>{width}}"]
    for j in range(A.rank):
        prod = A.multiply(A.basis_vector(i), A.basis_vector(j))
        terms = [A.basis_names[k] for k in np.flatnonzero(prod)]
        row.append(f"{'+'.join(terms) if terms else '0':>{width}}")
    print("".join(row))

# this algebra is the 2x2 upper triangular matrices in disguise:
# 1*id2 <-> e11, 1*id1 <-> e22, 1*a <-> e12
rep = validate_algebra(A)
print("\nassociativity and unit laws:", "ok" if rep.ok else rep.violations)

print("\nobject idempotents:")
for x in range(cat.n_objects):
    e = A.object_idempotent(x)
    print(f"  object {cat.objects[x]}: {e.tolist()}, idempotent: {A.is_idempotent(e)}")

Z = center(A)
print("\ncenter dimension:", Z.shape[0], "- scalars only, the algebra is connected")
print("central idempotents:", [list(map(int, e)) for e in central_idempotents(A)])

rep = end_generator_iso(cat, R)
print("natural transformations of the identity = center of the algebra:",
      "ok" if rep.ok else rep.violations)
