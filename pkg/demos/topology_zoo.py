"""Enumerate all Grothendieck topologies on the arrow category, match
each to the full subcategory that induces it, linearize, and test the
three small modules against the sheaf and torsion predicates.

Run:  python3 demos/topology_zoo.py
"""
import numpy as np

from torsite.algebra import constant_presheaf
from torsite.fixtures import a2_category, field_algebra
from torsite.grskew import build_gr, linearize_topology
from torsite.modules import ModulePresheaf, is_sheaf, is_torsion
from torsite.topology import enumerate_topologies, matching_subcategories


def arrow_module(r1, r2, amat):
    maps = [
        np.eye(r1, dtype=np.int64),
        np.eye(r2, dtype=np.int64),
        np.asarray(amat, dtype=np.int64).reshape(r2, r1),
    ]
    actions = [
        np.eye(r1, dtype=np.int64).reshape(1, r1, r1),
        np.eye(r2, dtype=np.int64).reshape(1, r2, r2),
    ]
    return ModulePresheaf(cat, R, [r1, r2], maps, actions)


cat = a2_category()
R = constant_presheaf(cat, field_algebra(2))
gr = build_gr(cat, R)

modules = {
    "P2 (ranks 1,1, map 1)": arrow_module(1, 1, [[1]]),
    "S1 (ranks 1,0)": arrow_module(1, 0, []),
    "S2 (ranks 0,1)": arrow_module(0, 1, []),
}

tops = enumerate_topologies(cat)
print(f"{len(tops)} topologies on the arrow category 1 -> 2\n")
for k, J in enumerate(tops):
    Ds = matching_subcategories(cat, J)
    names = ["{" + ", ".join(cat.objects[x] for x in D) + "}" for D in Ds]
    print(f"topology #{k}: induced by full subcategory on objects {', '.join(names)}")
    for x in range(cat.n_objects):
        sieves = [
            "{" + ", ".join(sorted(cat.morphisms[m].name for m in S.members)) + "}"
            for S in J.covers_at(x)
        ]
        print(f"  covers of {cat.objects[x]}: {', '.join(sieves)}")
    Jp = linearize_topology(gr, J)
    for label, M in modules.items():
        sh = bool(is_sheaf(M, Jp))
        to = bool(is_torsion(M, Jp))
        print(f"    {label}: sheaf={'yes' if sh else 'no '} torsion={'yes' if to else 'no '}")
    print()

print("reading the table: the coarser the topology, the more sheaves;")
print("the finer the topology, the more torsion modules.")
