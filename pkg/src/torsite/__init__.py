"""torsite: desk-scale computations on ringed finite sites.

Finite categories, Grothendieck topologies, skew category algebras, the
linear Grothendieck construction, sheaf and torsion predicates, and the
classification of hereditary torsion pairs, TTF triples and recollements
by subcategories, idempotent ideals and central idempotents.
"""

__version__ = "0.1.0"
