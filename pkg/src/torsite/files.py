"""JSON interchange: categories, algebra presheaves, topologies,
and module presheaves.

Every file carries a versioned ``schema`` field.  Loaders validate
structure and name references eagerly and raise InputError with a
file-and-key location; writers emit deterministic documents (sorted
keys, plain integer matrices).
"""
from __future__ import annotations

import json

import numpy as np

from .algebra import AlgebraPresheaf, BaseRing, FiniteAlgebra
from .errors import InputError
from .fincat import FiniteCategory
from .modules import ModulePresheaf, validate_module_presheaf
from .topology import GrothendieckTopology, Sieve, is_sieve, is_topology

CATEGORY_SCHEMA = "torsite/category-v1"
PRESHEAF_SCHEMA = "torsite/presheaf-v1"
TOPOLOGY_SCHEMA = "torsite/topology-v1"
MODULE_SCHEMA = "torsite/module-v1"


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return doc


def dump_json(doc, path: str | None = None) -> str:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise InputError(f"{where}: missing key {key!r}")
    return doc[key]


def _int_matrix(data, where: str) -> np.ndarray:
    try:
        M = np.asarray(data, dtype=np.int64)
    except (TypeError, ValueError):
        raise InputError(f"{where}: expected an integer matrix") from None
    if M.ndim == 1 and M.size == 0:
        M = M.reshape(0, 0)
    if M.ndim != 2:
        raise InputError(f"{where}: expected a two-dimensional matrix")
    return M


# ---------------------------------------------------------------------------
# categories


def category_to_doc(cat: FiniteCategory) -> dict:
    compose = []
    for g in range(cat.n_morphisms):
        for f in range(cat.n_morphisms):
            gf = int(cat.compose_table[g, f])
            if gf < 0 or g in cat.identity or f in cat.identity:
                continue
            compose.append(
                [cat.morphisms[g].name, cat.morphisms[f].name, cat.morphisms[gf].name]
            )
    return {
        "schema": CATEGORY_SCHEMA,
        "objects": list(cat.objects),
        "morphisms": [
            {"name": m.name, "dom": cat.objects[m.dom], "cod": cat.objects[m.cod]}
            for m in cat.morphisms
        ],
        "identity": {
            cat.objects[x]: cat.morphisms[cat.identity[x]].name
            for x in range(cat.n_objects)
        },
        "compose": sorted(compose),
    }


def category_from_doc(doc: dict, where: str = "category") -> FiniteCategory:
    objects = _need(doc, "objects", where)
    if not isinstance(objects, list) or not all(isinstance(o, str) for o in objects):
        raise InputError(f"{where}.objects: expected a list of strings")
    raw_mors = _need(doc, "morphisms", where)
    mors = []
    for i, m in enumerate(raw_mors):
        if not isinstance(m, dict):
            raise InputError(f"{where}.morphisms[{i}]: expected an object")
        mors.append(
            (
                _need(m, "name", f"{where}.morphisms[{i}]"),
                _need(m, "dom", f"{where}.morphisms[{i}]"),
                _need(m, "cod", f"{where}.morphisms[{i}]"),
            )
        )
    identity = _need(doc, "identity", where)
    raw_comp = doc.get("compose", [])
    pairs = {}
    for i, triple in enumerate(raw_comp):
        if not (isinstance(triple, list) and len(triple) == 3):
            raise InputError(f"{where}.compose[{i}]: expected [g, f, gf]")
        pairs[(triple[0], triple[1])] = triple[2]
    try:
        return FiniteCategory.from_data(objects, mors, identity, pairs)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def load_category(path: str) -> FiniteCategory:
    doc = load_json(path)
    if doc.get("schema") != CATEGORY_SCHEMA:
        raise InputError(f"{path}: expected schema {CATEGORY_SCHEMA!r}")
    return category_from_doc(doc, path)


# ---------------------------------------------------------------------------
# algebra presheaves


def presheaf_to_doc(cat: FiniteCategory, R: AlgebraPresheaf) -> dict:
    algebras = {}
    for x in range(cat.n_objects):
        alg = R.algebra(x)
        algebras[cat.objects[x]] = {
            "basis": list(alg.basis_names),
            "unit": [int(v) for v in alg.unit],
            "mul": alg.mul.tolist(),
        }
    return {
        "schema": PRESHEAF_SCHEMA,
        "category": {
            k: v for k, v in category_to_doc(cat).items() if k != "schema"
        },
        "base": {"modulus": R.base.modulus},
        "algebras": algebras,
        "maps": {
            cat.morphisms[f].name: R.map(f).tolist()
            for f in range(cat.n_morphisms)
        },
    }


def presheaf_from_doc(doc: dict, where: str = "presheaf") -> tuple:
    cat = category_from_doc(_need(doc, "category", where), f"{where}.category")
    base_doc = _need(doc, "base", where)
    base = BaseRing(int(_need(base_doc, "modulus", f"{where}.base")))
    algs_doc = _need(doc, "algebras", where)
    algebras = []
    for x, obj in enumerate(cat.objects):
        if obj not in algs_doc:
            raise InputError(f"{where}.algebras: missing object {obj!r}")
        entry = algs_doc[obj]
        basis = _need(entry, "basis", f"{where}.algebras[{obj}]")
        mul = np.asarray(_need(entry, "mul", f"{where}.algebras[{obj}]"), dtype=np.int64)
        unit = _need(entry, "unit", f"{where}.algebras[{obj}]")
        try:
            algebras.append(FiniteAlgebra(base, mul, unit, tuple(basis)))
        except InputError as exc:
            raise InputError(f"{where}.algebras[{obj}]: {exc}") from None
    maps_doc = _need(doc, "maps", where)
    maps = []
    for f in range(cat.n_morphisms):
        name = cat.morphisms[f].name
        if name not in maps_doc:
            raise InputError(f"{where}.maps: missing morphism {name!r}")
        maps.append(_int_matrix(maps_doc[name], f"{where}.maps[{name}]"))
    extra = set(maps_doc) - {m.name for m in cat.morphisms}
    if extra:
        raise InputError(f"{where}.maps: unknown morphisms {sorted(extra)}")
    try:
        R = AlgebraPresheaf(cat, algebras, maps)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None
    return cat, R


def load_presheaf(path: str) -> tuple:
    doc = load_json(path)
    if doc.get("schema") != PRESHEAF_SCHEMA:
        raise InputError(f"{path}: expected schema {PRESHEAF_SCHEMA!r}")
    return presheaf_from_doc(doc, path)


# ---------------------------------------------------------------------------
# topologies


def topology_to_doc(J: GrothendieckTopology) -> dict:
    cat = J.cat
    covers = {}
    for x in range(cat.n_objects):
        covers[cat.objects[x]] = [
            sorted(cat.morphisms[m].name for m in S.members)
            for S in J.covers_at(x)
        ]
    return {
        "schema": TOPOLOGY_SCHEMA,
        "category": {k: v for k, v in category_to_doc(cat).items() if k != "schema"},
        "covers": covers,
    }


def topology_from_doc(doc: dict, where: str = "topology") -> GrothendieckTopology:
    cat = category_from_doc(_need(doc, "category", where), f"{where}.category")
    covers_doc = _need(doc, "covers", where)
    covers = []
    for x, obj in enumerate(cat.objects):
        if obj not in covers_doc:
            raise InputError(f"{where}.covers: missing object {obj!r}")
        sieves = []
        for i, names in enumerate(covers_doc[obj]):
            members = set()
            for name in names:
                try:
                    members.add(cat.morphism_index(name))
                except InputError:
                    raise InputError(
                        f"{where}.covers[{obj}][{i}]: unknown morphism {name!r}"
                    ) from None
            S = Sieve(x, frozenset(members))
            if not is_sieve(cat, S):
                raise InputError(
                    f"{where}.covers[{obj}][{i}]: member set is not a sieve on {obj!r}"
                )
            sieves.append(S)
        covers.append(sieves)
    J = GrothendieckTopology(cat, covers)
    rep = is_topology(cat, J)
    if not rep.ok:
        v = rep.violations[0]
        raise InputError(f"{where}: not a topology ({v.rule} at {v.witness})")
    return J


def load_topology(path: str) -> GrothendieckTopology:
    doc = load_json(path)
    if doc.get("schema") != TOPOLOGY_SCHEMA:
        raise InputError(f"{path}: expected schema {TOPOLOGY_SCHEMA!r}")
    return topology_from_doc(doc, path)


# ---------------------------------------------------------------------------
# module presheaves


def module_to_doc(M: ModulePresheaf) -> dict:
    cat = M.cat
    modules = {}
    for x in range(cat.n_objects):
        entry = {
            "rank": M.ranks[x],
            "action": M.actions[x].tolist(),
            "maps": {},
        }
        for f in cat.morphisms_from(x):
            entry["maps"][cat.morphisms[f].name] = M.maps[f].tolist()
        modules[cat.objects[x]] = entry
    return {"schema": MODULE_SCHEMA, "modules": modules}


def module_from_doc(
    doc: dict, cat: FiniteCategory, R: AlgebraPresheaf, where: str = "module"
) -> ModulePresheaf:
    mods_doc = _need(doc, "modules", where)
    ranks = []
    actions = []
    maps = [None] * cat.n_morphisms
    for x, obj in enumerate(cat.objects):
        if obj not in mods_doc:
            raise InputError(f"{where}.modules: missing object {obj!r}")
        entry = mods_doc[obj]
        rank = int(_need(entry, "rank", f"{where}.modules[{obj}]"))
        ranks.append(rank)
        act = np.asarray(_need(entry, "action", f"{where}.modules[{obj}]"), dtype=np.int64)
        if act.size == 0:
            act = act.reshape(R.algebra(x).rank, rank, rank)
        actions.append(act)
        for name, mat in entry.get("maps", {}).items():
            try:
                f = cat.morphism_index(name)
            except InputError:
                raise InputError(
                    f"{where}.modules[{obj}].maps: unknown morphism {name!r}"
                ) from None
            if maps[f] is not None:
                raise InputError(f"{where}: morphism {name!r} given twice")
            maps[f] = _int_matrix(mat, f"{where}.modules[{obj}].maps[{name}]")
    for f in range(cat.n_morphisms):
        if maps[f] is None:
            raise InputError(
                f"{where}: missing map for morphism {cat.morphisms[f].name!r}"
            )
        want = (ranks[cat.cod(f)], ranks[cat.dom(f)])
        if maps[f].shape != want and maps[f].size == 0:
            maps[f] = maps[f].reshape(want)
    try:
        return ModulePresheaf(cat, R, ranks, maps, actions)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def load_module(path: str, cat: FiniteCategory, R: AlgebraPresheaf) -> ModulePresheaf:
    doc = load_json(path)
    if doc.get("schema") != MODULE_SCHEMA:
        raise InputError(f"{path}: expected schema {MODULE_SCHEMA!r}")
    return module_from_doc(doc, cat, R, path)


# ---------------------------------------------------------------------------
# detection and whole-file validation


def same_category(a: FiniteCategory, b: FiniteCategory) -> bool:
    return (
        a.objects == b.objects
        and tuple((m.name, m.dom, m.cod) for m in a.morphisms)
        == tuple((m.name, m.dom, m.cod) for m in b.morphisms)
        and a.identity == b.identity
        and (a.compose_table == b.compose_table).all()
    )


def detect_schema(doc: dict, where: str) -> str:
    schema = doc.get("schema")
    if schema not in {CATEGORY_SCHEMA, PRESHEAF_SCHEMA, TOPOLOGY_SCHEMA, MODULE_SCHEMA}:
        raise InputError(f"{where}: unknown or missing schema {schema!r}")
    return schema


def validate_file(path: str, context: str | None = None) -> dict:
    """Deep-validate any known file kind; returns a small summary.

    Module files need a presheaf for context; pass its path in context.
    """
    from .algebra import validate_presheaf
    from .fincat import validate_category

    doc = load_json(path)
    schema = detect_schema(doc, path)
    if schema == CATEGORY_SCHEMA:
        cat = category_from_doc(doc, path)
        rep = validate_category(cat)
        if not rep.ok:
            raise InputError(f"{path}: {rep.violations[0].rule}")
        return {"kind": "category", "objects": len(cat.objects), "morphisms": cat.n_morphisms}
    if schema == PRESHEAF_SCHEMA:
        cat, R = presheaf_from_doc(doc, path)
        rep = validate_presheaf(R)
        if not rep.ok:
            raise InputError(f"{path}: {rep.violations[0].rule} at {rep.violations[0].witness}")
        return {
            "kind": "presheaf",
            "objects": len(cat.objects),
            "modulus": R.base.modulus,
            "ranks": [R.algebra(x).rank for x in range(cat.n_objects)],
        }
    if schema == TOPOLOGY_SCHEMA:
        J = topology_from_doc(doc, path)
        return {
            "kind": "topology",
            "covers": [len(J.covers_at(x)) for x in range(J.cat.n_objects)],
        }
    if context is None:
        raise InputError(f"{path}: module files need a presheaf file for context")
    cat, R = load_presheaf(context)
    M = module_from_doc(doc, cat, R, path)
    rep = validate_module_presheaf(M)
    if not rep.ok:
        raise InputError(f"{path}: {rep.violations[0].rule} at {rep.violations[0].witness}")
    return {"kind": "module", "ranks": list(M.ranks)}
