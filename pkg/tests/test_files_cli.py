"""JSON interchange round-trips, file validation, and the command-line
interface (exit codes, report documents, determinism)."""
import json
import os

import numpy as np
import pytest

from torsite import files
from torsite.algebra import constant_presheaf
from torsite.cli import main
from torsite.errors import InputError
from torsite.fixtures import (
    a2_category,
    c2_monoid_category,
    field_algebra,
    t2_algebra,
    terminal_category,
)
from torsite.modules import ModulePresheaf
from torsite.topology import subcategory_topology, trivial_topology

FIX = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fx(name):
    return os.path.join(FIX, name)


def a2_module(r1, r2, amat):
    cat = a2_category()
    R = constant_presheaf(cat, field_algebra(2))
    maps = [
        np.eye(r1, dtype=np.int64),
        np.eye(r2, dtype=np.int64),
        np.asarray(amat, dtype=np.int64).reshape(r2, r1),
    ]
    actions = [
        np.eye(r1, dtype=np.int64).reshape(1, r1, r1),
        np.eye(r2, dtype=np.int64).reshape(1, r2, r2),
    ]
    return cat, R, ModulePresheaf(cat, R, [r1, r2], maps, actions)


# -- round trips --------------------------------------------------------------


def test_category_round_trip():
    for cat in (terminal_category(), a2_category(), c2_monoid_category()):
        doc = files.category_to_doc(cat)
        back = files.category_from_doc(doc)
        assert files.same_category(cat, back)


def test_category_doc_is_deterministic():
    a = files.dump_json(files.category_to_doc(a2_category()))
    b = files.dump_json(files.category_to_doc(a2_category()))
    assert a == b
    assert a.endswith("\n")


def test_category_doc_omits_identity_compositions():
    doc = files.category_to_doc(a2_category())
    names = {m["name"] for m in doc["morphisms"]}
    assert names == {"id1", "id2", "a"}
    for g, f, gf in doc["compose"]:
        assert not g.startswith("id") and not f.startswith("id")


def test_presheaf_round_trip():
    cat = a2_category()
    R = constant_presheaf(cat, t2_algebra(2))
    doc = files.presheaf_to_doc(cat, R)
    cat2, R2 = files.presheaf_from_doc(doc)
    assert files.same_category(cat, cat2)
    assert R2.base.modulus == 2
    for x in range(cat.n_objects):
        assert R2.algebra(x).basis_names == R.algebra(x).basis_names
        assert (R2.algebra(x).mul == R.algebra(x).mul).all()
    for f in range(cat.n_morphisms):
        assert (R2.map(f) == R.map(f)).all()


def test_topology_round_trip():
    cat = a2_category()
    for J in (trivial_topology(cat), subcategory_topology(cat, [0]), subcategory_topology(cat, [1])):
        doc = files.topology_to_doc(J)
        back = files.topology_from_doc(doc)
        assert files.same_category(cat, back.cat)
        for x in range(cat.n_objects):
            assert {S.members for S in back.covers_at(x)} == {
                S.members for S in J.covers_at(x)
            }


def test_module_round_trip():
    cat, R, M = a2_module(1, 2, [[1], [0]])
    doc = files.module_to_doc(M)
    back = files.module_from_doc(doc, cat, R)
    assert back.ranks == M.ranks
    for f in range(cat.n_morphisms):
        assert (back.maps[f] == M.maps[f]).all()
    for x in range(cat.n_objects):
        assert (back.actions[x] == M.actions[x]).all()


def test_module_doc_stores_maps_under_domain():
    cat, R, M = a2_module(1, 1, [[1]])
    doc = files.module_to_doc(M)
    assert set(doc["modules"]["1"]["maps"]) == {"id1", "a"}
    assert set(doc["modules"]["2"]["maps"]) == {"id2"}


def test_zero_rank_module_round_trip():
    cat, R, M = a2_module(0, 1, [])
    doc = files.module_to_doc(M)
    back = files.module_from_doc(doc, cat, R)
    assert back.ranks == (0, 1)
    assert back.maps[2].shape == (1, 0)


# -- loader errors ------------------------------------------------------------


def test_load_json_missing_file():
    with pytest.raises(InputError, match="file not found"):
        files.load_json(fx("does_not_exist.json"))


def test_load_json_bad_syntax(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{не json")
    with pytest.raises(InputError, match="line 1"):
        files.load_json(str(p))


def test_load_json_non_object(tmp_path):
    p = tmp_path / "arr.json"
    p.write_text("[1, 2]\n")
    with pytest.raises(InputError, match="object"):
        files.load_json(str(p))


def test_wrong_schema_rejected(tmp_path):
    with pytest.raises(InputError, match="schema"):
        files.load_category(fx("a2_f2.json"))
    with pytest.raises(InputError, match="schema"):
        files.load_presheaf(fx("a2.json"))


def test_category_missing_key_location():
    doc = files.category_to_doc(a2_category())
    del doc["identity"]
    with pytest.raises(InputError, match="missing key 'identity'"):
        files.category_from_doc(doc, "here")


def test_presheaf_unknown_morphism_in_maps():
    cat = a2_category()
    doc = files.presheaf_to_doc(cat, constant_presheaf(cat, field_algebra(2)))
    doc["maps"]["ghost"] = [[1]]
    with pytest.raises(InputError, match="unknown morphisms.*ghost"):
        files.presheaf_from_doc(doc)


def test_presheaf_missing_algebra_entry():
    cat = a2_category()
    doc = files.presheaf_to_doc(cat, constant_presheaf(cat, field_algebra(2)))
    del doc["algebras"]["2"]
    with pytest.raises(InputError, match="algebras: missing object '2'"):
        files.presheaf_from_doc(doc)


def test_topology_rejects_non_sieve():
    cat = a2_category()
    doc = files.topology_to_doc(trivial_topology(cat))
    # id2 alone is not closed under precomposition: id2 . a = a is missing
    doc["covers"]["2"].append(["id2"])
    with pytest.raises(InputError, match="not a sieve"):
        files.topology_from_doc(doc)


def test_topology_accepts_generated_sieve_cover():
    cat = a2_category()
    doc = files.topology_to_doc(trivial_topology(cat))
    doc["covers"]["2"].append(["a"])
    J = files.topology_from_doc(doc)
    assert len(J.covers_at(1)) == 2


def test_topology_rejects_non_topology():
    cat = a2_category()
    doc = files.topology_to_doc(trivial_topology(cat))
    # empty sieve on object "2" without also refining at "1": breaks stability/transitivity
    doc["covers"]["2"].append([])
    with pytest.raises(InputError, match="not a topology"):
        files.topology_from_doc(doc)


def test_topology_unknown_morphism_name():
    cat = a2_category()
    doc = files.topology_to_doc(trivial_topology(cat))
    doc["covers"]["1"] = [["id1", "mystery"]]
    with pytest.raises(InputError, match="unknown morphism 'mystery'"):
        files.topology_from_doc(doc)


def test_module_missing_map():
    cat, R, M = a2_module(1, 1, [[1]])
    doc = files.module_to_doc(M)
    del doc["modules"]["1"]["maps"]["a"]
    with pytest.raises(InputError, match="missing map for morphism 'a'"):
        files.module_from_doc(doc, cat, R)


def test_module_duplicate_map():
    cat, R, M = a2_module(1, 1, [[1]])
    doc = files.module_to_doc(M)
    doc["modules"]["2"]["maps"]["a"] = [[1]]
    with pytest.raises(InputError, match="given twice"):
        files.module_from_doc(doc, cat, R)


def test_validate_file_all_fixtures():
    kinds = {
        "terminal.json": "category",
        "a2.json": "category",
        "c2.json": "category",
        "idempotent_monoid.json": "category",
        "terminal_f2.json": "presheaf",
        "terminal_f2xf2.json": "presheaf",
        "a2_f2.json": "presheaf",
        "c2_f2.json": "presheaf",
        "terminal_trivial_topology.json": "topology",
        "a2_trivial_topology.json": "topology",
        "a2_obj1_topology.json": "topology",
        "a2_obj2_topology.json": "topology",
    }
    for name, kind in kinds.items():
        assert files.validate_file(fx(name))["kind"] == kind
    for name in ("a2_p2_module.json", "a2_s1_module.json", "a2_s2_module.json"):
        summary = files.validate_file(fx(name), context=fx("a2_f2.json"))
        assert summary["kind"] == "module"


def test_validate_module_requires_context():
    with pytest.raises(InputError, match="context"):
        files.validate_file(fx("a2_p2_module.json"))


# -- command line -------------------------------------------------------------


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    return code, doc, captured.err


def test_cli_validate(capsys):
    code, doc, err = run_cli(capsys, "validate", fx("a2.json"))
    assert code == 0
    assert doc["ok"] is True and doc["kind"] == "category"
    assert "valid category" in err


def test_cli_validate_module_with_context(capsys):
    code, doc, _ = run_cli(
        capsys, "validate", fx("a2_s1_module.json"), "--context", fx("a2_f2.json")
    )
    assert code == 0
    assert doc["kind"] == "module" and doc["ranks"] == [1, 0]


def test_cli_skew_dimension(capsys):
    code, doc, _ = run_cli(capsys, "skew", fx("a2_f2.json"))
    assert code == 0
    assert doc["dim"] == 3
    assert doc["basis"] == ["1*id1", "1*id2", "1*a"]


def test_cli_topologies_count(capsys):
    code, doc, _ = run_cli(capsys, "topologies", fx("terminal.json"))
    assert code == 0
    assert doc["count"] == 2
    code, doc, _ = run_cli(capsys, "topologies", fx("a2.json"))
    assert code == 0
    assert doc["count"] == 4


def test_cli_gr(capsys):
    code, doc, _ = run_cli(capsys, "gr", fx("a2_f2.json"))
    assert code == 0
    assert doc["hom_ranks"] == {"1->1": 1, "1->2": 1, "2->1": 0, "2->2": 1}


def test_cli_linearize(capsys):
    code, doc, _ = run_cli(
        capsys, "linearize", fx("a2_f2.json"), fx("a2_trivial_topology.json")
    )
    assert code == 0
    assert doc["counts"] == [1, 1]


def test_cli_check_sheaf_yes_no(capsys):
    code, doc, _ = run_cli(
        capsys,
        "check-sheaf",
        fx("a2_f2.json"),
        fx("a2_obj1_topology.json"),
        fx("a2_p2_module.json"),
    )
    assert code == 0 and doc["value"] is True
    code, doc, _ = run_cli(
        capsys,
        "check-sheaf",
        fx("a2_f2.json"),
        fx("a2_obj1_topology.json"),
        fx("a2_s1_module.json"),
    )
    assert code == 1 and doc["value"] is False
    assert doc["witness"]["reason"]


def test_cli_check_torsion_yes_no(capsys):
    code, doc, _ = run_cli(
        capsys,
        "check-torsion",
        fx("a2_f2.json"),
        fx("a2_obj1_topology.json"),
        fx("a2_s2_module.json"),
    )
    assert code == 0 and doc["value"] is True
    code, doc, _ = run_cli(
        capsys,
        "check-torsion",
        fx("a2_f2.json"),
        fx("a2_obj1_topology.json"),
        fx("a2_p2_module.json"),
    )
    assert code == 1 and doc["value"] is False


def test_cli_classify_trivial_site(capsys):
    code, doc, _ = run_cli(
        capsys, "classify", fx("a2_f2.json"), fx("a2_trivial_topology.json")
    )
    assert code == 0 and doc["ok"] is True
    assert doc["counts"] == {
        "universe_members": 13,
        "linear_topologies": 4,
        "hereditary_torsion_pairs": 4,
        "idempotent_ideals": 4,
        "ttf_triples": 4,
        "central_idempotents": 2,
        "split_ttf_triples": 2,
    }
    assert doc["subcategory_objects"] == ["1", "2"]


def test_cli_classify_subcategory_site(capsys):
    code, doc, _ = run_cli(
        capsys, "classify", fx("a2_f2.json"), fx("a2_obj2_topology.json")
    )
    assert code == 0
    assert doc["subcategory_objects"] == ["2"]
    assert doc["counts"]["universe_members"] == 4
    assert doc["counts"]["hereditary_torsion_pairs"] == 2
    assert doc["counts"]["ttf_triples"] == 2
    assert doc["counts"]["split_ttf_triples"] == 2


def test_cli_recollement(capsys):
    code, doc, _ = run_cli(
        capsys, "recollement", fx("a2_f2.json"), "--idempotent", "0,1,0"
    )
    assert code == 0 and doc["ok"] is True
    assert doc["corner_rank"] == 1 and doc["quotient_rank"] == 1
    assert doc["universe_sizes"] == {"middle": 13, "corner": 4, "quotient": 4}
    assert all(doc["checks"].values()) and doc["failures"] == []


def test_cli_recollement_rejects_non_idempotent(capsys):
    code, doc, _ = run_cli(
        capsys, "recollement", fx("a2_f2.json"), "--idempotent", "0,0,1"
    )
    assert code == 2
    assert doc["kind"] == "input"


def test_cli_recollement_wrong_length(capsys):
    code, doc, _ = run_cli(
        capsys, "recollement", fx("a2_f2.json"), "--idempotent", "1,0"
    )
    assert code == 2 and "3 coordinates" in doc["error"]


def test_cli_missing_file_is_input_error(capsys):
    code, doc, _ = run_cli(capsys, "validate", fx("nope.json"))
    assert code == 2
    assert doc["kind"] == "input" and "file not found" in doc["error"]


def test_cli_mismatched_site_categories(capsys):
    code, doc, _ = run_cli(
        capsys,
        "linearize",
        fx("terminal_f2.json"),
        fx("a2_trivial_topology.json"),
    )
    assert code == 2 and "different category" in doc["error"]


def test_cli_budget_exit_code(capsys):
    code, doc, _ = run_cli(
        capsys, "classify", fx("a2_f2.json"), fx("a2_trivial_topology.json"), "--budget", "4"
    )
    assert code == 3 and doc["kind"] == "budget"


def test_cli_output_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, doc, _ = run_cli(
        capsys, "skew", fx("a2_f2.json"), "--output", str(out)
    )
    assert code == 0
    assert json.loads(out.read_text()) == doc


def test_cli_deterministic_output(capsys):
    _, doc1, _ = run_cli(capsys, "classify", fx("a2_f2.json"), fx("a2_trivial_topology.json"))
    _, doc2, _ = run_cli(capsys, "classify", fx("a2_f2.json"), fx("a2_trivial_topology.json"))
    assert doc1 == doc2
    assert files.dump_json(doc1) == files.dump_json(doc2)
