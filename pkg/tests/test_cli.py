import json
import os

from endochain.cli import main
from endochain import ringio


DATA = os.path.join(os.path.dirname(__file__), "..", "data")


def ring_path(name):
    return os.path.join(DATA, "rings", name + ".json")


def run_cli(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr().out
    return status, json.loads(out)


def test_ring_report(capsys):
    status, rep = run_cli(capsys, "ring", "--input", ring_path("semigroup_1"))
    assert status == 0
    assert rep["multiplicity"] == 1 and rep["is_dvr_product"]


def test_ring_round_trip(capsys):
    status, rep = run_cli(capsys, "ring", "--input", ring_path("tacnode"))
    assert status == 0
    ring1 = ringio.ring_from_json(ringio.load_json(ring_path("tacnode")))
    ring2 = ringio.ring_from_json(rep["definition"])
    assert ring1.key() == ring2.key()


def test_chain_2_5(capsys):
    status, rep = run_cli(capsys, "chain", "--input", ring_path("semigroup_2_5"))
    assert status == 0
    assert rep["n"] == 2 and rep["multiplicity"] == 2 and rep["delta"] == 2
    assert rep["normalization_check"]


def test_gldim_2_3(capsys):
    status, rep = run_cli(capsys, "gldim", "--ring", ring_path("semigroup_2_3"))
    assert status == 0
    assert rep["gldim"] == 2 and rep["bound_chain_depth_plus_one"] == 2
    assert rep["projectivization_check"]


def test_gldim_env_pd_cap(capsys, monkeypatch):
    monkeypatch.setenv("ENDOCHAIN_PD_CAP", "7")
    status, rep = run_cli(capsys, "gldim", "--ring", ring_path("semigroup_1"))
    assert status == 0 and rep["gldim"] == 1


def test_resolve_worked_example(capsys):
    status, rep = run_cli(
        capsys,
        "resolve",
        "--ring",
        ring_path("semigroup_3_4"),
        "--module",
        os.path.join(DATA, "modules", "j_over_3_4.json"),
    )
    assert status == 0
    assert rep["length"] == 1
    assert rep["terms"][0]["decomposition"] == ["S1", "S1", "S2"]
    assert rep["terms"][1]["decomposition"] == ["S2", "S2"]
    assert all(rep["certificates"]["hom_exact"].values())


def test_double_check_flags(capsys):
    status, rep = run_cli(
        capsys, "chain", "--input", ring_path("node"), "--double-check"
    )
    assert status == 0 and rep["double_check"] == "ok"
    status, rep = run_cli(
        capsys, "ring", "--input", ring_path("semigroup_2_7"), "--double-check"
    )
    assert status == 0 and rep["double_check"] == "ok"


def test_schema_error_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    status, rep = run_cli(capsys, "ring", "--input", str(bad))
    assert status == 2
    assert rep["code"] == "SchemaError"


def test_engine_error_exit_1(capsys, tmp_path):
    diag = tmp_path / "diagonal.json"
    diag.write_text(
        json.dumps(
            {
                "field": {"kind": "rational"},
                "branches": 2,
                "generators": [[[[1, "1"]], [[1, "1"]]]],
            }
        )
    )
    status, rep = run_cli(capsys, "ring", "--input", str(diag))
    assert status == 1
    assert rep["code"] == "NoFiniteConductor"


def test_missing_file_exit_2(capsys):
    status, rep = run_cli(capsys, "ring", "--input", "/nonexistent/ring.json")
    assert status == 2


def test_fcmt_via_cli(capsys, tmp_path):
    # MCM list for the cusp: R and E
    mods = {
        "modules": [
            {"ambient_rank": [1], "generators": [[[[[0, "1"]]]], [[[[2, "1"]]]], [[[[3, "1"]]]]]},
            {"ambient_rank": [1], "generators": [[[[[0, "1"]]]], [[[[1, "1"]]]]]},
        ]
    }
    mf = tmp_path / "mcm.json"
    mf.write_text(json.dumps(mods))
    status, rep = run_cli(
        capsys, "gldim", "--ring", ring_path("semigroup_2_3"), "--mcm", str(mf)
    )
    assert status == 0
    assert rep["gldim"] == 2
    assert rep["assumptions"]


def test_verify_quick_suite(capsys):
    status, rep = run_cli(
        capsys, "verify", "--suite", "chain", "--seed", "3"
    )
    assert status == 0
    assert rep["all_passed"]


def test_text_output_mode(capsys):
    status = main(["--output", "text", "ring", "--input", ring_path("semigroup_1")])
    out = capsys.readouterr().out
    assert status == 0
    assert "multiplicity: 1" in out


def test_verify_all_exit_contract(capsys):
    # reduced case count keeps this quick; exit 0 is the shipped contract
    status, rep = run_cli(
        capsys, "verify", "--suite", "all", "--seed", "11", "--cases", "24"
    )
    assert status == 0 and rep["all_passed"]
    assert {c["name"] for c in rep["checks"]} == {
        "lemma_hom_agreement",
        "chain_invariants",
        "resolver_suite",
        "endo_suite",
    }
