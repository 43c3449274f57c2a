import json
import subprocess
import sys

import pytest

from mmaware.cli import run
from mmaware.harness.fixtures import fixture_path


def fx(name):
    return str(fixture_path(name))


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_mmax_reports_witness(capsys):
    code, out, _ = call(capsys, "check", "--notion", "mmax", "--alpha", "1", "--instance", fx("identical_efx_not_mmax.json"),
                        "--allocation", fx("identical_efx_not_mmax_efx_alloc.json"), "--json")
    assert code == 1
    doc = json.loads(out)
    wit = doc["agents"][0]["witness"]
    assert wit["good"] == 7 and wit["mms"] == "6/5"
    assert sorted(g for p in wit["partition"] for g in p) == [2, 3, 4, 5, 6]


def test_check_satisfied_exit_zero(capsys):
    code, out, _ = call(capsys, "check", "--notion", "efx", "--instance", fx("identical_efx_not_mmax.json"),
                        "--allocation", fx("identical_efx_not_mmax_efx_alloc.json"), "--json")
    doc = json.loads(out)
    assert doc["agents"][0]["satisfied"]
    assert code == (0 if doc["satisfied"] else 1)


def test_solve_matching(capsys):
    code, out, _ = call(capsys, "solve", "--algo", "matching", "--instance", fx("two_agents_crossed.json"), "--json", "--trace")
    assert code == 0
    doc = json.loads(out)
    assert doc["allocation"]["bundles"] == [[1], [2]]
    assert doc["guarantee"] == "MMAX_exact"
    assert doc["trace"][0]["L"] == [1, 2]


def test_mms_value(capsys):
    code, out, _ = call(capsys, "mms", "--instance", fx("identical_mma_not_mms.json"), "--agent", "1", "--k", "4")
    assert code == 0
    assert out.splitlines()[0] == "1/2"
    code, out, _ = call(capsys, "mms", "--instance", fx("identical_mma_not_mms.json"), "--agent", "1", "--k", "3",
                        "--goods", "1,2,3,4", "--json")
    assert json.loads(out)["value"] == "2/5"


def test_leximin_and_minimax(capsys):
    code, out, _ = call(capsys, "leximin", "--instance", fx("ef1_gap_n3.json"), "--agent", "1", "--json")
    assert code == 0
    assert json.loads(out)["value_vector"] == [3, 3, 3, 4]
    code, out, _ = call(capsys, "minimax", "--instance", fx("identical_mma_not_mms.json"), "--agent", "1", "--k", "3",
                        "--goods", "2,3,4,5,6,7,8", "--json")
    assert json.loads(out)["value"] == "3/5"


def test_search_exit_codes(capsys):
    code, out, _ = call(capsys, "search", "--instance", fx("unit_goods_n2_k2.json"), "--notion", "mma", "--json")
    assert code == 1 and json.loads(out)["exists"] is False
    code, out, _ = call(capsys, "search", "--instance", fx("unit_goods_n2_k2.json"), "--notion", "mmax", "--json")
    assert code == 0 and json.loads(out)["allocation"] is not None


def test_usage_errors(capsys, tmp_path):
    assert call(capsys, "mms", "--instance", fx("identical_mma_not_mms.json"))[0] == 2
    assert call(capsys, "mms", "--instance", str(tmp_path / "missing.json"), "--agent", "1")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "m": 1, "valuations": [{"type": "additive", "values": ["x"]}]}')
    code, _, err = call(capsys, "mms", "--instance", str(bad), "--agent", "1")
    assert code == 2 and "valuations[0].values[0]" in err
    assert call(capsys, "check", "--notion", "bogus")[0] == 2
    assert call(capsys, "gen", "--n", "2", "--m", "3")[0] == 2
    assert call(capsys, "verify", "--claim", "mma_implies_mms_binary")[0] == 2
    assert call(capsys, "verify", "--claim", "nope", "--seed", "0")[0] == 2


def test_budget_exit_code(capsys):
    code, _, err = call(capsys, "mms", "--instance", fx("four_agents_mma1_not_mms.json"), "--agent", "1", "--max-nodes", "5")
    assert code == 3 and "budget" in err


def test_gen_is_deterministic(capsys):
    args = ("gen", "--seed", "9", "--class", "submodular-table", "--n", "2", "--m", "4")
    _, first, _ = call(capsys, *args)
    _, second, _ = call(capsys, *args)
    assert first == second and json.loads(first)["n"] == 2


def test_verify_and_examples(capsys):
    code, out, _ = call(capsys, "verify", "--claim", "mma_implies_mms_binary", "--seed", "0", "--trials", "8", "--json")
    assert code == 0 and json.loads(out)["claims"][0]["status"] == "pass"
    code, out, _ = call(capsys, "verify", "--claim", "half_mms_implies_half_mma1", "--seed", "0", "--trials", "8", "--json")
    assert code == 1
    code, out, _ = call(capsys, "examples", "--json")
    assert "four_agents_mma1_not_mms" in {e["id"] for e in json.loads(out)["examples"]}
    code, out, _ = call(capsys, "examples", "--dump", "identical_efx_not_mmax")
    assert out == fixture_path("identical_efx_not_mmax.json").read_text()
    code, out, _ = call(capsys, "examples", "--dump", "identical_efx_not_mmax", "--allocation-name", "efx")
    assert json.loads(out) == {"bundles": [[1], [2, 4], [3, 5, 6, 7]]}


@pytest.mark.parametrize("cls,n,m,algo", [
    ("additive", 3, 7, "matching"), ("additive", 4, 9, "matching"), ("additive", 3, 3, "matching"),
    ("subadditive-table", 3, 5, "matching"), ("submodular-table", 2, 5, "matching"),
    ("additive", 3, 8, "three-agents"),
])
def test_solve_output_passes_its_checks(capsys, tmp_path, cls, n, m, algo):
    for seed in range(6):
        _, text, _ = call(capsys, "gen", "--seed", str(seed), "--class", cls, "--n", str(n), "--m", str(m), "--json")
        inst = tmp_path / f"inst{seed}.json"
        inst.write_text(text)
        code, out, _ = call(capsys, "solve", "--algo", algo, "--instance", str(inst), "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["checks"]
        alloc = tmp_path / f"alloc{seed}.json"
        alloc.write_text(json.dumps(doc["allocation"]))
        for spec in doc["checks"]:
            code, out, _ = call(capsys, "check", "--notion", spec["notion"], "--alpha", str(spec["alpha"]),
                                "--instance", str(inst), "--allocation", str(alloc), "--json")
            assert code == 0, (seed, spec, out)


def test_identical_leximin_round_trip(capsys, tmp_path):
    from mmaware.harness.generators import TrialConfig, generate_instance
    from mmaware.model import Instance, serialize_instance

    v = generate_instance(TrialConfig("strictly-increasing-subadditive-table", 1, 5, seed=2), 0).valuations[0]
    inst = tmp_path / "same.json"
    inst.write_text(serialize_instance(Instance(3, 5, [v] * 3)))
    code, out, _ = call(capsys, "solve", "--algo", "identical-leximin", "--instance", str(inst), "--json")
    doc = json.loads(out)
    assert code == 0 and {"notion": "mmax", "alpha": 1} in doc["checks"]
    code, _, _ = call(capsys, "solve", "--algo", "identical-leximin", "--instance", fx("two_agents_crossed.json"))
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mmaware", "mms", "--instance", fx("two_agents_crossed.json"),
                           "--agent", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "1"
