import json
from pathlib import Path

import pytest

from netsym.cli import RunConfig, main
from netsym.errors import InvalidConfig

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err

def network_file(tmp_path, data, name="net.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)

def golden(name):
    with open(GOLDEN / name, encoding="utf-8") as f:
        return json.load(f)


def test_closure_of_a_file(capsys, tmp_path):
    code, out, _ = run(capsys, "closure", network_file(tmp_path, {"cells": 3, "maps": [[2, 3, 1]]}))
    assert code == 0
    report = json.loads(out)
    assert report["generated"] == 2
    assert report["is_monoid"]

def test_fundamental_of_running_example(capsys):
    code, out, _ = run(capsys, "fundamental", "running")
    assert code == 0
    report = json.loads(out)
    assert report["table"]["table"] == [[1, 2, 3], [2, 2, 3], [3, 3, 3]]
    assert len(report["conjugation_maps"]) == 3

def test_invalid_network_exits_2(capsys, tmp_path):
    code, out, err = run(capsys, "closure", network_file(tmp_path, {"cells": 2, "maps": [[1, 3]]}))
    assert code == 2
    assert out == ""
    assert json.loads(err)["code"] == "invalid_network"

def test_missing_network_file(capsys, tmp_path):
    code, _, err = run(capsys, "closure", str(tmp_path / "absent.json"))
    assert code == 2
    assert json.loads(err)["code"] == "invalid_network"

def test_classify_running_example(capsys):
    code, out, _ = run(capsys, "classify", "running", "--seed", "1")
    assert code == 0
    report = json.loads(out)
    assert sorted(report["kinds"]) == ["saddle-node", "transcritical", "transcritical"]
    assert report["seed"] == 1

def test_classify_single_summand_without_lift(capsys):
    code, out, _ = run(capsys, "classify", "three_cell/sigma2", "--summand", "1", "--no-lift")
    assert code == 0
    report = json.loads(out)
    assert len(report["classes"]) == 1
    assert "lifted" not in report

def test_classify_instance(capsys):
    code, out, _ = run(capsys, "classify", "three_cell/sigma1", "--expr", "lambda*x1 + x3 - x1^2", "--x0", "0,0,0")
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "generic"
    assert report["classification"]["kind"] == "composite"

def test_computation_error_exits_3(capsys):
    code, _, err = run(capsys, "classify", "three_cell/sigma1", "--expr", "x1 + 1", "--x0", "0,0,0")
    assert code == 3
    assert json.loads(err)["code"] == "not_equilibrium"

def test_syntax_error_is_located(capsys):
    code, _, err = run(capsys, "simulate", "running", "--expr", "x1 +", "--x0", "0,0,0")
    assert code == 2
    diagnostic = json.loads(err)
    assert diagnostic["code"] == "syntax_error"
    assert diagnostic["details"]["line"] == 1

def test_simulate_writes_csv_by_default(capsys):
    code, out, _ = run(capsys, "simulate", "running", "--expr", "x2 - x1", "--x0", "1,2,4", "--t", "0.01", "--dt", "0.005")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t,x1,x2,x3"
    assert len(lines) == 4

def test_simulate_json_to_file(capsys, tmp_path):
    target = tmp_path / "trajectory.json"
    code, out, _ = run(capsys, "simulate", "running", "--expr", "x2 - x1", "--x0", "1,2,4",
                       "--t", "0.01", "--dt", "0.005", "--format", "json", "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))

def test_x0_length_is_checked(capsys):
    code, _, err = run(capsys, "simulate", "running", "--expr", "x2 - x1", "--x0", "1,2")
    assert code == 2
    assert json.loads(err)["code"] == "invalid_config"

def test_verify_passes_on_running_example(capsys):
    code, out, _ = run(capsys, "verify", "running", "--expr", "lambda + x2 - x1^3", "--x0", "0.1,-0.2,0.3",
                       "--lambda", "0.5", "--t", "0.5", "--dt", "0.01")
    assert code == 0
    assert json.loads(out)["passed"]

def test_csv_only_for_tabular_commands(capsys):
    code, _, err = run(capsys, "closure", "running", "--format", "csv")
    assert code == 2
    assert json.loads(err)["code"] == "invalid_config"

def test_enumerate_monoids(capsys):
    code, out, _ = run(capsys, "enumerate-monoids", "2")
    assert code == 0
    report = json.loads(out)
    assert report["count"] == 2
    assert {t["name"] for t in report["tables"]} == {"two_cell/sigma1", "two_cell/sigma2"}

def test_enumeration_bound_exits_2(capsys):
    code, _, err = run(capsys, "enumerate-monoids", "6")
    assert code == 2
    assert json.loads(err)["code"] == "bound_exceeded"

def test_constants_are_bound(capsys):
    code, out, _ = run(capsys, "simulate", "running", "--expr", "k*(x2 - x1)", "--const", "k=2",
                       "--x0", "1,2,4", "--t", "0.005", "--dt", "0.005")
    assert code == 0
    assert out.splitlines()[0] == "t,x1,x2,x3"

def test_continue_regular_point(capsys):
    code, out, _ = run(capsys, "continue", "--format", "json", "--expr", "lambda - x1",
                       "--range", "-0.2", "0.2", "--step", "0.05", "--x0", "0,0,0", "running")
    assert code == 0
    summary = json.loads(out)
    assert summary["branches"] == 1
    assert summary["exponents"] == [None]

def test_run_config_validation():
    with pytest.raises(InvalidConfig):
        RunConfig("closure", dim=0)
    with pytest.raises(InvalidConfig):
        RunConfig("closure", newton_tol=0.0)
    with pytest.raises(InvalidConfig):
        RunConfig("paint")


# --- Usage errors ---

@pytest.mark.parametrize("argv", [
    ["closure"],
    ["paint", "running"],
    [],
    ["closure", "running", "--seed", "abc"],
    ["simulate", "running", "--x0", "0,0,0"],
])
def test_usage_errors_are_json(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    diagnostic = json.loads(err)
    assert diagnostic["code"] == "invalid_config"
    assert diagnostic["details"]["usage"].startswith("usage: netsym")

def test_help_still_exits_cleanly(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    assert "closure" in capsys.readouterr().out


# --- Golden output ---

def test_closure_matches_golden(capsys):
    code, out, _ = run(capsys, "closure", "running")
    assert code == 0
    assert json.loads(out) == golden("closure_running.json")
    assert run(capsys, "closure", "running")[1] == out

def test_decomposition_matches_golden(capsys, tmp_path):
    path = network_file(tmp_path, {"cells": 2, "maps": [[1, 2], [2, 1]]})
    code, out, _ = run(capsys, "decompose", path, "--seed", "3")
    assert code == 0
    assert json.loads(out) == golden("decompose_swap.json")
    assert run(capsys, "decompose", path, "--seed", "3")[1] == out

def test_decomposition_output_is_byte_identical_per_seed(capsys):
    first = run(capsys, "decompose", "three_cell/sigma5", "--seed", "11")
    second = run(capsys, "decompose", "three_cell/sigma5", "--seed", "11")
    assert first[0] == 0
    assert first[1] == second[1]

def test_catalogue_matches_golden(capsys):
    code, out, _ = run(capsys, "catalogue", "2", "--seed", "7")
    assert code == 0
    assert run(capsys, "catalogue", "2", "--seed", "7")[1] == out
    report = json.loads(out)
    summary = {
        "n": report["n"], "dim": report["dim"], "seed": report["seed"], "count": report["count"],
        "monoids": {
            m["name"]: {
                "table": m["table"],
                "kinds": sorted(m["kinds"]),
                "bases": [s["basis"] for s in m["decomposition"]["summands"]],
            }
            for m in report["monoids"]
        },
    }
    assert summary == golden("catalogue_2.json")
