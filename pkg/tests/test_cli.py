import json
import subprocess
import sys

import pytest

from btbranches.cli import RunConfig, main
from btbranches.errors import PreconditionError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out) if out.strip() else None


@pytest.mark.parametrize("argv, expected", [(("--p", "2", "5"), 2), (("--p", "5", "1"), "infinity"), (("--p", "5", "5"), 1)])
def test_defect(capsys, argv, expected):
    code, data = run_json(capsys, "defect", *argv)
    assert code == 0 and data["defect_exponent"] == expected


def test_classes_and_hilbert(capsys):
    code, data = run_json(capsys, "classes", "--p", "2")
    assert code == 0 and len(data["classes"]) == 8
    code, data = run_json(capsys, "hilbert", "--p", "3", "3", "-1")
    assert data["symbol"] == -1
    code, data = run_json(capsys, "hilbert", "--p", "2", "--", "-1", "-1")
    assert data["symbol"] == -1


def test_branch_examples(capsys):
    code, data = run_json(capsys, "branch", "--p", "5", "5")
    assert code == 0 and data["agreement"]
    assert data["predicted"]["stem_class"] == "Ramified" and len(data["predicted"]["stem"]) == 2
    assert data["predicted"]["depth"] == 0
    code, data = run_json(capsys, "branch", "--p", "5", "2")
    assert data["predicted"]["stem"] == ["0:0"]
    code, data = run_json(capsys, "branch", "--p", "5", "4")
    assert code == 0 and data["note"] == "alpha is a square; split stem"
    assert data["predicted"]["stem_class"] == "Split"


def test_branch_dot(capsys):
    code, out, _ = run(capsys, "branch", "--p", "5", "--radius", "2", "--format", "dot", "5")
    assert code == 0 and out.startswith("graph") and 'group="stem"' in out
    assert out.count('group="stem"') == 2


def test_pair_examples(capsys):
    code, data = run_json(capsys, "pair", "--p", "5", "5", "5", "0")
    assert code == 0 and data["relative_position"]["kind"] == "intersection"
    assert data["relative_position"]["value"] == "1" and data["agreement"]
    code, data = run_json(capsys, "pair", "--p", "5", "1", "1", "1/5")
    assert code == 0 and data["relative_position"] == {"kind": "distance", "value": "1", "fake_distance": "1"}
    code, data = run_json(capsys, "pair", "--p", "5", "1", "1", "1")
    assert code == 2 and data is None
    code, data = run_json(capsys, "pair", "--p", "5", "2", "5", "0")
    assert code == 0 and data["split"] == "Division" and data["oracle"] is None


def test_embed_examples(capsys):
    code, data = run_json(capsys, "embed", "--p", "3", "Unramified", "0", "1")
    assert code == 0 and data["e"] == [1, 1, 1, 1]
    code, data = run_json(capsys, "embed", "--p", "3", "Unramified", "2", "1")
    assert code == 0 and data["e"] == [3, 2, 2, 2] and data["flags"] == {"integral": True, "consistent": True}
    code, data = run_json(capsys, "embed", "--p", "3", "Unramified", "1", "1")
    assert code == 4 and data["flags"]["integral"] is False
    code, data = run_json(capsys, "embed", "--p", "3", "Unramified", "3", "1")
    assert code == 2


def test_chi(capsys):
    assert run_json(capsys, "chi", "--p", "3", "2", "1", "1")[1]["chi"] == 1
    assert run_json(capsys, "chi", "--p", "2", "2", "1", "1")[1]["chi"] == 0
    assert run(capsys, "chi", "--p", "3", "2", "2", "1")[0] == 2


def test_bad_inputs(capsys):
    assert run(capsys, "defect", "--p", "6", "5")[0] == 2
    assert run(capsys, "branch", "--radius", "9", "5")[0] == 2
    assert run(capsys, "defect", "--format", "dot", "5")[0] == 2
    with pytest.raises(SystemExit):
        main(["defect", "1/0"])
    with pytest.raises(PreconditionError):
        RunConfig(p=1)


def test_oracle_sweep_is_deterministic(capsys):
    a = run_json(capsys, "oracle-sweep", "--p", "3", "--count", "6", "--seed", "4")
    b = run_json(capsys, "oracle-sweep", "--p", "3", "--count", "6", "--seed", "4")
    assert a == b and a[0] == 0 and a[1]["failures"] == []


def test_out_file_and_text(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "embed", "--p", "3", "Ramified", "3", "1", "--out", str(target))
    assert out == "" and json.loads(target.read_text())["params"]["r"] == 3
    code, out, _ = run(capsys, "defect", "--format", "text", "5")
    assert "defect_exponent: 1" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "btbranches", "defect", "--p", "5", "5"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["defect_exponent"] == 1
