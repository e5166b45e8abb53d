import json
import subprocess
import sys

import pytest

from arrlab.arrangements import load_arrangement
from arrlab.cli import main
from arrlab.fans import vmf_cloud


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def emitted(tmp_path, capsys):
    paths = {}
    for name, extra in [("origin_plane", []), ("shift_orbit", ["--n", 3]), ("five_atoms", []),
                        ("fan_test", ["--ration", "1,1,1,1", "--j", 2]), ("straight_cut_test", ["--n", 4, "--k", 1, "--j", 1])]:
        path = tmp_path / f"{name}.json"
        code, _, _ = run(capsys, "instances", "emit", name, *extra, "--out", path)
        assert code == 0
        paths[name] = path
    return paths


@pytest.fixture(scope="module")
def cloud_csvs(tmp_path_factory):
    d = tmp_path_factory.mktemp("clouds")
    a, b = d / "a.csv", d / "b.csv"
    vmf_cloud([1, 0, 0], 5, 10_000, 42).to_csv(a)
    vmf_cloud([0, 1, 0.5], 3, 10_000, 43).to_csv(b)
    return a, b


def test_betti(emitted, capsys):
    code, out, _ = run(capsys, "arr", "betti", emitted["five_atoms"], "--field", "f:5")
    assert code == 0 and out.endswith("\n")
    assert json.loads(out) == {"betti": {"0": 1, "2": 9}, "field": "F5"}


def test_blowup(emitted, capsys, tmp_path):
    out_path = tmp_path / "b.json"
    code, _, _ = run(capsys, "arr", "blowup", emitted["origin_plane"], "--choice", "auto", "--out", out_path)
    assert code == 0
    data = json.loads(out_path.read_text())
    assert data["members"][0]["forms"] == [[1, 0, 0, 0], [0, 0, 0, 1]]


def test_poset_dot(emitted, capsys, tmp_path):
    dot = tmp_path / "h.dot"
    code, out, _ = run(capsys, "arr", "poset", emitted["five_atoms"], "--dot", dot)
    assert code == 0 and json.loads(out)["elements"] == 7
    assert dot.read_text().count("->") == 10


def test_check_exit_codes(emitted, capsys):
    code, out, _ = run(capsys, "arr", "check", emitted["fan_test"], "--field", "f:2", "--connectivity", 3)
    assert code == 0 and json.loads(out)["overall"] == "TheoremApplies"
    code, out, _ = run(capsys, "arr", "check", emitted["shift_orbit"], "--field", "f:3", "--connectivity", 2)
    assert code == 2 and json.loads(out)["conditions"]["B"]["status"] == "Violated"


def test_round_trip_through_every_verb(emitted, capsys, tmp_path):
    for name, path in emitted.items():
        before = json.loads(path.read_text())
        A, G = load_arrangement(path)
        assert A.to_json(None if G.is_trivial() else G)["members"] == before["members"]
        assert run(capsys, "arr", "betti", path)[0] == 0
        assert run(capsys, "arr", "poset", path, "--dot", tmp_path / f"{name}.dot")[0] == 0
        assert run(capsys, "arr", "blowup", path)[0] == 0
        assert run(capsys, "arr", "check", path, "--connectivity", 3)[0] in (0, 2)


def test_json_is_sorted(emitted, capsys):
    _, out, _ = run(capsys, "arr", "check", emitted["five_atoms"], "--field", "f:5", "--connectivity", 2)
    data = json.loads(out)
    assert out == json.dumps(data, sort_keys=True, indent=2) + "\n"


@pytest.mark.parametrize("argv", [
    ["arr", "betti", "missing.json"],
    ["arr", "betti", "BAD", "--field", "f:4"],
    ["arr", "check", "BAD", "--connectivity", 2],
    ["arr", "betti", "GOOD", "--unknown-flag"],
    ["instances", "emit", "fan_test"],
    ["instances", "emit", "shift_orbit", "--n", 4],
    ["fan", "solve", "--ration", "1,2"],
    ["fan", "verify", "--fan", "missing.json", "--ration", "1,1", "--measure", "missing.csv"],
])
def test_user_errors_exit_1(argv, tmp_path, capsys, emitted):
    bad = tmp_path / "bad.json"
    bad.write_text('{"ambient_dim": 2, "members": [{"forms": [[1, "x"]]}]}')
    argv = [emitted["five_atoms"] if a == "GOOD" else bad if a == "BAD" else a for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "Traceback" not in err and err.strip()


def test_fan_solve_and_verify(cloud_csvs, capsys, tmp_path):
    a, b = cloud_csvs
    fan_path = tmp_path / "fan.json"
    code, out, _ = run(capsys, "fan", "solve", "--kind", "fan", "--ration", "1,1", "--measure", a, "--measure", b,
                       "--seed", 42, "--out", fan_path)
    assert code == 0 and json.loads(out)["report"]["pass"]
    code, out, _ = run(capsys, "fan", "verify", "--fan", fan_path, "--ration", "1,1", "--measure", a, "--measure", b)
    assert code == 0 and json.loads(out)["pass"]
    code, _, _ = run(capsys, "fan", "verify", "--fan", fan_path, "--ration", "1,1", "--measure", a, "--measure", b,
                     "--tol", 1e-9)
    assert code == 2


def test_fan_solve_best_effort(cloud_csvs, capsys, tmp_path):
    a, _ = cloud_csvs
    atoms = tmp_path / "atoms.csv"
    atoms.write_text("weight,x1,x2,x3\n1,1,0.2,0.1\n1,-0.3,1,0.2\n1,0.1,-0.5,1\n")
    code, out, err = run(capsys, "fan", "solve", "--ration", "1,1", "--measure", a, "--measure", atoms,
                         "--restarts", 2, "--max-evals", 400)
    assert code == 2 and "best effort" in err
    assert json.loads(out)["report"]["pass"] is False


def test_module_entry_point(emitted):
    proc = subprocess.run([sys.executable, "-m", "arrlab", "arr", "betti", str(emitted["five_atoms"]), "--field", "f:5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["betti"] == {"0": 1, "2": 9}
