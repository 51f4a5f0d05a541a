import json
import os
import subprocess
import sys

import pytest

from otl.corpus import TAUTOLOGY, diamond, infinite_star, s_block_explicit, s_block_runs
from otl.corpus import singleton_automaton
from otl.io import automaton_to_json, dumps, presentation_to_json


def otl(*args, cwd=None):
    env = dict(os.environ, PYTHONHASHSEED="0")
    res = subprocess.run([sys.executable, "-m", "otl", *args], capture_output=True, text=True,
                         env=env, cwd=cwd, timeout=600)
    return res.returncode, res.stdout, res.stderr


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    files = {
        "single.json": automaton_to_json(singleton_automaton()),
        "s23_a.json": presentation_to_json(s_block_explicit(2, 3)),
        "s23_b.json": presentation_to_json(s_block_runs(2, 3)),
        "countable.json": presentation_to_json(infinite_star(False)),
        "continuum.json": presentation_to_json(infinite_star(True)),
        "diamond.json": presentation_to_json(diamond()),
        "taut.json": TAUTOLOGY,
        "taut2.json": {**TAUTOLOGY, "n": 2},
        "bad_instance.json": {"n": 1, "k": 0, "clauses": []},
    }
    for name, obj in files.items():
        (d / name).write_text(dumps(obj))
    (d / "broken.json").write_text("{")
    return d


def test_card(data):
    assert otl("card", str(data / "single.json"))[:2] == (0, "finite 1\n")
    assert otl("card", str(data / "countable.json"))[1] == "aleph0\n"
    assert otl("card", str(data / "continuum.json"))[1] == "continuum\n"


def test_runs(data):
    assert otl("runs", str(data / "single.json"), "|a")[:2] == (0, "finite 1\n")
    assert otl("runs", str(data / "single.json"), "b|a")[:2] == (0, "finite 0\n")
    assert otl("runs", str(data / "single.json"), "a")[0] == 1


def test_iso(data):
    assert otl("iso", str(data / "s23_a.json"), str(data / "s23_b.json"))[1] == "isomorphic\n"
    code, out, _ = otl("iso", str(data / "countable.json"), str(data / "continuum.json"))
    assert (code, out) == (0, "non-isomorphic\n")
    assert otl("iso", str(data / "diamond.json"), str(data / "s23_a.json"))[0] == 1


def test_mc(data):
    assert otl("mc", str(data / "countable.json"),
               "(exists r (exists^aleph0 x (E r x)))")[1] == "true\n"
    assert otl("mc", str(data / "diamond.json"), "(exists x (E x x))")[1] == "false\n"
    assert otl("mc", str(data / "diamond.json"), "(E x y)")[0] == 1


def test_validate(data):
    code, out, _ = otl("validate", str(data / "diamond.json"))
    assert code == 0 and out.endswith("valid\n")
    code, out, _ = otl("validate", str(data / "diamond.json"), "--height", "2")
    assert code == 1 and "FAILED" in out
    assert otl("validate", str(data / "single.json"))[0] == 0


def test_input_errors(data):
    assert otl("card", str(data / "missing.json"))[0] == 1
    code, _, err = otl("card", str(data / "broken.json"))
    assert code == 1 and "invalid JSON" in err
    assert otl("compile", "--x", "1", "--out", str(data / "o"), str(data / "bad_instance.json"))[0] == 1
    assert otl("compile", "--x", "1", "--out", str(data / "o"), str(data / "taut2.json"))[0] == 1
    assert otl("compile", "--x", "0", "--out", str(data / "o"), str(data / "taut.json"))[0] == 1


def test_budget_exit_code(data, tmp_path):
    code, _, err = otl("unfold", str(data / "diamond.json"), "--height", "2",
                       "--out", str(tmp_path / "f.json"), "--budget", "3")
    assert code == 2 and "budget" in err


def test_unfold_is_deterministic(data, tmp_path):
    digests = []
    for run in ("one", "two"):
        out = tmp_path / run / "forest.json"
        code, stdout, _ = otl("unfold", str(data / "diamond.json"), "--height", "2",
                              "--out", str(out))
        assert code == 0 and "sha256=" in stdout
        manifest = json.loads((tmp_path / run / "manifest.json").read_text())
        assert manifest["command"] == "unfold"
        assert "wall_seconds" in json.loads((tmp_path / run / "timing.json").read_text())
        digests.append((out.read_bytes(), manifest))
    assert digests[0] == digests[1]
    code, out, _ = otl("validate", str(tmp_path / "one" / "forest.json"), "--height", "2")
    assert code == 0


def test_selftest_subset():
    code, out, _ = otl("selftest", "--only", "9,10")
    assert code == 0
    assert "2/2 criteria passed" in out
    assert otl("selftest", "--only", "nine")[0] == 1
