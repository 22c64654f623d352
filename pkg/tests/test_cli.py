import io
import json
import random

import pytest

from boolvalued import BooleanAlgebra, MorphismWitness, Signature, name_from_function, point
from boolvalued import serialize as ser
from boolvalued.cli import COMMANDS, run
from boolvalued.functions import FunctionSpaceStructure
from boolvalued.generators import random_function
from cases import COMPLEX, COMPLEX_POOL, function_space_cases


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, _ = call(*argv, "--json")
    return code, json.loads(out)


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def model(tmp_path):
    data = {"algebra": {"atoms": ["a", "b"]},
            "signature": {"relations": {"R": 1}, "functions": {"c": 0}},
            "domain": ["t", "s"],
            "eq": {"t,s": ["a"], "s,t": ["a"]},
            "rel": {"R": {"t": ["a", "b"], "s": ["a"]}},
            "fun": {"c": {"t": ["a", "b"], "s": ["a"]}}}
    return write(tmp_path, "m.json", data)


@pytest.fixture
def fs_model(tmp_path):
    S = next(S for label, S in function_space_cases(seeds=1)
             if label.startswith("complex/atoms=2/carrier=2"))
    assert isinstance(S, FunctionSpaceStructure)
    return write(tmp_path, "fs.json", ser.structure_to_json(S))


def test_eval_prints_atom_set(model):
    code, out, _ = call("eval", "--model", model, "--formula", "E x . x = c")
    assert code == 0 and out.strip().splitlines()[0] == "{a,b}"
    code, data = call_json("eval", "--model", model, "--formula", "x = y",
                           "--valuation", "x=t,y=s")
    assert code == 0 and data["value"] == ["a"]
    assert data["cmd"] == "eval" and data["seed"] == 0 and data["checks"] == []


def test_check_axioms_and_soundness(model):
    code, data = call_json("check-axioms", "--model", model)
    assert code == 0 and len(data["checks"]) == 7
    assert all(c["status"] == "pass" for c in data["checks"])
    assert call("soundness", "--model", model)[0] == 0


def test_failing_axioms_exit_1(tmp_path):
    bad = write(tmp_path, "bad.json", {"algebra": {"atoms": ["a", "b"]}, "domain": ["t", "s"],
                                       "eq": {"t,s": ["a"]}})
    code, data = call_json("check-axioms", "--model", bad)
    assert code == 1
    assert any(c["status"] == "fail" and c["name"] == "(ii) symmetry" for c in data["checks"])


def test_quotient(model):
    code, data = call_json("quotient", "--model", model, "--ultrafilter", "a")
    assert code == 0 and data["quotient"]["domain"] == ["t"]
    code, data = call_json("quotient", "--model", model, "--ultrafilter", "b")
    assert data["quotient"]["domain"] == ["t", "s"]


def test_los_sweep_default_example():
    code, data = call_json("los-sweep", "--atoms", "3", "--domain", "3", "--depth", "2")
    assert code == 0 and data["mismatches"] == 0 and data["structures"] == 1
    code, data = call_json("los-sweep", "--atoms", "2", "--domain", "2", "--depth", "2",
                           "--scalar")
    assert code == 0


def test_morphism_identity(model, tmp_path):
    S = ser.structure_from_json(json.load(open(model)))
    w = write(tmp_path, "w.json", ser.witness_to_json(MorphismWitness.identity(S)))
    code, data = call_json("morphism", "--source", model, "--target", model, "--witness", w,
                           "--expect", "isomorphism")
    assert code == 0 and data["classification"] == "isomorphism"
    code, _, _ = call("morphism", "--source", model, "--target", model, "--witness", w,
                      "--expect", "embedding")
    assert code == 1


def test_ro_complete(tmp_path):
    P = write(tmp_path, "p.json", {"elements": ["a", "b", "r"], "leq": [["a", "r"], ["b", "r"]]})
    code, data = call_json("ro-complete", "--poset", P)
    assert code == 0 and data["atoms"] == [["a"], ["b"]]


def test_lift_mix_and_names(tmp_path):
    fs = write(tmp_path, "f.json", [{"a": [0, 0], "b": [1, 0]}, {"a": [0, 0], "b": [0, 0]}])
    diag = write(tmp_path, "d.json", {"prim": "eq", "args": [0, 1]})
    frame = ["--atom-names", "a,b", "--mode", "complex-rational"]
    code, data = call_json("lift", *frame, "--code", diag, "--functions", fs)
    assert code == 0 and data["value"] == ["a"]
    add = write(tmp_path, "add.json", {"prim": "add", "args": [0, 1, 2]})
    code, data = call_json("lift", *frame, "--code", add, "--functions", fs, "--graph")
    assert code == 0 and data["function"] == {"a": ["0", "0"], "b": ["1", "0"]}
    anti = write(tmp_path, "anti.json", [["a"]])
    one = write(tmp_path, "one.json", [{"a": [5, 0], "b": [5, 0]}])
    code, data = call_json("mix", *frame, "--antichain", anti, "--functions", one,
                           "--default", "[0, 0]")
    assert code == 0 and data["function"] == {"a": ["5", "0"], "b": ["0", "0"]}

    f = write(tmp_path, "f1.json", {"a": [0, 0], "b": [1, 0]})
    code, data = call_json("name-of", *frame, "--function", f)
    assert code == 0 and data["name"]["assign"]["0"] == ["a"]
    name = write(tmp_path, "n.json", data["name"])
    cands = write(tmp_path, "c.json", [[0, 0], [1, 0]])
    code, data = call_json("realize", *frame, "--name", name, "--candidates", cands)
    assert code == 0 and data["function"] == {"a": ["0", "0"], "b": ["1", "0"]}
    assert call("check-name", *frame, "--name", name)[0] == 0
    unit = write(tmp_path, "u.json", {"basic": 0})
    code, data = call_json("rb-lift", *frame, "--code", unit, "--names", name)
    assert code == 0 and data["value"] == ["a"]
    code, data = call_json("rb-lift", *frame, "--code", diag, "--functions", fs)
    assert code == 0 and data["value"] == ["a"]
    code, _, _ = call("quotient-equiv", *frame, "--carrier", fs, "--ultrafilter", "b")
    assert code == 0


def test_unrealizable_name_is_input_error(tmp_path):
    frame = ["--atom-names", "a,b", "--mode", "complex-rational"]
    f = write(tmp_path, "f1.json", {"a": [0, 0], "b": [0, 0]})
    _, data = call_json("name-of", *frame, "--function", f)
    name = write(tmp_path, "n.json", data["name"])
    cands = write(tmp_path, "c.json", [[5, 0]])
    code, data = call_json("realize", *frame, "--name", name, "--candidates", cands)
    assert code == 2 and "unrealizable" in data["error"]


def test_germ_and_find_witness(fs_model):
    code, data = call_json("germ", "--model", fs_model, "--ultrafilter", "a")
    assert code == 0 and all(c["status"] == "pass" for c in data["checks"])
    code, data = call_json("find-witness", "--model", fs_model, "--formula", "E x . R(x)")
    assert code == 0 and data["data"]["exact"]


def test_elementarity_spotcheck():
    code, data = call_json("elementarity-spotcheck", "--points", "3", "--atoms", "2",
                           "--sentences", "50", "--seed", "4")
    assert code == 0 and data["seed"] == 4
    assert data["data"]["mismatches"] == 0
    assert "not a test of partial elementarity" in data["notes"][0]


def test_reports_are_reproducible():
    a = call("elementarity-spotcheck", "--sentences", "20", "--seed", "7", "--json")
    b = call("elementarity-spotcheck", "--sentences", "20", "--seed", "7", "--json")
    assert a == b


def test_usage_errors_exit_2(model):
    assert call("frobnicate")[0] == 2
    assert call("eval", "--model", model)[0] == 2
    code, data = call_json("eval", "--model", "/nonexistent.json", "--formula", "x = x")
    assert code == 2 and "error" in data
    code, _, err = call("eval", "--model", model, "--formula", "R(x,x)", "--valuation", "x=t")
    assert code == 2 and err.startswith("error:")
    assert call("lift", "--mode", "complex-rational", "--code", model, "--functions", model)[0] == 2


def test_every_command_is_wired():
    for cmd in COMMANDS:
        code, out, err = call(cmd, "--help")
        assert code == 0, cmd
