import json
from importlib import resources

import jsonschema
import pytest

from slfree.cli import main
from slfree import jsonio
from slfree.expmod import ExpModuleSpec
from slfree.superfree import verify_relations


def write_json(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def schema(name):
    ref = resources.files("slfree") / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text())


def validate(payload, name):
    from referencing import Registry, Resource

    base = resources.files("slfree") / "schemas"
    registry = Registry()
    for f in base.iterdir():
        if f.name.endswith(".schema.json"):
            doc = json.loads(f.read_text())
            registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))
    jsonschema.Draft7Validator(schema(name), registry=registry).validate(payload)


SPEC22 = {"m": 2, "a": ["1", "1"], "k": [2, 2], "S": []}
SPEC11 = {"m": 1, "a": ["1"], "k": [1], "S": []}


def test_realize_rank_one(tmp_path, capsys):
    path = write_json(tmp_path, "spec.json", SPEC11)
    code, out = run(capsys, ["realize", path])
    assert code == 0
    validate(out, "module")
    assert out["ell"] == 1
    assert out["pairs"][0]["A"]["entries"] == [{"coef": "1", "deg": 1}]
    assert out["pairs"][0]["Acomp"]["entries"] == [{"coef": "1", "deg": 0}]


def test_realize_grid(tmp_path, capsys):
    path = write_json(tmp_path, "spec.json", SPEC22)
    code, out = run(capsys, ["realize", path])
    assert code == 0
    validate(out, "module")
    assert out["ell"] == 4 and len(out["pairs"]) == 2
    # round trip through the wire format reproduces the realization
    mod = jsonio.module_from_json(out)
    assert verify_relations(mod).ok


def test_realize_rejects_zero_coefficient(tmp_path, capsys):
    path = write_json(tmp_path, "spec.json", {"m": 1, "a": ["0"], "k": [1], "S": []})
    code = main(["realize", path])
    capsys.readouterr()
    assert code == 2


def test_realize_rejects_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code = main(["realize", str(path)])
    capsys.readouterr()
    assert code == 2


def test_verify_on_realize_output(tmp_path, capsys):
    spec_path = write_json(tmp_path, "spec.json", SPEC22)
    out_path = str(tmp_path / "module.json")
    assert main(["realize", spec_path, "--out", out_path]) == 0
    capsys.readouterr()
    code, report = run(capsys, ["verify", out_path])
    assert code == 0
    validate(report, "verify_report")
    assert report["failed"] == []
    assert report["checked"] == 64


def test_verify_flags_corrupted_module(tmp_path, capsys):
    spec_path = write_json(tmp_path, "spec.json", SPEC11)
    code, module = run(capsys, ["realize", spec_path])
    # swap the mate entry degree: no longer a companion, relations break
    module["pairs"][0]["Acomp"]["entries"][0]["deg"] = 1
    bad_path = write_json(tmp_path, "bad_module.json", module)
    code = main(["verify", bad_path])
    capsys.readouterr()
    assert code == 2  # rejected at companion validation


def test_decompose(tmp_path, capsys):
    path = write_json(tmp_path, "spec.json", SPEC22)
    code, out = run(capsys, ["decompose", path])
    assert code == 0
    validate(out, "decompose_report")
    assert out["s"] == 2 and not out["indecomposable"]
    assert [c["p"] for c in out["classes"]] == [0, 1]
    assert out["classes"][0]["residues"] == [[0, 0], [1, 1]]


def test_endo(tmp_path, capsys):
    path = write_json(tmp_path, "spec.json", SPEC22)
    code, out = run(capsys, ["endo", path, "--degree", "1"])
    assert code == 0
    validate(out, "endo_report")
    assert out == {"dim": 4, "s": 2, "idempotents": 4, "degree": 1}


def test_iso_theorem(tmp_path, capsys):
    s1 = write_json(tmp_path, "s1.json", {"m": 2, "a": ["1", "1"], "k": [2, 1], "S": [1]})
    s2 = write_json(tmp_path, "s2.json", {"m": 2, "a": ["-1/4", "1"], "k": [2, 1], "S": []})
    code, out = run(capsys, ["iso", s1, s2])
    assert code == 0
    validate(out, "iso_verdict")
    assert out["isomorphic"] and out["witness_support"] == [1]
    assert out["method"] == "theorem" and out["conclusive"]


def test_iso_generic(tmp_path, capsys):
    s1 = write_json(tmp_path, "s1.json", {"m": 2, "a": ["1", "1"], "k": [2, 1], "S": [1]})
    s2 = write_json(tmp_path, "s2.json", {"m": 2, "a": ["-1/4", "1"], "k": [2, 1], "S": []})
    code, out = run(capsys, ["iso", s1, s2, "--method", "generic", "--degree", "1"])
    assert code == 0
    validate(out, "iso_verdict")
    assert out["isomorphic"] and out["method"] == "generic"


def test_dual_roundtrip(tmp_path, capsys):
    path = write_json(tmp_path, "spec.json", SPEC22)
    out_path = str(tmp_path / "dual.json")
    assert main(["dual", path, "--out", out_path]) == 0
    capsys.readouterr()
    code, out = run(capsys, ["dual", out_path])
    assert code == 0
    validate(out, "module")
    code2, realized = run(capsys, ["realize", path])
    assert code2 == 0
    assert out == realized  # double dual is the identity on the wire


def test_oracle(tmp_path, capsys):
    path = write_json(tmp_path, "spec.json", SPEC22)
    code, out = run(capsys, ["oracle", path, "--trunc", "10", "--census"])
    assert code == 0
    validate(out, "oracle_report")
    assert out["relations"]["failed"] == []
    assert out["census"]["ok"]


def test_oracle_rejects_small_window(tmp_path, capsys):
    path = write_json(tmp_path, "spec.json", {"m": 2, "a": ["1", "1"], "k": [3, 3], "S": [1]})
    code = main(["oracle", path, "--trunc", "4"])
    capsys.readouterr()
    assert code == 2


def test_classify(tmp_path, capsys):
    specs = [
        {"m": 2, "a": ["1", "1"], "k": [2, 1], "S": []},
        {"m": 2, "a": ["-1/4", "1"], "k": [2, 1], "S": [1]},
        {"m": 2, "a": ["2", "1"], "k": [2, 1], "S": []},
    ]
    path = write_json(tmp_path, "specs.json", specs)
    code, out = run(capsys, ["classify", path])
    assert code == 0
    validate(out, "classify_report")
    assert out["classes"] == [[0, 1], [2]]
    assert all(c["S"] == [] for c in out["canonical"])


def test_byte_identical_output(tmp_path, capsys):
    path = write_json(tmp_path, "spec.json", SPEC22)
    out1 = str(tmp_path / "a.json")
    out2 = str(tmp_path / "b.json")
    assert main(["endo", path, "--degree", "2", "--out", out1]) == 0
    assert main(["endo", path, "--degree", "2", "--out", out2]) == 0
    capsys.readouterr()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_env_override(tmp_path, capsys, monkeypatch):
    path = write_json(tmp_path, "spec.json", SPEC22)
    monkeypatch.setenv("SLFREE_DEGREE", "0")
    code, out = run(capsys, ["endo", path])
    assert out["degree"] == 0 and out["dim"] == 2
    monkeypatch.setenv("SLFREE_OUT", str(tmp_path / "env_out.json"))
    assert main(["endo", path]) == 0
    capsys.readouterr()
    assert (tmp_path / "env_out.json").exists()


def test_spec_json_roundtrip():
    spec = ExpModuleSpec(2, ("2", "-3/2"), (2, 3), frozenset({1}))
    payload = jsonio.spec_to_json(spec)
    validate(payload, "spec")
    assert jsonio.spec_from_json(payload) == spec
