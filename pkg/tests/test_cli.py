import csv
import io
import json
from importlib import resources

import numpy as np
import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from cwnet.cli import main, parse_theta

SCHEMAS = {p.name: json.loads(p.read_text())
           for p in resources.files("cwnet").joinpath("schemas").iterdir() if p.name.endswith(".json")}
REGISTRY = Registry().with_resources(
    (name, Resource.from_contents(s)) for name, s in SCHEMAS.items())


def validate(doc, name):
    Draft202012Validator(SCHEMAS[name + ".json"], registry=REGISTRY).validate(doc)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def run_json(capsys, schema, *argv):
    code, out = run(capsys, *argv)
    assert code == 0, out
    doc = json.loads(out)
    validate(doc, schema)
    return doc


@pytest.fixture
def files(tmp_path):
    tri = tmp_path / "triangle.cwel"
    tri.write_text("3\n0 1 1.0 0.0\n1 2 1.0 0.0\n0 2 1.0 0.0\n")
    anti = tmp_path / "anti.cwel"
    anti.write_text("3\n0 1 1.0 3.141592653589793\n1 2 1.0 3.141592653589793\n"
                    "0 2 1.0 3.141592653589793\n")
    x0 = tmp_path / "x0.txt"
    x0.write_text("0 1.0 0.0\n")
    return {"tri": tri, "anti": anti, "x0": x0, "dir": tmp_path}


def test_schemas_are_valid():
    for s in SCHEMAS.values():
        Draft202012Validator.check_schema(s)


def test_parse_theta():
    assert parse_theta("2pi/3") == pytest.approx(2 * np.pi / 3)
    assert parse_theta("pi") == pytest.approx(np.pi)
    assert parse_theta("4pi/3") == pytest.approx(4 * np.pi / 3)
    assert parse_theta("1.5") == 1.5


def test_classify_triangle(capsys, files):
    doc = run_json(capsys, "classify", "classify", files["tri"])
    assert doc["class"] == "Balanced"
    assert doc["manifest"]["inputs"][str(files["tri"])]
    doc = run_json(capsys, "classify", "classify", files["anti"], "--method", "brute")
    assert doc["class"] == "Antibalanced"


def test_partition(capsys, files):
    doc = run_json(capsys, "partition", "partition", files["anti"], "--mode", "antibalanced")
    assert doc["mode"] == "antibalanced"


def test_walk(capsys, files):
    doc = run_json(capsys, "walk", "walk", files["tri"], "--x0", files["x0"], "--steps", 20)
    assert doc["steady_state"]["kind"] == "Fixed"
    assert len(doc["sup_norm_history"]) == 21
    doc = run_json(capsys, "walk", "walk", files["anti"], "--x0", "uniform", "--steps", 3)
    assert doc["steady_state"]["kind"] == "OddEvenAlternating"


def test_spectrum(capsys, files):
    doc = run_json(capsys, "spectrum", "spectrum", files["tri"], "--operator", "laplacian", "--matrix")
    np.testing.assert_allclose(doc["eigenvalues"], [3, 3, 0], atol=1e-12)
    gen = files["dir"] / "c3.del"
    assert run(capsys, "gen", "dcycle", 3, "-o", gen)[0] == 0
    doc = run_json(capsys, "spectrum", "spectrum", gen, "--operator", "magnetic", "--theta", "pi")
    assert max(doc["eigenvalues"]) == pytest.approx(2.0)


def test_csbm_cluster_cut_nmi(capsys, tmp_path):
    g, t = tmp_path / "g.cwel", tmp_path / "truth.json"
    doc = run_json(capsys, "csbm", "csbm", "--sizes", "30,30", "--pin", 0.5, "--pout", 0.01,
                   "--l", "2,2", "--seed", 7, "-o", g, "-t", t)
    assert doc["manifest"]["seeds"] == [7]
    validate(json.loads(t.read_text()), "partition_file")
    cut = run_json(capsys, "cut", "cut", g, "--partition", t)
    assert cut["grcut"] >= 0
    out = tmp_path / "cluster.json"
    assert run(capsys, "cluster", g, "--k", 2, "--l", "2,2", "--levelone-magnitude", "-o", out)[0] == 0
    clus = json.loads(out.read_text())
    validate(clus, "cluster")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps(clus["partition"]["level_one"]))
    b.write_text(json.dumps(json.loads(t.read_text())["level_one"]))
    assert run_json(capsys, "nmi", "nmi", a, b)["nmi"] == pytest.approx(1.0)


def test_csbm_stdout_is_edge_list(capsys):
    code, out = run(capsys, "csbm", "--sizes", "12", "--pin", 0.6, "--seed", 1)
    assert code == 0 and out.splitlines()[0] == "12"


def test_magnetic_sweep_c6(capsys, tmp_path):
    c6 = tmp_path / "c6.del"
    run(capsys, "gen", "dcycle", 6, "-o", c6)
    validate(json.loads((tmp_path / "c6.del.manifest.json").read_text()), "manifest")
    code, out = run(capsys, "magnetic", "sweep", c6, "--rmax", 100)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["r", "lambda_min", "lambda_max", "predicted_zero", "predicted_two"]
    assert len(rows) == 100
    zero = [int(r["r"]) for r in rows if abs(float(r["lambda_min"])) <= 1e-12]
    assert zero == [1, 2, 3, 6]
    assert [int(r["r"]) for r in rows if r["predicted_zero"] == "1"] == zero
    doc = run_json(capsys, "sweep", "magnetic", "sweep", c6, "--rmax", 12, "--format", "json")
    assert doc["predicted_zero_r"] == [1, 2, 3, 6]


def test_magnetic_roles_and_cycles(capsys, tmp_path):
    tree = tmp_path / "tree.del"
    run(capsys, "gen", "treecycles", "3,6", "-o", tree)
    doc = run_json(capsys, "cycles", "magnetic", "cycles", tree)
    assert doc["divisor_set"] == [1, 3]
    dag = tmp_path / "dag.del"
    dag.write_text("3\n0 1 1.0\n1 2 1.0\n")
    doc = run_json(capsys, "cycles", "magnetic", "cycles", dag)
    assert doc["theta_zero"]["all"] is True
    c5 = tmp_path / "c5.del"
    run(capsys, "gen", "dcycle", 5, "-o", c5)
    doc = run_json(capsys, "roles", "magnetic", "roles", c5, "--theta", "2pi/5", "--roles", 5)
    assert sorted(doc["labels"]) == [0, 1, 2, 3, 4]


def test_gen_stdout_and_nested(capsys):
    code, out = run(capsys, "gen", "nestedcycles", 6, 2, 0)
    assert code == 0 and len(out.splitlines()) == 8


def test_module_error_exit_one(capsys, tmp_path):
    bad = tmp_path / "bad.cwel"
    bad.write_text("2\n0 0 1.0 0.0\n")
    code, out = run(capsys, "classify", bad)
    assert code == 1
    doc = json.loads(out)
    validate(doc, "error")
    assert doc["error"]["code"] == "InvalidEdge"
    code, out = run(capsys, "classify", tmp_path / "missing.cwel")
    assert code == 1 and json.loads(out)["error"]["code"] == "IOError"
    code, out = run(capsys, "gen", "dcycle", 3, 4)
    assert code == 1 and json.loads(out)["error"]["code"] == "InvalidParameter"


def test_usage_error_exit_two(capsys, files):
    assert main(["classify", str(files["tri"]), "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err
    assert main(["repro", "fig99"]) == 2


def test_repro_fig8_byte_identical(capsys, tmp_path):
    docs = [run_json(capsys, "repro", "repro", "fig8", "--outdir", tmp_path / d, "--rmax", 30)
            for d in ("a", "b")]
    assert len(docs[0]["files"]) == 8
    for fa, fb in zip(*(d["files"] for d in docs)):
        assert fa.endswith(".csv")
        assert open(fa, "rb").read() == open(fb, "rb").read()


def test_repro_grid_quick(capsys, tmp_path):
    doc = run_json(capsys, "repro", "repro", "fig4", "--outdir", tmp_path, "--quick", "--samples", 2)
    rows = list(csv.DictReader(open(doc["files"][0])))
    assert rows and {"nmi_mean", "nmi_std", "samples"} <= set(rows[0])
