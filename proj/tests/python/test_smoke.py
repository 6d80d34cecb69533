import json
import os
import subprocess

import jsonschema
import pytest

import gascert

CLI = os.environ.get("GASCERT_CLI")
SCHEMA_PATH = os.environ.get(
    "GASCERT_SCHEMA",
    os.path.join(os.path.dirname(__file__), "..", "..", "schemas", "report.schema.json"),
)

with open(SCHEMA_PATH) as f:
    SCHEMA = json.load(f)
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def validate(report):
    VALIDATOR.validate(report)


def cli(*args, cwd=None):
    if not CLI:
        pytest.skip("GASCERT_CLI not set")
    return subprocess.run([CLI, *args], capture_output=True, text=True, cwd=cwd)


def test_schema_is_well_formed():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


def test_expand_linear_neg():
    r = gascert.expand("linear-neg", expansion=1)
    validate(r)
    assert r["coefficients"] == pytest.approx([-6 / 25, 9 / 25], abs=1e-12)
    assert r["slas"]["slas_index"] == 1


def test_analyze_decdec():
    r, code = gascert.run("analyze", map="decdec", params={"b": 1.5}, n=20)
    validate(r)
    assert code == 0
    assert r["verdict"] == "GAS-certified(grid)"
    assert r["embedding"]["verdict"] == "Inconclusive"


def test_errors_raise():
    with pytest.raises(gascert.GascertError) as e:
        gascert.analyze("nonexistent")
    assert "nonexistent" in json.loads(str(e.value))["error"]
    with pytest.raises(gascert.GascertError):
        gascert.run("analyze", map="decdec", colour=1)


def test_evaluate_and_gradient():
    assert gascert.evaluate("u1*exp(b*(1-u2))", 2, [1.0, 1.0], {"b": 0.5}) == pytest.approx(1.0)
    g = gascert.gradient("ricker-delay", {"b": 0.5}, 0)
    assert g == pytest.approx([1.0, -0.5])
    assert "decdec" in gascert.catalogue_names()


def test_python_reports_validate(tmp_path):
    validate(gascert.run("catalogue")[0])
    validate(gascert.envelope("ricker-stocking", params={"xbar": 1.5}, samples=5000))
    validate(gascert.embed("bh-product"))
    validate(gascert.simulate("ricker-stocking", init=[0.2, 0.4]))
    validate(gascert.regions("decdec", n=32, out=str(tmp_path / "r")))


@pytest.mark.parametrize(
    "args",
    [
        ["catalogue"],
        ["expand", "--map", "linear-neg", "--expansion", "1"],
        ["analyze", "--map", "ricker-delay", "--param", "b=2", "--n", "5"],
        ["analyze", "--map", "bx-over-1py", "--n", "10"],
        ["envelope", "--map", "decdec-exp1", "--param", "b=1.5", "--g", "(b+1)/(b*u1+1)", "--samples", "5000"],
        ["embed", "--map", "decdec", "--param", "b=1.5", "--grid", "64"],
        ["simulate", "--map", "ricker-stocking", "--init", "0.2,0.4", "--n", "10"],
    ],
)
def test_cli_reports_validate_and_are_deterministic(args):
    a = cli(*args)
    b = cli(*args)
    assert a.returncode in (0, 2), a.stderr
    assert a.stdout == b.stdout
    validate(json.loads(a.stdout))


def test_cli_regions(tmp_path):
    r = cli("regions", "--map", "down-up-a", "--param", "a=3", "--n", "256", "--out", str(tmp_path / "du"))
    assert r.returncode == 0, r.stderr
    validate(json.loads(r.stdout))
    for suffix in ("_curve_y_eq_F.csv", "_curve_x_eq_F.csv"):
        lines = (tmp_path / ("du" + suffix)).read_text().splitlines()
        assert lines[0] == "x,y"
        assert len(lines) - 1 >= 200


def test_cli_error_envelope():
    r = cli("analyze", "--map", "nonexistent")
    assert r.returncode == 1
    err = json.loads(r.stderr)
    assert set(err) == {"error", "hint"}
    r = cli("analyze", "--map", "decdec", "--spec", "x.json")
    assert r.returncode == 1
    assert "error" in json.loads(r.stderr)
