import io
import json
import re
import subprocess
import sys

import pytest

from minred.cli import main, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, _ = call(*argv, "--json")
    return code, json.loads(out)


def test_reduce_form_euclidean():
    code, data = call_json("reduce", "form", "--coeffs", "-2,2,3,127", "--norm", "euclidean")
    assert code == 0
    assert data["value"] == 8266
    assert data["gamma"] == [[1, 4], [0, 1]]
    assert data["form"] == [-2, -22, -77, 43]
    assert set(data) >= {"gamma", "form", "value", "nodes_expanded", "final_bound"}


def test_reduce_form_max():
    code, data = call_json("reduce", "form", "--coeffs", "-2,2,3,127", "--norm", "max")
    assert code == 0 and data["value"] == 58


def test_domain_errors():
    code, out, _ = call("reduce", "form", "--coeffs", "1,0,0")
    assert code == 2
    assert json.loads(out)["error"] == "degree below 3"
    code, data = call_json("reduce", "form", "--coeffs", "1,0,0,0")
    assert code == 2 and "stable" in data["error"]
    code, data = call_json("reduce", "endo", "--num", "1,0,0", "--den", "1,0,0")
    assert code == 2 and data["type"] == "DegenerateModelError"


@pytest.mark.parametrize("argv", [
    [],
    ["reduce"],
    ["reduce", "form"],
    ["reduce", "form", "--coeffs", "1,x,3"],
    ["reduce", "form", "--coeffs", "1,2,3,4", "--norm", "l1"],
    ["reduce", "endo", "--num", "1,0,0"],
    ["reduce", "endo", "--num", "1,0,0", "--den", "0,1"],
    ["reduce", "endo", "--num", "1,0,0", "--den", "0,0,1", "--period", "4"],
    ["covariant", "--coeffs", "1,0,0,-1", "--tol-z", "-1"],
    ["bogus"],
])
def test_usage_errors(argv):
    code, out, err = call(*argv)
    assert code == 1
    assert "usage error" in err


def test_whitespace_in_coefficients():
    code, data = call_json("reduce", "form", "--coeffs", "-2, 2, 3 ,127")
    assert code == 0 and data["value"] == 8266


def test_covariant_command():
    code, data = call_json("covariant", "--coeffs", "-2,2,3,127")
    assert code == 0
    assert data["z"]["t"] == pytest.approx(0.17501, abs=1e-4)
    assert data["z"]["u"] == pytest.approx(3.99543, abs=1e-4)
    assert data["residual"] <= 1e-12
    code, data = call_json("covariant", "--coeffs", "-2,2,3,127", "--tol-z", "1e-6")
    assert code == 0 and data["residual"] <= 1e-6


def test_twelve_significant_digits():
    _, out, _ = call("covariant", "--coeffs", "-2,2,3,127")
    for num in re.findall(r"\d+\.\d+", out):
        assert len(num.replace(".", "").lstrip("0")) <= 12


def test_text_and_json_agree():
    _, text, _ = call("reduce", "form", "--coeffs", "-2,2,3,127")
    _, data = call_json("reduce", "form", "--coeffs", "-2,2,3,127")
    assert f"size = {data['value']}" in text
    assert f"nodes expanded = {data['nodes_expanded']}" in text
    _, text, _ = call("reduced-model", "endo", "--num", "50,795,2120", "--den", "265,0,106")
    _, data = call_json("reduced-model", "endo", "--num", "50,795,2120", "--den", "265,0,106")
    assert f"height = {data['height']}" in text


def test_json_round_trip():
    _, data = call_json("reduce", "form", "--coeffs", "-2,2,3,127", "--norm", "max")
    again = ",".join(str(c) for c in data["form"])
    _, data2 = call_json("reduce", "form", "--coeffs", again, "--norm", "max")
    assert data2["value"] == data["value"]
    _, data = call_json("reduce", "endo", "--num", "50,795,2120", "--den", "265,0,106")
    m = data["model"]
    _, data2 = call_json("reduce", "endo", "--num", ",".join(map(str, m["num"])),
                         "--den", ",".join(map(str, m["den"])))
    assert data2["height"] == data["height"] == 1578
    assert data2["gamma"] == [[1, 0], [0, 1]]


def test_reduce_endo_period():
    code, data = call_json("reduce", "endo", "--num", "50,795,2120", "--den", "265,0,106", "--period", "2")
    assert code == 0 and data["phi"]["m"] == 2 and data["height"] == 1578


def test_minmodel():
    code, data = call_json("minmodel", "endo", "--num", "1,0,0,-36", "--den", "0,0,1,0", "--all-orbits")
    assert code == 0
    assert len(data["representatives"]) == 4
    assert {r["abs_resultant"] for r in data["representatives"]} == {36}
    code, data = call_json("minmodel", "endo", "--num", "2,0,-1", "--den", "0,2,0")
    assert data["representatives"][0]["abs_resultant"] == 2


def test_reduced_model_json():
    code, data = call_json("reduced-model", "endo", "--num", "1,0,0,-36", "--den", "0,0,1,0", "--threads", "2")
    assert code == 0
    assert data["height"] == 4
    assert len(data["orbits"]) == 4
    assert min(o["height"] for o in data["orbits"]) == 4


def test_tree_svg(tmp_path):
    path = tmp_path / "tree.svg"
    code, _, _ = call("reduce", "form", "--coeffs", "-2,2,3,127", "--tree-svg", str(path))
    assert code == 0
    svg = path.read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count('fill="#d22"') == 88


def test_main_entry_point(capsys):
    assert main(["reduce", "form", "--coeffs", "-2,2,3,127", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 8266


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "minred.cli", "reduce", "form", "--coeffs", "1,0,0"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["error"] == "degree below 3"
