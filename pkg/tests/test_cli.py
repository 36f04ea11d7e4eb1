import json
import os

import pytest

from planefix.cli import run

DATA = os.path.join(os.path.dirname(__file__), "data")


def run_json(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = run([*argv, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_fmot(tmp_path):
    code, rep = run_json(tmp_path, "fmot", "--map", "poly:[0,0,1]", "--curve", "circle:0.9", "--x", "hull")
    assert code == 0
    assert rep["result"]["index"] == 1 and rep["result"]["varsum"] == 0
    assert rep["config"]["tol_geom"] > 0 and "tol_land" in rep["config"]


def test_ray(tmp_path):
    code, rep = run_json(tmp_path, "ray", "--map", "poly:[-2,0,1]", "--angle", "0", "--depth", "20")
    assert code == 0
    assert rep["result"]["landing"] == [2.0, 0.0]


def test_malformed_curve(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["variation", "--map", "poly:[0,2]", "--curve", str(bad), "--x", "segment:-1,0,1,0"]) == 2
    assert run(["index", "--curve", "circle:1"]) == 2  # no map
    assert run(["nonsense"]) == 2
    assert run(["ray", "--map", "poly:[0,0,1]", "--angle", "x/y"]) == 2


def test_variation_svg(tmp_path):
    svg = tmp_path / "v.svg"
    code, rep = run_json(tmp_path, "variation", "--map", "poly:[0,2]", "--curve", "arc:0.5,0,180",
                         "--x", "segment:-1,0,1,0")
    assert code == 0 and rep["result"]["total"] == 1 and rep["result"]["oracle"] == 1
    assert run(["render", "--input", str(tmp_path / "report.json"), "--svg", str(svg)]) == 0
    text = svg.read_text()
    assert text.count(">+1<") == 1 and ">-1<" not in text
    assert "stroke-dasharray" in text  # the dashed middle and dash-dot outer rays


def test_render_laminations(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"degree": 2, "classes": []}))
    svg = tmp_path / "e.svg"
    assert run(["render", "--input", str(empty), "--svg", str(svg)]) == 0
    text = svg.read_text()
    assert text.count("<circle") == 1 and "<line" not in text
    assert run(["render", "--input", os.path.join(DATA, "lamination_basilica.json"), "--svg", str(svg)]) == 0
    assert svg.read_text().count("<line") == 8


def test_scramble_fails_with_exit_one(tmp_path):
    code, rep = run_json(tmp_path, "scramble", "--map", "poly:[0,2]", "--x",
                         os.path.join(DATA, "scramble_segment.json"))
    assert code == 1 and rep["status"] == "fails"
    code, rep = run_json(tmp_path, "scramble", "--map", "poly:[0,-2]", "--x",
                         os.path.join(DATA, "scramble_segment.json"))
    assert code == 0 and rep["result"]["fixpt"]["fixed_point"] == [0.0, 0.0]


def test_dendrite_and_lamination(tmp_path):
    code, rep = run_json(tmp_path, "dendrite", "--depth", "2")
    assert code == 0
    code, rep = run_json(tmp_path, "lamination", "--seed", "1/3,2/3", "--degree", "2", "--depth", "2")
    assert code == 0 and len(rep["result"]["lamination"]["classes"]) == 4
    code, _ = run_json(tmp_path, "lamination", "--seed", "0,1/2", "--degree", "2", "--depth", "1")
    assert code == 1


def test_fixed_points(tmp_path):
    code, rep = run_json(tmp_path, "fixed-points", "--map", "poly:[0,0,1]", "--box=-2,2,-2,2")
    assert code == 0
    assert sorted(p["location"][0] for p in rep["result"]["fixed_points"]) == [0.0, 1.0]


@pytest.mark.parametrize("opt", ["--tol-land=-1", "--r0=0"])
def test_bad_tolerances(opt):
    assert run(["ray", "--map", "poly:[0,0,1]", "--angle", "0", opt]) == 2
