import json

import numpy as np

from exactsdp import cli, docio
from exactsdp.gallery import build_case, overlap_disks
from exactsdp.model import GeoCop
from exactsdp.symmat import SymMat


def write_problem(tmp_path, problem, name="prob.json", options=None):
    path = tmp_path / name
    path.write_text(docio.serialize(docio.problem_doc(problem, options)))
    return str(path)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_pipeline_certified_exit_zero(tmp_path, capsys):
    path = write_problem(tmp_path, build_case("ex6.1").problem)
    code, out, _ = run(["pipeline", "--input", path, "--tol", "1e-9"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["exactness"] == "certified_exact"
    assert abs(float(doc["value"]) + 0.8660254037844386) <= 1e-6


def test_certify_not_certified_exit_two(tmp_path, capsys):
    prob = GeoCop(n=3, Q=SymMat.diag([1.0, -1.0, 0.0]), H=SymMat.identity(3),
                  bset=overlap_disks())
    path = write_problem(tmp_path, prob)
    code, out, _ = run(["certify", "--input", path], capsys)
    assert code == 2
    doc = json.loads(out)
    assert doc["certification"]["overall"] == "not_certified"


def test_certify_inconclusive_exit_three(tmp_path, capsys):
    # engineered pair whose best certificate margin falls in the open band
    # between the certify and refute thresholds
    a = SymMat.diag([1.0, -1.0, 0.0])
    b = SymMat.diag([-1.0, 1.0 - 2e-7, 1.0])
    prob = GeoCop(n=3, Q=SymMat.identity(3), H=SymMat.identity(3),
                  bset=__import__("exactsdp").constraint_set(3, [a, b]))
    path = write_problem(tmp_path, prob)
    code, out, _ = run(["certify", "--input", path], capsys)
    assert code == 3


def test_missing_field_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "Q": {"upper": ["1","0","1"]}}')
    code, _, err = run(["certify", "--input", str(bad)], capsys)
    assert code == 1
    assert "$.H" in err


def test_solve_and_out_file(tmp_path, capsys):
    path = write_problem(tmp_path, build_case("ex6.1-reduced").problem)
    out_path = tmp_path / "result.json"
    code, out, _ = run(["solve", "--input", path, "--tol", "1e-9",
                        "--out", str(out_path)], capsys)
    assert code == 0 and out == ""
    doc = json.loads(out_path.read_text())
    assert doc["sdp"]["status"] == "optimal"
    assert abs(float(doc["sdp"]["value"]) + 0.8660254037844386) <= 1e-6


def test_oracle_command(tmp_path, capsys):
    path = write_problem(tmp_path, build_case("ex6.1-reduced").problem)
    code, out, _ = run(["oracle", "--input", path, "--samples", "40000",
                        "--seed", "1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert abs(float(doc["oracle"]["value"]) + 0.8660254037844386) <= 1e-6


def test_reduce_command(tmp_path, capsys):
    path = write_problem(tmp_path, build_case("ex6.1").problem)
    code, out, _ = run(["reduce", "--input", path], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["reduction"]["reduced_n"] == 2


def test_gallery_single_case(tmp_path, capsys):
    code, out, _ = run(["gallery", "--id", "ex6.1-reduced"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["cases"][0]["passed"]


def test_plot_command_writes_files(tmp_path, capsys):
    prob = GeoCop(n=3, Q=SymMat.diag([1.0, -1.0, 0.0]), H=SymMat.identity(3),
                  bset=build_case("fig2").problem.bset)
    path = write_problem(tmp_path, prob)
    base = str(tmp_path / "fig2")
    code, out, _ = run(["plot", "--input", path, "--out-base", base,
                        "--resolution", "160", "--box=-2.5,2.5,-2.5,2.5"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert (tmp_path / "fig2.ppm").exists() and (tmp_path / "fig2.svg").exists()
    frac = float(doc["plot"]["area_fraction"])
    assert abs(frac - np.pi / 25.0) <= 0.05
