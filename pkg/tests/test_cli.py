import csv
import json
import subprocess
import sys

import pytest

from modwalk.cli import run


def out_of(capsys, argv):
    code = run(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_eval_qmark(capsys):
    code, out, _ = out_of(capsys, ["eval", "--fn", "qmark", "--x", "3/7"])
    assert code == 0
    assert out.split() == ["7/16", "7/2^4", "0.4375"]


@pytest.mark.parametrize(
    "fn, x, first",
    [
        ("qmark-oracle", "2/5", "3/8"),
        ("qmark-inverse", "3/8", "2/5"),
        ("chi", "3", "1/8"),
        ("lambda-survival", "-3", "15/16"),
        ("cf", "10/7", "[1;"),
    ],
)
def test_eval_other_functions(capsys, fn, x, first):
    code, out, _ = out_of(capsys, ["eval", "--fn", fn, "--x", x])
    assert code == 0 and out.split()[0] == first


def test_graph_json(capsys):
    code, out, _ = out_of(capsys, ["graph", "--radius", "1", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert len(doc["vertices"]) == 10
    assert doc["vertices"][0] == "1,0,0,1"


def test_graph_dot(capsys):
    code, out, _ = out_of(capsys, ["graph", "--radius", "1"])
    assert out.startswith("graph tiling {")
    assert out.count("label=") == 10


def test_simulate_zero_steps(capsys):
    code, out, _ = out_of(capsys, ["simulate", "--chain", "W", "--steps", "0", "--start", "1/2"])
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows == [["trajectory", "step", "value"], ["0", "0", "1/2"]]


def test_simulate_X_from_infinity(capsys):
    code, out, _ = out_of(capsys, ["simulate", "--chain", "X", "--steps", "3", "--start", "inf", "--seed", "7"])
    rows = list(csv.reader(out.splitlines()))[1:]
    assert [r[1] for r in rows] == ["0", "1", "2", "3"]
    assert rows[0][2] == "inf"


def test_simulate_complex_exact(capsys):
    code, out, _ = out_of(
        capsys, ["simulate", "--chain", "V", "--steps", "2", "--start-im", "6/5", "--mode", "exact"]
    )
    rows = list(csv.reader(out.splitlines()))[1:]
    assert rows[0][2] == "0 6/5"
    assert all("/" in r[2] or " " in r[2] for r in rows)


def test_simulate_float_precision(capsys):
    code, out, _ = out_of(capsys, ["simulate", "--chain", "U", "--steps", "3", "--start", "0", "--mode", "float"])
    values = [r[2] for r in list(csv.reader(out.splitlines()))[1:]]
    assert float(values[-1]) > 0
    assert all(len(v.replace("0.", "").lstrip("0")) <= 17 for v in values)


def test_simulate_stationary_json(capsys):
    code, out, _ = out_of(
        capsys, ["simulate", "--chain", "stationary-W", "--trajectories", "4", "--depth", "6", "--format", "json"]
    )
    doc = json.loads(out)
    assert len(doc["trajectories"]) == 4


def test_simulate_files_are_byte_identical(tmp_path):
    argv = ["simulate", "--chain", "Y", "--steps", "40", "--trajectories", "20", "--seed", "99", "--start", "2/3"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 1 + 20 * 41


def test_reduce(capsys):
    code, out, _ = out_of(capsys, ["reduce", "--point", "2", "2"])
    assert out.splitlines() == ["tile 1,2,0,1", "point 0 2"]
    code, out, _ = out_of(capsys, ["reduce", "--point", "0", "1/2"])
    assert out.splitlines()[0] == "tile 0,-1,1,0"


def test_fourier_csv(capsys):
    code, out, _ = out_of(capsys, ["fourier", "--n-max", "4", "--samples", "2000", "--seed", "1"])
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["n", "re", "im", "modulus"]
    assert rows[1] == ["0", "1", "0", "1"]
    assert len(rows) == 6


def test_enumerate(capsys):
    code, out, _ = out_of(capsys, ["enumerate", "--chain", "W", "--start", "0", "--steps", "1"])
    assert out.splitlines() == ["value,weight", "0,5/9", "1,4/9"]


def test_ks_test_output(capsys):
    code, out, _ = out_of(
        capsys,
        ["ks-test", "--chain", "W", "--steps", "64", "--trajectories", "500", "--seed", "1", "--start", "2/3",
         "--threshold", "0.2"],
    )
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("statistic ") and lines[-1] == "PASS"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--fn", "qmark", "--x", "3/x"],
        ["eval", "--fn", "qmark", "--x", "3/2"],
        ["simulate", "--chain", "W", "--steps", "2"],
        ["simulate", "--chain", "W", "--bogus", "1"],
        ["simulate", "--chain", "Z", "--start", "1/2"],
        ["simulate", "--chain", "W", "--start", "1/2", "--start-im", "1"],
        ["simulate", "--chain", "V", "--start-re", "0.5", "--start-im", "1", "--mode", "exact"],
        ["ks-test", "--chain", "V", "--start-im", "1"],
        ["reduce", "--point", "0", "-1"],
        ["frobnicate"],
        [],
    ],
)
def test_validation_errors_exit_1(capsys, argv):
    code, _, err = out_of(capsys, argv)
    assert code == 1
    assert err


@pytest.mark.parametrize(
    "argv",
    [
        ["graph", "--radius", "40", "--max-vertices", "100"],
        ["enumerate", "--chain", "X", "--start", "0", "--steps", "9"],
    ],
)
def test_resource_errors_exit_2(capsys, argv):
    code, _, err = out_of(capsys, argv)
    assert code == 2 and "resource" in err


def test_module_entry_point():
    p = subprocess.run(
        [sys.executable, "-m", "modwalk", "eval", "--fn", "qmark", "--x", "1/3"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert p.stdout.split()[0] == "1/4"
