import json
import subprocess
import sys

import numpy as np
import pytest

from gowers.cli import dumps, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return path

    return _write


def test_norm_examples(capsys, write):
    code, out = run(capsys, "norm", "--d", 2, "--input", write("f.json", [1, 0, 0, 0]))
    assert code == 0
    assert out["value"] == pytest.approx(2**-1.5, abs=1e-15)
    code, out = run(capsys, "norm", "--d", 1, "--input", write("ones.json", [1, 1, 1, 1]))
    assert code == 0 and out["value"] == 1.0


def test_norm_reads_group_function_objects(capsys, write):
    path = write("f.json", {"orders": [2, 2], "values": [1, 0, 0, 0]})
    code, out = run(capsys, "norm", "--d", 2, "--input", path, "--method", "inductive")
    assert code == 0 and out["value"] == pytest.approx(2**-1.5, abs=1e-15)
    assert run(capsys, "norm", "--group", "4", "--input", path)[0] == 2


def test_invalid_inputs_exit_2(capsys, tmp_path, write):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "norm", "--input", bad)[0] == 2
    assert run(capsys, "norm", "--input", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "norm", "--d", 7, "--input", write("f.json", [1, 2]))[0] == 2
    assert run(capsys, "no-such-command")[0] == 2
    assert run(capsys, "decompose-thk", "--d", 1, "--k", 0, "--delta", 0.3, "--input", write("g.json", [1, 2]))[0] == 2


def test_spectral_commands_agree(capsys, write):
    path = write("f.json", [1, 0, 0, 0])
    _, u2 = run(capsys, "u2", "--input", path)
    assert u2["value"] == pytest.approx(u2["direct"], abs=1e-15)
    _, a2 = run(capsys, "a2", "--input", path, "--certificate")
    assert a2["value"] == pytest.approx(1.0) and a2["certificate_value"] == pytest.approx(1.0)
    assert len(a2["certificate"]["terms"]) == 4
    _, dual = run(capsys, "dual-fn", "--input", path)
    assert dual["function"]["values"] == pytest.approx([1 / 16, 0, 0, 0])
    _, ud = run(capsys, "u2-dual", "--input", write("D.json", dual["function"]))
    assert ud["value"] == pytest.approx(2**-4.5, abs=1e-15)


def test_dual_norm_and_decompositions(capsys, write, tmp_path):
    rng = np.random.default_rng(3)
    g = rng.standard_normal(6)
    g /= np.sum(np.abs(np.fft.fft(g) / 6) ** (4 / 3)) ** 0.75  # unit dual norm
    path = write("g.json", g.tolist())
    code, dn = run(capsys, "dual-norm", "--input", path)
    _, exact = run(capsys, "u2-dual", "--input", path)
    assert code == 0 and dn["value"] == pytest.approx(exact["value"], abs=1e-8)
    assert exact["value"] == pytest.approx(1.0)
    csv_path = tmp_path / "thk.csv"
    code, thk = run(capsys, "decompose-thk", "--k", 2, "--delta", 0.3, "--input", path, "--csv", csv_path)
    assert code == 0 and thk["residual"] <= 1e-5
    assert csv_path.read_text().splitlines()[0] == "index,f,h"
    code, borne = run(capsys, "decompose-borne", "--delta", 0.3, "--input", path)
    assert code == 0 and borne["bounds"]["h_l1"] <= 0.3 + 1e-6


def test_regularize_with_history_csv(capsys, write, tmp_path):
    rng = np.random.default_rng(1)
    atoms = {"0": rng.uniform(-1, 1, 8).tolist(), "1": rng.uniform(-1, 1, 8).tolist()}
    path = write("F.json", {"orders": [8], "d": 1, "terms": [{"coefficient": 0.5, "atoms": atoms}]})
    csv_path = tmp_path / "history.csv"
    code, out = run(capsys, "regularize", "--delta", 0.05, "--input", path, "--csv", csv_path)
    assert code == 0 and out["defect"] <= 0.05
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("round,cells,defect") and len(lines) == len(out["history"]) + 1


def test_regularize_failure_exits_1(capsys, write):
    rng = np.random.default_rng(1)
    atoms = {"0": rng.uniform(-1, 1, 8).tolist(), "1": rng.uniform(-1, 1, 8).tolist()}
    path = write("F.json", {"orders": [8], "d": 1, "terms": [{"coefficient": 1.0, "atoms": atoms}]})
    assert run(capsys, "regularize", "--delta", 0.01, "--cell-cap", 2, "--input", path)[0] == 1


def test_main_decompose(capsys, write, tmp_path):
    rng = np.random.default_rng(2)
    path = write("fam.json", {"orders": [8], "rows": rng.uniform(-1, 1, (3, 8)).tolist()})
    out_path = tmp_path / "main.json"
    assert main(["main-decompose", "--d", "1", "--delta", "0.3", "--input", str(path), "--out", str(out_path)]) == 0
    out = json.loads(out_path.read_text())
    assert out["ok"] and out["verification"]["items"]["rho_norm"]["value"] <= 0.3
    assert run(capsys, "main-decompose", "--d", 2, "--delta", 0.3, "--input", path)[0] == 2


@pytest.mark.parametrize("kind,extra", [
    ("indicator", ["--group", "4", "--subset", "0,2"]),
    ("poly", ["--group", "8", "--coeffs", "0,0,1"]),
    ("random", ["--group", "2,3", "--seed", "4", "--smoothness", "1"]),
])
def test_gen(capsys, kind, extra):
    code, out = run(capsys, "gen", kind, *extra)
    assert code == 0 and "values" in out
    assert run(capsys, "gen", kind, *extra)[1] == out


def test_gen_torus(capsys):
    code, out = run(capsys, "gen", "torus", "--n", 8, "--alpha", "3/8", "--cos", "0.2,0.5", "--sin", "0,0.4")
    assert code == 0 and out["u2_dual"] <= out["l1_bound"] + 1e-10


def test_verify_suite_fault_exits_1(capsys):
    code, out = run(capsys, "verify-suite", "--only", "duality_identity,parseval", "--inject-fault", "dual-function")
    assert code == 1 and out["failed"] == ["duality_identity"]
    code, out = run(capsys, "verify-suite", "--only", "duality_identity,parseval")
    assert code == 0 and out["ok"]


def test_verify_suite_quick_is_byte_identical(tmp_path):
    outputs = []
    for threads in (1, 1, 3):
        path = tmp_path / f"report{len(outputs)}.json"
        cmd = [sys.executable, "-m", "gowers.cli", "verify-suite", "--level", "quick", "--seed", "7",
               "--threads", str(threads), "--out", str(path)]
        assert subprocess.run(cmd, check=False).returncode == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_dumps_is_round_trip_exact():
    x = 0.1 + 0.2
    assert json.loads(dumps({"b": x, "a": float("inf")})) == {"a": "inf", "b": x}
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')
