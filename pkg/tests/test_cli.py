import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qgs.cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, main
from qgs.files import save_game, save_state
from qgs.game import GameDefinition, Joint

from conftest import BS, RHO_GES, basis_state


@pytest.fixture
def run(capsys):
    def _run(*argv):
        try:
            code = main([str(a) for a in argv])
        except SystemExit as exc:  # argparse usage errors
            code = exc.code
        out, err = capsys.readouterr()
        return code, out, err
    return _run


@pytest.fixture
def files(tmp_path, run):
    paths = {}
    for name, (e1, e2) in {"g21": (2, 1), "g12": (1, 2), "g31": (3, 1)}.items():
        paths[name] = tmp_path / f"{name}.json"
        assert run("make-game", "--epsilon1", e1, "--epsilon2", e2, "--out", paths[name])[0] == EXIT_OK
    for name, rho in {"ges": RHO_GES, "bs": basis_state(BS), "bb": basis_state(0)}.items():
        paths[name] = tmp_path / f"{name}.json"
        save_state(Joint(rho, (2, 2)), paths[name])
    paths["dir"] = tmp_path
    return paths


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_eigen(run, files):
    code, out, _ = run("eigen", files["g21"])
    assert code == EXIT_OK
    assert "player 1: 4, 2, 0, 0; top: 0.7071|BB> + 0.7071|SS>" in out


def test_eigen_diagonal(run, files):
    path = files["dir"] / "diag.json"
    h = np.diag([1.0, 3.0, 2.0, 4.0])
    save_game(GameDefinition((("B", "S"), ("B", "S")), (h, h)), path)
    code, out, _ = run("eigen", path)
    assert code == EXIT_OK and "player 1: 4, 3, 2, 1; top: 1.0000|SS>" in out


def test_corrupt_file(run, files):
    bad = files["dir"] / "bad.json"
    bad.write_text(json.dumps({"players": 2, "basis": [["B", "S"], ["B", "S"]],
                               "payoff": {"kind": "explicit", "matrices": [[[1, 0]] * 16, [[1, 0]] * 3]}}))
    code, _, err = run("eigen", bad)
    assert code == EXIT_INVALID and "$.payoff.matrices[1]" in err
    code, _, err = run("eigen", files["dir"] / "missing.json")
    assert code == EXIT_INVALID


def test_bad_flags_exit_one(run, files):
    assert run("solve-classical", files["g21"])[0] == EXIT_INVALID  # --beta missing
    assert run("solve-classical", files["g21"], "--beta", "x")[0] == EXIT_INVALID
    assert run("solve-classical", files["g21"], "--beta", -1)[0] == EXIT_INVALID
    assert run("solve-classical", files["g21"], "--beta", 1, "--init", "0.5")[0] == EXIT_INVALID
    assert run("bifurcation", files["g21"], "--beta-min", 3, "--beta-max", 1)[0] == EXIT_INVALID
    assert run("nonsense")[0] == EXIT_INVALID
    assert run("make-game", "--epsilon1", 1, "--epsilon2", 1, "--out", files["dir"] / "x.json")[0] == EXIT_INVALID


def test_solve_classical_coordination(run, files):
    trace = files["dir"] / "trace.csv"
    code, out, _ = run("solve-classical", files["g21"], "--beta", 50, "--init", "0.9,0.9", "--trace", trace)
    assert code == EXIT_OK
    assert "payoffs 2.0, 2.0" in out and "converged yes" in out
    rows = read_csv(trace)
    assert rows[0] == ["step", "p1_b", "p2_b", "payoff1", "payoff2"]
    last = [float(x) for x in rows[-1][1:]]
    assert abs(last[0] - 1) <= 1e-6 and abs(last[1] - 1) <= 1e-6
    assert last[2] == pytest.approx(2, abs=1e-6)


def test_solve_classical_anti_coordination(run, files):
    code, out, _ = run("solve-classical", files["g12"], "--beta", 50, "--init", "0.9,0.1")
    assert code == EXIT_OK
    assert "final p1_b=1 p2_b=" in out and "payoffs 2.0, 2.0" in out


def test_solve_classical_low_beta(run, files):
    code, out, _ = run("solve-classical", files["g21"], "--beta", 1, "--init", "0.05,0.7")
    assert code == EXIT_OK and "final p1_b=0.5 p2_b=0.5" in out


def test_solve_classical_non_convergence(run, files):
    code, out, _ = run("solve-classical", files["g21"], "--beta", 2, "--max-steps", 20)
    assert code == EXIT_NUMERIC and "converged no" in out


def test_trace_csv_is_lossless(run, files):
    trace = files["dir"] / "t.csv"
    run("solve-classical", files["g21"], "--beta", 3, "--init", "0.3,0.35", "--trace", trace)
    from qgs.classical import ClassicalProfile, iterate
    ref = iterate(ClassicalProfile(0.3, 0.35), 3.0, 1.0, game=None)
    rows = read_csv(trace)[1:]
    assert len(rows) == len(ref.steps)
    for row, step in zip(rows, ref.steps):
        assert float(row[1]) == step.p1_b and float(row[2]) == step.p2_b


def test_fixed_points(run, files):
    code, out, _ = run("fixed-points", files["g21"], "--beta", 4)
    assert code == EXIT_OK
    assert "3 fixed point(s)" in out
    assert "p* = 0.5000000000  unstable" in out
    assert out.count("stable") - out.count("unstable") == 2


def test_bifurcation_csv(run, files):
    pos, neg = files["dir"] / "pos.csv", files["dir"] / "neg.csv"
    assert run("bifurcation", files["g21"], "--beta-min", 0, "--beta-max", 5, "--steps", 51, "--out", pos)[0] == EXIT_OK
    assert run("bifurcation", files["g12"], "--beta-min", 0, "--beta-max", 5, "--steps", 51, "--out", neg)[0] == EXIT_OK
    assert pos.read_bytes() == neg.read_bytes()
    rows = read_csv(pos)
    assert rows[0] == ["beta", "root", "stable"]
    counts = {}
    for beta, root, stable in rows[1:]:
        assert stable in ("true", "false") and 0 <= float(root) <= 1
        counts[float(beta)] = counts.get(float(beta), 0) + 1
    assert len(counts) == 51
    assert all(c == (3 if b > 2 + 1e-9 else 1) for b, c in counts.items())


def test_best_response(run, files):
    code, out, _ = run("best-response", files["g21"], "--theta", 0.5236)
    assert code == EXIT_OK and out.strip() == "-0.5236, payoff 2.0"
    code, out, _ = run("best-response", files["g21"], "--theta", math.pi / 6, "--player", 2)
    assert out.strip() == "-0.5236, payoff 2.0"


def test_degenerate_game_exit_one(run, files):
    path = files["dir"] / "deg.json"
    h = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=float)
    save_game(GameDefinition((("B", "S"), ("B", "S")), (h, h)), path)
    code, _, err = run("best-response", path, "--theta", 0.3)
    assert code == EXIT_INVALID and "degenerate" in err
    assert run("solve-quantum", path)[0] == EXIT_INVALID


def test_solve_quantum(run, files):
    code, out, _ = run("solve-quantum", files["g31"], "--samples", 32)
    assert code == EXIT_OK
    assert "is an equilibrium: yes" in out
    dev = float(out.split("max angle deviation ")[1].split()[0])
    assert dev <= 1e-9


def test_solve_ges(run, files):
    code, out, _ = run("solve-ges", files["g21"], "--samples", 20)
    assert code == EXIT_OK
    assert "state: 0.7071|BB> + 0.7071|SS>" in out
    assert "payoffs: 4.0, 4.0" in out
    assert "entangled: yes; marginal purity 0.5, 0.5" in out
    assert "seed 42" in out


def test_seed_from_environment(run, files, monkeypatch):
    monkeypatch.setenv("QGS_SEED", "7")
    _, out, _ = run("solve-ges", files["g21"], "--samples", 5)
    assert "seed 7" in out
    _, out, _ = run("solve-ges", files["g21"], "--samples", 5, "--seed", 9)
    assert "seed 9" in out


def test_check(run, files):
    code, out, _ = run("check", files["g21"], files["bs"])
    assert code == EXIT_OK and out.startswith("not equilibrium, player 1 margin -1.0")
    code, out, _ = run("check", files["g21"], files["bb"])
    assert out.startswith("equilibrium") and "global equilibrium: no" in out
    code, out, _ = run("check", files["g21"], files["ges"])
    assert out.startswith("equilibrium") and "global equilibrium: yes" in out
    assert "entangled: yes" in out


def test_decoherence_gap(run, files):
    code, out, _ = run("decoherence-gap", files["g21"], files["ges"])
    assert code == EXIT_OK
    assert out.splitlines() == ["player 1: gap 2.5", "player 2: gap 2.5"]


def test_state_dim_mismatch(run, files):
    path = files["dir"] / "s3.json"
    save_state(Joint(np.eye(6) / 6, (2, 3)), path)
    assert run("check", files["g21"], path)[0] == EXIT_INVALID


def test_cross_validate(run):
    code, out, _ = run("cross-validate", "--epsilon1", 2, "--epsilon2", 1, "--grid", 20)
    assert code == EXIT_OK and out.startswith("max error") and "<= 1e-09" in out


def test_make_game_explicit(run, files):
    path = files["dir"] / "ex.json"
    run("make-game", "--epsilon1", 2, "--epsilon2", 1, "--out", path, "--explicit")
    data = json.loads(path.read_text())
    assert data["payoff"]["kind"] == "explicit"
    code, out, _ = run("eigen", path)
    assert "player 1: 4, 2, 0, 0" in out


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "qgs", "eigen", str(files["g21"])], capture_output=True, text=True)
    assert res.returncode == 0 and "top: 0.7071|BB> + 0.7071|SS>" in res.stdout
