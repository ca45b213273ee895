from __future__ import annotations

import csv

import pytest

import app
from commands.result import EXIT_FAULT, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_VIOLATION
from tests.conftest import DATA_DIR

QUARTIC = str(DATA_DIR / "quartic_pair.cfg")
BOUNDED_EXP = str(DATA_DIR / "bounded_exp.cfg")
BOUNDED_THM2 = str(DATA_DIR / "bounded_thm2.cfg")


def _rows(path):
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.reader(f))


def _write_cfg(tmp_path, body: str) -> str:
    path = tmp_path / "problem.cfg"
    path.write_text(body, encoding="utf-8")
    return str(path)


PROBLEM = """[problem]
N = 3
k1 = 1
k2 = 1
a1 = 0
a2 = 0
p1 = {p1}
p2 = {p2}
f1 = {f1}
f2 = {f2}
a = 1
b = 1
"""


def test_verify_closed_form_pair(tmp_path, capsys):
    code = app.main(["verify", QUARTIC, "--u1", "t^4+1", "--u2", "t^2+1", "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    rows = _rows(tmp_path / "residual.csv")
    assert rows[0] == ["r", "res1", "res2"]
    assert len(rows) == 1 + 257
    assert max(abs(float(r[1])) for r in rows[1:]) < 1e-6
    assert max(abs(float(r[2])) for r in rows[1:]) < 1e-6
    assert "sup|res1|" in capsys.readouterr().out


def test_verify_warns_about_central_values(tmp_path, capsys):
    code = app.main(["verify", QUARTIC, "--u1", "t^4+2", "--u2", "t^2+1", "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    assert "difere de" in capsys.readouterr().out


def test_solve_is_deterministic(tmp_path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = app.main(["solve", BOUNDED_EXP, "--rmax", "1", "--grid-n", "32", "--refine-cap", "1",
                         "--out-dir", str(out)])
        assert code == EXIT_OK
        outputs.append(((out / "solution.csv").read_bytes(), (out / "solution.svg").read_bytes()))
    assert outputs[0] == outputs[1]
    header = outputs[0][0].decode("utf-8").splitlines()[0]
    assert header == "r,u1,u2,du1,du2"


def test_solve_blow_up_exits_with_violation(tmp_path):
    cfg = _write_cfg(tmp_path, PROBLEM.format(p1="100", p2="100", f1="t^2", f2="t^2"))
    code = app.main(["solve", cfg, "--rmax", "10", "--out-dir", str(tmp_path / "out")])
    assert code == EXIT_VIOLATION
    rows = _rows(tmp_path / "out" / "divergence.csv")
    assert rows[0] == ["radius", "iteration", "component", "grid_n", "rmax"]


def test_solve_iteration_budget_keeps_partial_output(tmp_path):
    code = app.main(["solve", BOUNDED_EXP, "--max-iter", "1", "--tol", "1e-14", "--grid-n", "16",
                     "--out-dir", str(tmp_path)])
    assert code == EXIT_FAULT
    assert (tmp_path / "solution.csv").exists()


def test_missing_key_is_a_fault(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, PROBLEM.format(p1="1", p2="1", f1="t", f2="t").replace("k2 = 1\n", ""))
    assert app.main(["solve", cfg, "--out-dir", str(tmp_path)]) == EXIT_FAULT
    assert "k2" in capsys.readouterr().err


def test_negative_weight_is_a_violation(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, PROBLEM.format(p1="-1", p2="1", f1="t", f2="t"))
    assert app.main(["classify", cfg, "--out-dir", str(tmp_path)]) == EXIT_VIOLATION
    assert "(P1)" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert app.main(["solve", str(tmp_path / "nope.cfg")]) == EXIT_FAULT


def test_hypotheses_command(tmp_path):
    assert app.main(["hypotheses", BOUNDED_EXP, "--out-dir", str(tmp_path / "clean")]) == EXIT_OK
    assert _rows(tmp_path / "clean" / "violations.csv") == [["hypothesis", "message", "t", "w", "lhs", "rhs"]]

    assert app.main(["hypotheses", QUARTIC, "--out-dir", str(tmp_path / "quartic_pair")]) == EXIT_VIOLATION
    rows = _rows(tmp_path / "quartic_pair" / "violations.csv")
    assert rows[1][0] == "(P1)"


def test_classify_inconclusive_budget(tmp_path):
    code = app.main(["classify", BOUNDED_EXP, "--limit-budget", "4", "--out-dir", str(tmp_path)])
    assert code == EXIT_INCONCLUSIVE
    rows = {r[0]: r for r in _rows(tmp_path / "report.csv")}
    assert rows["verdict"][2] == "Inconclusive"


@pytest.mark.slow
def test_classify_bounded_with_sandwich(tmp_path, capsys):
    code = app.main(["classify", BOUNDED_THM2, "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    rows = {r[0]: r for r in _rows(tmp_path / "report.csv")}
    assert rows["verdict"][2].startswith("Thm2-i")
    assert rows["H12(inf)"][2] == "Finite"
    assert (tmp_path / "sandwich.csv").exists()
    assert "sanduíche" in capsys.readouterr().out
