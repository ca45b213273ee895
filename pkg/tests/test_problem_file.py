from __future__ import annotations

import pytest

from commands.problem_file import load_config_text, parse_sections
from core.errors import ConfigError, HypothesisViolation
from numerics.exprcore import evaluate

BASE = """
[problem]
N = 3
k1 = 1
k2 = 2
a1 = 0
a2 = 0
p1 = exp(-t)   # decaimento
p2 = "1"
f1 = t
f2 = t
a = 1
b = 2
"""


def test_loads_problem_and_defaults():
    cfg = load_config_text(BASE)
    assert (cfg.spec.n, cfg.spec.k1, cfg.spec.k2) == (3, 1, 2)
    assert cfg.spec.central_b == 2.0
    assert evaluate(cfg.spec.p2, 7.0, 3) == 1.0
    assert cfg.witness is None
    assert cfg.numerics == {}
    assert cfg.sources["p1"] == "exp(-t)"


def test_witness_and_numerics_sections():
    text = BASE + "\n[witness]\nh1 = t\nphibar1 = t\ncbar1 = 2\nc22 = false\n\n[numerics]\nrmax = 3\ngrid_n = 64\n"
    cfg = load_config_text(text)
    assert cfg.witness.cbar1 == 2.0
    assert cfg.witness.c22 is False
    assert cfg.witness.has_c21
    assert cfg.numerics == {"rmax": 3.0, "grid_n": 64}


def test_missing_required_key():
    text = BASE.replace("k2 = 2\n", "")
    with pytest.raises(ConfigError) as exc:
        load_config_text(text)
    assert "k2" in str(exc.value)


def test_negative_weight_is_rejected():
    with pytest.raises(HypothesisViolation) as exc:
        load_config_text(BASE.replace('p2 = "1"', "p2 = -1"))
    assert exc.value.hypothesis == "(P1)"


def test_zero_weight_is_accepted():
    cfg = load_config_text(BASE.replace("p1 = exp(-t)   # decaimento", "p1 = 0"))
    assert evaluate(cfg.spec.p1, 3.0, 3) == 0.0


def test_bad_expression_reports_line():
    with pytest.raises(ConfigError) as exc:
        load_config_text(BASE.replace("f1 = t", "f1 = 2t"))
    assert exc.value.line == 10
    assert exc.value.key == "f1"


def test_structure_errors():
    with pytest.raises(ConfigError):
        parse_sections("[extra]\nx = 1\n")
    with pytest.raises(ConfigError):
        parse_sections("x = 1\n")
    with pytest.raises(ConfigError) as exc:
        parse_sections("[problem]\nN = 3\nN = 4\n")
    assert exc.value.line == 3
    with pytest.raises(ConfigError):
        load_config_text(BASE + "\n[numerics]\nbogus = 1\n")


def test_invalid_problem_values():
    with pytest.raises(ConfigError):
        load_config_text(BASE.replace("k2 = 2", "k2 = 5"))
    with pytest.raises(ConfigError):
        load_config_text(BASE.replace("N = 3", "N = tres"))
