from __future__ import annotations

import os
from pathlib import Path

import pytest

from commands.problem_file import LoadedConfig, load_config
from numerics.exprcore import parse
from numerics.iteration import ProblemSpec

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def make_spec(
    p1: str = "1",
    p2: str = "1",
    f1: str = "t",
    f2: str = "t",
    a1: str = "0",
    a2: str = "0",
    n: int = 3,
    k1: int = 1,
    k2: int = 1,
    a: float = 1.0,
    b: float = 1.0,
) -> ProblemSpec:
    return ProblemSpec(
        n=n, k1=k1, k2=k2,
        a1=parse(a1), a2=parse(a2), p1=parse(p1), p2=parse(p2), f1=parse(f1), f2=parse(f2),
        central_a=a, central_b=b,
    )


@pytest.fixture
def quartic_pair() -> LoadedConfig:
    return load_config(DATA_DIR / "quartic_pair.cfg")


@pytest.fixture
def bounded_exp() -> LoadedConfig:
    return load_config(DATA_DIR / "bounded_exp.cfg")


@pytest.fixture
def bounded_thm2() -> LoadedConfig:
    return load_config(DATA_DIR / "bounded_thm2.cfg")


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    # padrões do ambiente não vazam para os testes
    for key in [k for k in os.environ if k.startswith("HESSIAN_")]:
        monkeypatch.delenv(key, raising=False)
