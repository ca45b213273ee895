from __future__ import annotations

from math import comb

import numpy as np
import pytest

from core.errors import GridError
from numerics.exprcore import parse
from numerics.hessian import (
    eigenvalues_radial,
    pde_residual,
    principal_minor_sum,
    profile_from_expr,
    profile_from_values,
    s_k,
    s_k_array,
)
from numerics.kernels import uniform_grid
from tests.conftest import make_spec


@pytest.mark.parametrize("n,k", [(3, 1), (3, 2), (3, 3), (5, 2), (6, 4)])
def test_s_k_matches_principal_minor_sum(n, k):
    rng = np.random.default_rng(7)
    grid = np.concatenate([[0.0], np.sort(rng.uniform(0.1, 3.0, 6))])
    profile = profile_from_expr(parse("t^4/4 + t^2 + exp(t^2)"), grid, n)
    for i in range(1, len(grid)):
        lam = eigenvalues_radial(profile, i, n)
        expected = principal_minor_sum(lam, k)
        got = s_k(profile.dxi[i], profile.ddxi[i], grid[i], k, n)
        assert got == pytest.approx(expected, rel=1e-12)


def test_s_k_at_origin():
    assert s_k(0.0, 2.0, 0.0, 2, 4) == comb(4, 2) * 2.0**2


@pytest.mark.parametrize("n", range(1, 9))
def test_quadratic_profile_gives_binomial(n):
    # ξ = r²/2 tem todos os autovalores iguais a 1
    for k in range(1, n + 1):
        for r in (0.0, 0.25, 1.0, 7.5):
            assert s_k(r, 1.0, r, k, n) == pytest.approx(comb(n, k), abs=1e-12)


def test_s_k_array_matches_minor_sums_on_random_profiles():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(3, 9))
        r = rng.uniform(0.05, 5.0, 8)
        dxi = rng.uniform(0.0, 3.0, 8)
        ddxi = rng.uniform(0.0, 3.0, 8)
        for k in range(1, n + 1):
            got = s_k_array(dxi, ddxi, r, k, n)
            expected = [
                principal_minor_sum(np.array([ddxi[i]] + [dxi[i] / r[i]] * (n - 1)), k)
                for i in range(len(r))
            ]
            np.testing.assert_allclose(got, expected, rtol=1e-12, atol=1e-12)


def test_profile_requires_zero_slope_at_origin():
    with pytest.raises(GridError):
        profile_from_expr(parse("t"), uniform_grid(1.0, 8), 3)
    with pytest.raises(GridError):
        profile_from_expr(parse("t^2"), np.array([0.5, 1.0]), 3)


def test_quartic_pair_has_zero_residual(quartic_pair):
    grid = uniform_grid(5.0, 256)
    u1 = profile_from_expr(parse("t^4 + 1"), grid, 3)
    u2 = profile_from_expr(parse("t^2 + 1"), grid, 3)
    res1, res2 = pde_residual(quartic_pair.spec, u1, u2)
    assert np.max(np.abs(res1)) < 1e-6
    assert np.max(np.abs(res2)) < 1e-6


def test_finite_difference_residual_is_small(quartic_pair):
    grid = uniform_grid(5.0, 2000)
    u1 = profile_from_values(grid, grid**4 + 1)
    u2 = profile_from_values(grid, grid**2 + 1)
    res1, res2 = pde_residual(quartic_pair.spec, u1, u2)
    assert np.max(np.abs(res1)) < 1.0
    assert np.max(np.abs(res2)) < 1e-3


def test_wrong_candidate_has_visible_residual(quartic_pair):
    grid = uniform_grid(2.0, 64)
    u1 = profile_from_expr(parse("t^2 + 1"), grid, 3)
    u2 = profile_from_expr(parse("t^2 + 1"), grid, 3)
    res1, _ = pde_residual(quartic_pair.spec, u1, u2)
    assert np.max(np.abs(res1)) > 1.0


def test_quadratic_candidate_balances_constant_source():
    # N=4, k₁=2: S₂(r²/2) = C(4,2) = 6 = p₁·f₁(u₂) com u₂ ≡ 2
    spec = make_spec(n=4, k1=2, p1="6", f1="t/2", p2="0", a=1.0, b=2.0)
    grid = uniform_grid(3.0, 64)
    u1 = profile_from_expr(parse("t^2/2"), grid, 4)
    u2 = profile_from_expr(parse("2"), grid, 4)
    res1, res2 = pde_residual(spec, u1, u2)
    np.testing.assert_allclose(res1, 0.0, atol=1e-12)
    np.testing.assert_allclose(res2, 0.0, atol=1e-12)
