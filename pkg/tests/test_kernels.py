from __future__ import annotations

import numpy as np
import pytest

from core.errors import ExprEvalError, GridError, SpecError
from numerics.kernels import (
    HessianConstants,
    build_kernel_table,
    constants,
    cumulative_integral,
    fused_weight,
    fused_weight_array,
    m_plus,
    m_plus_profile,
    richardson,
    uniform_grid,
)
from tests.conftest import make_spec


def test_constants_examples():
    hc = constants(3, 1, 1)
    assert (hc.c0, hc.c00) == (1.0, 1.0)
    hc = constants(4, 2, 3)
    assert hc.c0 == pytest.approx(1.5)
    assert hc.c00 == pytest.approx(1.0)
    assert HessianConstants.binom(2, 4) == 3


def test_constants_reject_bad_order():
    with pytest.raises(SpecError):
        constants(3, 4, 1)


def test_cumulative_integral_is_second_order():
    def error(n):
        grid = np.linspace(0.0, 1.0, n + 1)
        return abs(cumulative_integral(grid, grid**2)[-1] - 1.0 / 3.0)

    errors = [error(8 * 2**j) for j in range(6)]
    for coarse, fine in zip(errors, errors[1:]):
        assert coarse / fine == pytest.approx(4.0, abs=0.2)


def test_cumulative_integral_is_second_order_for_smooth_weights():
    def error(n):
        grid = np.linspace(0.0, 1.0, n + 1)
        return abs(cumulative_integral(grid, np.exp(grid))[-1] - (np.e - 1.0))

    assert error(64) / error(128) == pytest.approx(4.0, abs=0.2)


def test_cumulative_integral_validates_grid():
    with pytest.raises(GridError):
        cumulative_integral([0.0, 1.0], [1.0])
    with pytest.raises(GridError):
        cumulative_integral([0.0, 2.0, 1.0], [1.0, 1.0, 1.0])
    assert cumulative_integral([0.0], [3.0]).tolist() == [0.0]


def test_richardson_removes_quadratic_error():
    coarse_grid = np.linspace(0.0, 1.0, 33)
    fine_grid = np.linspace(0.0, 1.0, 65)
    coarse = cumulative_integral(coarse_grid, coarse_grid**2)
    fine = cumulative_integral(fine_grid, fine_grid**2)
    np.testing.assert_allclose(richardson(coarse, fine), coarse_grid**3 / 3.0, atol=1e-14)


def test_fused_weight_constant_weight():
    spec = make_spec()
    table = build_kernel_table(spec, uniform_grid(1.0, 1000))
    assert fused_weight(table, np.ones(1001), 1.0) == pytest.approx(1.0 / 3.0, rel=1e-5)
    assert fused_weight_array(table, 1.0, 1)[0] == 0.0
    with pytest.raises(GridError):
        fused_weight(table, np.ones(1001), 0.12345)


def test_fused_weight_reproduces_closed_form_derivative(quartic_pair):
    # W₁[f₁(r²+1)] = (r⁴+1)′ = 4r³
    grid = uniform_grid(2.0, 2000)
    table = build_kernel_table(quartic_pair.spec, grid)
    w = fused_weight_array(table, np.sqrt(grid**2 + 1.0), 1)
    far = grid >= 0.5
    np.testing.assert_allclose(w[far], 4.0 * grid[far] ** 3, rtol=1e-4)


def test_fused_weight_survives_large_exponent():
    # a₁ = 1 dá E(t) = t; sem reescala e^{E} estoura acima de ~709
    spec = make_spec(a1="1", p1="1")
    grid = uniform_grid(2000.0, 20000)
    table = build_kernel_table(spec, grid)
    w = fused_weight_array(table, 1.0, 1)
    assert np.all(np.isfinite(w))
    # para t grande, W ≈ p = 1
    assert w[-1] == pytest.approx(1.0, rel=1e-2)


def test_m_plus_for_exponential_weight():
    spec = make_spec(p2="exp(-t)")
    table = build_kernel_table(spec, uniform_grid(1024.0, 16384))
    est = m_plus(table, 1)
    assert est.verdict == "Finite"
    assert est.best_value == pytest.approx(1.0, abs=1e-3)


def test_m_plus_diverges_for_constant_weight():
    # W = t/3, então ∫₀ᵗ W = t²/6 cresce sem limite
    table = build_kernel_table(make_spec(), uniform_grid(1024.0, 4096))
    est = m_plus(table, 1)
    assert est.verdict == "Divergent"
    assert est.value_at_rmax == pytest.approx(1024.0**2 / 6.0, rel=1e-3)


def test_zero_weight_gives_zero_kernels():
    spec = make_spec(p1="0", p2="0")
    table = build_kernel_table(spec, uniform_grid(4.0, 64))
    assert np.all(fused_weight_array(table, 5.0, 1) == 0.0)
    assert np.all(m_plus_profile(table, 2) == 0.0)


def test_kernel_table_rejects_non_finite_weight():
    spec = make_spec(p1="1/(t-1)")
    with pytest.raises(ExprEvalError):
        build_kernel_table(spec, uniform_grid(2.0, 4))


def test_kernel_table_rejects_negative_gradient_weight():
    spec = make_spec(a1="-1")
    with pytest.raises(SpecError):
        build_kernel_table(spec, uniform_grid(2.0, 8))
