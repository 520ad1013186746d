from fractions import Fraction

import pytest
import sympy

from app.models.multiplier import ALPHA, ALPHA_TILDE, E_TOKEN, W_PLUS
from app.utils.errors import ConnectionInconsistencyError
from app.utils.voros import (
    ZSeries,
    bernoulli_generating_coefficients,
    bernoulli_numbers,
    connection_ratio,
    difference_equation_residual,
    difference_rhs,
    p_voros_series,
    solve_difference_equation,
    stokes_multiplier_table,
    two_v_minus_u_series,
    v_infinity_series,
    voros_coefficient,
    weber_relation_residual,
    weber_voros_series,
)


def test_bernoulli_numbers():
    assert bernoulli_numbers(5) == [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66)]
    assert bernoulli_generating_coefficients(4) == [1, Fraction(-1, 2), Fraction(1, 12), 0, Fraction(-1, 720)]
    with pytest.raises(ValueError):
        bernoulli_numbers(0)


def test_voros_coefficients():
    assert voros_coefficient(1) == Fraction(1, 24)
    assert voros_coefficient(2) == Fraction(-7, 2880)
    W = p_voros_series(5)
    assert W[1] == Fraction(1, 24)
    assert W[2] == 0
    assert W[3] == Fraction(-7, 2880)


def test_difference_rhs_starts_at_z2():
    rhs = difference_rhs(4)
    assert rhs[1] == 0
    assert rhs[2] == Fraction(-1, 24)


def test_bernoulli_difference_equation():
    assert difference_equation_residual(p_voros_series(20)).is_zero()
    assert solve_difference_equation(20) == p_voros_series(20)
    perturbed = p_voros_series(20) + ZSeries([0, 0, 0, Fraction(1, 1000)], 20)
    assert not difference_equation_residual(perturbed).is_zero()


def test_difference_equation_needs_zero_constant():
    with pytest.raises(ValueError):
        difference_equation_residual(ZSeries([1], 4))


def test_weber_relation():
    assert weber_relation_residual(12).is_zero()
    assert not weber_relation_residual(12, sign=-1).is_zero()


def test_weber_voros_coefficients():
    V = weber_voros_series(5)
    assert V[1] == Fraction(-1, 48)
    assert V[2] == 0
    assert V[3] == Fraction(7, 5760)


def test_weber_relation_detects_wrong_p_voros(monkeypatch):
    corrupted = lambda n_max: ZSeries([0, Fraction(7, 3), 0, 5], n_max)
    monkeypatch.setattr("app.utils.voros.p_voros_series", corrupted)
    assert not weber_relation_residual(12).is_zero()


def test_schlesinger_voros_series():
    assert two_v_minus_u_series(9) == p_voros_series(9)
    assert v_infinity_series(9) * 2 == p_voros_series(9)


def test_zseries_json():
    W = p_voros_series(7)
    assert ZSeries.from_json(W.to_json()) == W


def test_multiplier_tables():
    minus = stokes_multiplier_table("inf", "minus")
    assert minus.alpha_token == ALPHA
    assert set(minus.entries) == {1, 2, 3, 4, 5, 6}
    tau1 = stokes_multiplier_table("tau1", "plus")
    assert tau1.entries[4] == -2 * sympy.sqrt(sympy.pi) * ALPHA_TILDE * W_PLUS
    assert not tau1.entries[4].has(tau1.x_token)
    assert "exp(W)" in tau1.to_strings()["s6"]
    assert "exp(2*I*pi*c*eta)" in tau1.to_strings()["s2"]
    with pytest.raises(ValueError):
        stokes_multiplier_table("inf", "left")


def test_connection_ratio():
    assert connection_ratio("inf") == 1
    assert sympy.simplify(connection_ratio("tau1") - (1 + E_TOKEN)) == 0


def test_connection_ratio_without_jump_is_inconsistent():
    with pytest.raises(ConnectionInconsistencyError):
        connection_ratio("inf", apply_jump=False)


def test_each_jump_rule_is_needed_for_tau1():
    with pytest.raises(ConnectionInconsistencyError):
        connection_ratio("tau1", apply_jump=False)
    without_w = connection_ratio("tau1", jump_w=False)
    assert sympy.simplify(without_w - (1 + E_TOKEN)) != 0
    assert without_w == 1
    assert connection_ratio("inf", jump_w=False) == 1
