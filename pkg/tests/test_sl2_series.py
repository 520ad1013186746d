from fractions import Fraction

from app.utils.sl2_series import (
    LocalChart,
    asymptotic_expand_x_infinity,
    homogeneity_table,
    log_u_residual,
    odd_part_residues,
    pii_data,
    q_potential_series,
    residue_at_infinity,
    residue_at_lambda0,
    schlesinger_difference_residual,
    sl2_compat_residual,
    sl2_riccati_residual,
    sl2_riccati_series,
    u_residual,
)


def test_potential_leading_terms(tower):
    lam, nu = pii_data(tower, 0, 3)
    Q = q_potential_series(lam, nu)
    x, l0, s = tower.gen("x"), tower.gen("l0"), tower.gen("s")
    assert Q.coeff(0, 0) == ((x - l0) * s) ** 2
    assert Q.coeff(0, 1).is_zero()


def test_sl2_riccati_solves_equation(tower):
    assert sl2_riccati_residual(tower, 1, 3).is_zero()
    S, _ = sl2_riccati_series(tower, 1, 3)
    assert S.coeff(0, -1) == (tower.gen("x") - tower.gen("l0")) * tower.gen("s")


def test_compatibility_with_pii(tower):
    assert sl2_compat_residual(tower, 1, 3).is_zero()
    assert not sl2_compat_residual(tower, 1, 3, leading_only_a=True).is_zero()


def test_u_and_log_u(tower):
    assert u_residual(tower, 1, 3).is_zero()
    assert log_u_residual(tower, 1, 3).is_zero()
    assert not log_u_residual(tower, 1, 3, include_log_term=False).is_zero()


def test_schlesinger_difference_equation(tower):
    assert schlesinger_difference_residual(tower, 2).is_zero()
    assert not schlesinger_difference_residual(tower, 2, drop_half_term=True).is_zero()


def test_odd_part_has_no_residue_at_lambda0(tower):
    assert all(value.is_zero() for value in odd_part_residues(tower, 1, 3).values())


def test_residues_of_simple_poles(tower):
    x, l0 = tower.gen("x"), tower.gen("l0")
    assert LocalChart(tower, "lambda0").residue((x - l0).inverse()) == 1
    assert residue_at_infinity(x.inverse()) == -1
    S, _ = sl2_riccati_series(tower, 0, 1)
    # S_0 = -(1/2)(1/(x - l0) + ds/dx / s) near l0, where s(l0) = w
    assert residue_at_lambda0(S, 0, 0) == Fraction(-1, 2)


def test_schlesinger_factor_at_infinity(tower):
    S, _ = sl2_riccati_series(tower, 0, 1)
    table = asymptotic_expand_x_infinity(S, 1, sectors=0)
    lead, first = table[(0, -1)], table[(0, 0)]
    assert lead.coeff(-2) == 1
    assert lead.coeff(-1).is_zero()
    assert lead.coeff(0) == tower.gen("t") * Fraction(1, 2)
    assert lead.coeff(1) == tower.gen("c")
    assert first.coeff(1) == -1


def test_homogeneity_of_s(tower):
    S, _ = sl2_riccati_series(tower, 1, 2)
    for (k, ell), degree in homogeneity_table(S).items():
        assert degree == Fraction(1, 3) + Fraction(k, 2) + ell
