from fractions import Fraction

import pytest

from app.utils.errors import PrecisionError
from app.utils.pii_series import (
    first_sector_nu_residual,
    homogeneity_degree,
    one_param_solution,
    pii_residual,
    riccati_difference_residual,
    riccati_residual,
    riccati_series,
    taylor_shift_c,
    verify_backlund_identity,
)
from app.utils.series import EXACT, EtaSeries, Transseries


def test_zero_param_solution_solves_pii(tower, zero_param_series):
    lam, _ = zero_param_series
    assert pii_residual(Transseries.from_series(lam)).is_zero()
    assert lam.coeff(0) == tower.gen("l0")
    assert all(lam.coeff(n).is_zero() for n in (1, 3, 5))


def test_zero_param_homogeneity(zero_param_series):
    lam, nu = zero_param_series
    for n, value in lam.items():
        assert homogeneity_degree(value) == n - Fraction(1, 3)
    for n, value in nu.items():
        assert homogeneity_degree(value) == n - Fraction(2, 3)


@pytest.mark.parametrize("normalization", ["tau1", "inf"])
def test_one_param_solution_solves_pii(tower, normalization):
    lam, nu = one_param_solution(tower, 2, 3, normalization)
    assert pii_residual(lam).is_zero()
    assert (nu - lam.d_dt().shift(1)).is_zero()


def test_one_param_needs_a_sector(tower):
    with pytest.raises(ValueError):
        one_param_solution(tower, 0, 2)


def test_first_sector_leading_terms(tower):
    lam, nu = one_param_solution(tower, 1, 2)
    q = tower.gen("q")
    assert lam.coeff(1, 0) == q.inverse()
    assert nu.coeff(1, 0) == q
    assert first_sector_nu_residual(tower, 4).is_zero()


def test_riccati_series(tower):
    R, R_odd, R_even = riccati_series(tower, 4)
    w = tower.gen("w")
    assert R.coeff(-1) == w
    assert R.coeff(0) == -w.diff("t") / (2 * w)
    assert riccati_residual(tower, R, 4).is_zero()
    assert (R_odd + R_even - R).is_zero()
    assert R_odd.coeff(0).is_zero()


def test_backlund_identity(tower):
    lam_diff, nu_diff = verify_backlund_identity(tower, 4)
    assert lam_diff.is_zero()
    assert nu_diff.is_zero()


def test_riccati_difference_equation(tower):
    assert riccati_difference_residual(tower, 4).is_zero()
    assert not riccati_difference_residual(tower, 4, drop_shift_factor=True).is_zero()


def test_taylor_shift_needs_truncation(tower):
    exact = EtaSeries(tower, {0: tower.gen("c")}, EXACT)
    with pytest.raises(PrecisionError):
        taylor_shift_c(exact)
    shifted = taylor_shift_c(exact, 3)
    assert shifted.coeff(0) == tower.gen("c")
    assert shifted.coeff(1) == -1
