import cmath
import math
from fractions import Fraction

import pytest

from app.utils.borel import (
    binet_mu,
    borel_coefficients,
    borel_pade_laplace,
    borel_voros_w,
    numeric_multipliers,
    pade_borel,
    voros_closed_form,
    voros_jump,
    voros_pole_clustering,
)
from app.utils.errors import NumericsError
from app.utils.voros import ZSeries, p_voros_series


def test_borel_coefficients():
    coeffs = borel_coefficients(p_voros_series(5))
    assert float(coeffs[0]) == pytest.approx(1 / 24)
    assert float(coeffs[1]) == 0
    assert float(coeffs[2]) == pytest.approx(-7 / 2880 / 2)


def test_pade_needs_enough_coefficients():
    with pytest.raises(NumericsError):
        pade_borel(p_voros_series(5), 10)


def test_voros_borel_poles_at_two_pi_i():
    poles = voros_pole_clustering([10])[10]
    assert poles[0] == pytest.approx(-2j * math.pi, rel=0.03)
    assert poles[1] == pytest.approx(2j * math.pi, rel=0.03)


def test_constant_series_sums_to_itself():
    assert borel_pade_laplace(ZSeries([Fraction(3, 2)], 6), 2.0) == 1.5


def test_laplace_ray_must_converge():
    with pytest.raises(NumericsError):
        borel_pade_laplace(p_voros_series(21), 3.0, direction=math.pi, order=10)


def test_binet_function_decays():
    assert abs(binet_mu(50.0)) == pytest.approx(1 / (12 * 50.0), rel=1e-3)


def test_borel_sum_matches_binet_closed_form():
    y = 3.0
    assert borel_voros_w(y, order=10) == pytest.approx(voros_closed_form(y), rel=1e-6, abs=1e-8)


@pytest.mark.slow
def test_voros_jump_across_stokes_ray():
    ratio, expected = voros_jump(3j)
    assert ratio == pytest.approx(expected, rel=1e-3)


@pytest.mark.slow
@pytest.mark.parametrize("normalization", ["inf", "tau1"])
def test_numeric_connection_ratio(normalization):
    y = 3j
    _, _, ratio = numeric_multipliers(normalization, y)
    expected = 1.0 if normalization == "inf" else 1 + cmath.exp(2j * math.pi * y)
    assert ratio == pytest.approx(expected, rel=1e-3)
