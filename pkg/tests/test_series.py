from fractions import Fraction

import pytest

from app.utils.errors import PrecisionError
from app.utils.series import EXACT, EtaSeries, Transseries


def test_geometric_inverse(tower):
    s = EtaSeries(tower, {0: tower.one, 1: tower.const(-1)}, 6)
    inv = s.inverse()
    assert inv.order == 6
    assert all(inv.coeff(n) == 1 for n in range(7))


def test_square_root_squares_back(tower):
    u = EtaSeries(tower, {0: tower.one, 1: tower.gen("w"), 2: tower.gen("l0")}, 5)
    root = u.power(Fraction(1, 2))
    assert (root * root - u).truncate(5).is_zero()


def test_exp_is_a_homomorphism(tower):
    a = EtaSeries(tower, {1: tower.gen("l0")}, 5)
    b = EtaSeries(tower, {2: tower.gen("t")}, 5)
    assert ((a + b).exp() - a.exp() * b.exp()).is_zero()


def test_coefficient_beyond_order(tower):
    s = EtaSeries(tower, {0: tower.one}, 3)
    assert s.coeff(2).is_zero()
    with pytest.raises(PrecisionError):
        s.coeff(4)


def test_exact_series_need_finite_order(tower):
    s = EtaSeries(tower, {0: tower.one, 1: tower.one}, EXACT)
    with pytest.raises(PrecisionError):
        s.inverse()
    with pytest.raises(PrecisionError):
        s.power(Fraction(1, 2))


def test_product_order_tracks_valuations(tower):
    a = EtaSeries(tower, {-1: tower.gen("w")}, 4)
    b = EtaSeries(tower, {0: tower.one}, 4)
    assert (a * b).order == 3


def test_transseries_sectors_multiply(tower):
    x = Transseries(tower, {0: EtaSeries(tower, {0: tower.one}, 4), 1: EtaSeries(tower, {0: tower.gen("q")}, 4),
                           2: EtaSeries.zero(tower, 4)})
    square = x * x
    assert square.coeff(1, 0) == 2 * tower.gen("q")
    assert square.coeff(2, 0) == tower.gen("w")


def test_transseries_derivative_brings_down_phase(tower):
    x = Transseries(tower, {0: EtaSeries.zero(tower, 3), 1: EtaSeries(tower, {0: tower.one}, 3)})
    # d/dt e^(eta phi) = eta w e^(eta phi)
    assert x.d_dt().sector(1).coeff(-1) == tower.gen("w")
