"""
Borel-Pade-Laplace summation of series in z = 1/y, y = c eta.

The Borel transform of sum_k F_k y^-k is B(zeta) = sum_k F_k zeta^(k-1)/(k-1)!;
B is replaced by a diagonal Pade approximant and Laplace-integrated along the
ray arg zeta = theta. For the Voros coefficient W, B is meromorphic with
simple poles at zeta = 2 pi i k, and W(y) = mu(y) - mu(2y) with the Binet
function mu(y) = log Gamma(y) - (y - 1/2) log y + y - (1/2) log 2 pi.
"""

import cmath
import logging
from dataclasses import dataclass
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath

from app.models.multiplier import ALPHA, ALPHA_TILDE, E_TOKEN, MultiplierNormalization
from app.utils.errors import NumericsError, PadeDefectError
from app.utils.voros import ZSeries, p_voros_series, stokes_multiplier_table
from config import settings

logger = logging.getLogger(__name__)


@dataclass
class PadeBorel:
    """[L/M] Pade approximant of a Borel transform, with its poles."""

    numerator: List[mpmath.mpc]
    denominator: List[mpmath.mpc]
    poles: List[complex]

    def __call__(self, zeta):
        return mpmath.polyval(self.numerator[::-1], zeta) / mpmath.polyval(self.denominator[::-1], zeta)

    def nearest_poles(self, count: int = 2) -> List[complex]:
        return sorted(self.poles, key=abs)[:count]


def borel_coefficients(series: ZSeries) -> List[mpmath.mpf]:
    """Taylor coefficients of B(zeta): entry k - 1 is F_k/(k-1)!."""
    return [mpmath.mpf(series[k].numerator) / series[k].denominator / factorial(k - 1)
            for k in range(1, series.n_max + 1)]


def pade_borel(series: ZSeries, order: int) -> PadeBorel:
    """
    The [order/order] Pade approximant of the Borel transform of series.

    Raises:
        NumericsError: if the series is too short for the requested order
    """
    coeffs = borel_coefficients(series)
    if len(coeffs) < 2 * order + 1:
        raise NumericsError(f"Pade [{order}/{order}] needs {2 * order + 1} Borel coefficients, got {len(coeffs)}")
    p, q = mpmath.pade(coeffs[: 2 * order + 1], order, order)
    # drop vanishing leading coefficients before root finding
    top = [v for v in q]
    while len(top) > 1 and abs(top[-1]) < mpmath.mpf(10) ** (-mpmath.mp.dps + 5):
        top.pop()
    poles = [complex(r) for r in mpmath.polyroots(top[::-1], maxsteps=200, extraprec=2 * mpmath.mp.dps)] if len(top) > 1 else []
    return PadeBorel(list(p), list(q), poles)


def _check_ray(approximant: PadeBorel, theta: float, clearance: float) -> None:
    for pole in approximant.poles:
        if abs(pole) < 1e-12:
            continue
        gap = abs(cmath.phase(pole * cmath.exp(-1j * theta)))
        if gap < clearance:
            raise PadeDefectError(f"Pade pole {pole:.6g} lies within {gap:.3g} rad of the ray arg zeta = {theta:.6g}")


def borel_pade_laplace(series: ZSeries, y: complex, direction: Optional[float] = None,
                       order: Optional[int] = None, ray_clearance: float = 1e-3,
                       tol: Optional[float] = None) -> complex:
    """
    Borel-Pade-Laplace sum of series at y along arg zeta = direction.

    Args:
        series: Coefficients F_k of y^-k (F_0 is added as is)
        y: The large parameter c eta
        direction: Ray angle in the Borel plane, defaults to -arg y
        order: Diagonal Pade order, defaults to the largest of PADE_ORDERS
        ray_clearance: Minimum angle between the ray and any Pade pole

    Returns:
        The sum as a Python complex

    Raises:
        PadeDefectError: if a pole of the approximant lies on the ray
    """
    tol = settings.BOREL_TOL if tol is None else tol
    theta = -cmath.phase(y) if direction is None else direction
    if (y * cmath.exp(1j * theta)).real <= 0:
        raise NumericsError(f"Laplace integral along arg zeta = {theta:.6g} diverges for y = {y}")
    order = max(settings.pade_orders()) if order is None else order
    constant = complex(series[0])
    if all(series[k] == 0 for k in range(1, series.n_max + 1)):
        return constant
    with mpmath.workdps(settings.DPS):
        approximant = pade_borel(series, order)
        _check_ray(approximant, theta, ray_clearance)
        unit = mpmath.expj(theta)
        yy = mpmath.mpc(y)
        integrand = lambda r: mpmath.exp(-yy * r * unit) * approximant(r * unit) * unit
        value, error = mpmath.quad(integrand, [0, 1, 10, mpmath.inf], error=True)
        if error > tol * max(1, abs(value)):
            logger.warning(f"Laplace quadrature error {float(error):.3g} above tolerance at y={y}")
        return constant + complex(value)


def lateral_sums(series: ZSeries, y: complex, delta: float = 0.05, order: Optional[int] = None) -> Tuple[complex, complex]:
    """Sums along arg zeta = -arg y + delta and -arg y - delta."""
    theta = -cmath.phase(y)
    return (borel_pade_laplace(series, y, theta + delta, order),
            borel_pade_laplace(series, y, theta - delta, order))


def borel_sum_with_retry(series: ZSeries, y: complex, direction: Optional[float] = None,
                         order: Optional[int] = None, attempts: int = 4, step: float = 1e-2) -> complex:
    """borel_pade_laplace with the ray rotated away from spurious Pade poles."""
    theta = -cmath.phase(y) if direction is None else direction
    for attempt in range(attempts):
        try:
            return borel_pade_laplace(series, y, theta, order)
        except PadeDefectError as e:
            logger.warning(f"{e}; perturbing the ray")
            theta += step * (attempt + 1) * (-1) ** attempt
    raise PadeDefectError(f"no admissible ray near arg zeta = {theta:.6g} after {attempts} attempts")


def binet_mu(y: complex) -> complex:
    """mu(y) = log Gamma(y) - (y - 1/2) log y + y - (1/2) log 2 pi."""
    with mpmath.workdps(settings.DPS):
        yy = mpmath.mpc(y)
        return complex(mpmath.loggamma(yy) - (yy - 0.5) * mpmath.log(yy) + yy - 0.5 * mpmath.log(2 * mpmath.pi))


def voros_closed_form(y: complex) -> complex:
    """W(y) = mu(y) - mu(2y) away from the Stokes rays arg y = +-pi/2."""
    return binet_mu(y) - binet_mu(2 * y)


def borel_voros_w(y: complex, direction: Optional[float] = None, order: Optional[int] = None) -> complex:
    """Borel sum of W at y = c eta."""
    order = max(settings.pade_orders()) if order is None else order
    return borel_sum_with_retry(p_voros_series(2 * order + 1), y, direction, order)


def voros_pole_clustering(orders: Optional[Sequence[int]] = None) -> Dict[int, List[complex]]:
    """The two Pade poles of the W Borel transform nearest the origin, per order."""
    orders = settings.pade_orders() if orders is None else orders
    out = {}
    with mpmath.workdps(settings.DPS):
        for order in orders:
            out[order] = sorted(pade_borel(p_voros_series(2 * order + 1), order).nearest_poles(2), key=lambda p: p.imag)
            logger.info(f"Pade [{order}/{order}] nearest Borel poles of W: {out[order]}")
    return out


def voros_jump(y: complex, delta: float = 0.05, order: Optional[int] = None) -> Tuple[complex, complex]:
    """
    (S_minus[e^W] / S_plus[e^W], 1 + e^(2 pi i y)) on the Stokes ray arg y = pi/2.

    minus is the side arg c = pi/2 - eps, i.e. the Laplace ray arg zeta = -pi/2 + eps.
    """
    order = max(settings.pade_orders()) if order is None else order
    series = p_voros_series(2 * order + 1)
    minus, plus = lateral_sums(series, y, delta, order)
    return cmath.exp(minus - plus), 1 + cmath.exp(2j * cmath.pi * y)


def numeric_multipliers(normalization: MultiplierNormalization, y: complex, alpha: complex = 1.0,
                        delta: float = 0.05, order: Optional[int] = None) -> Tuple[Dict[int, complex], Dict[int, complex], complex]:
    """
    Multiplier tables instantiated with Borel sums of e^W on both sides, and alpha_tilde/alpha.

    alpha_tilde is solved from the first multiplier that involves it; the
    entries are affine in alpha_tilde.
    """
    order = max(settings.pade_orders()) if order is None else order
    series = p_voros_series(2 * order + 1)
    w_minus, w_plus = lateral_sums(series, y, delta, order)
    E = cmath.exp(2j * cmath.pi * y)
    minus_table = stokes_multiplier_table(normalization, "minus")
    plus_table = stokes_multiplier_table(normalization, "plus")
    tokens = lambda table, w: {E_TOKEN.name: E, table.x_token.name: cmath.exp(w), table.w_token.name: cmath.exp(w)}
    minus = minus_table.evaluate({**tokens(minus_table, w_minus), ALPHA.name: alpha})
    plus_at = lambda a: plus_table.evaluate({**tokens(plus_table, w_plus), ALPHA_TILDE.name: a})
    base, unit = plus_at(0), plus_at(1)
    ratio = None
    for j in sorted(minus):
        slope = unit[j] - base[j]
        if abs(slope) > 1e-14:
            ratio = (minus[j] - base[j]) / slope / alpha
            break
    if ratio is None:
        raise NumericsError("no multiplier involves alpha_tilde")
    plus = plus_at(ratio * alpha)
    logger.info(f"numeric connection ratio ({normalization}) at y={y}: {ratio}")
    return minus, plus, ratio
