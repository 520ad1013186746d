"""
Formal solutions of the second Painleve equation with a large parameter.

    d^2 lambda / dt^2 = eta^2 (2 lambda^3 + t lambda + c),  nu = eta^-1 d lambda / dt

Provides the 0-parameter series, the Riccati series R of the linearized
equation with its odd/even split, 1-parameter transseries in the tau1 and
infinity normalizations, and exact checks of the Backlund and Riccati
difference identities.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Dict, Literal, Optional, Tuple

from app.context import primitive_name
from app.utils.errors import PrecisionError, PrimitiveError
from app.utils.series import EXACT, EtaSeries, LaurentSeries, Transseries
from app.utils.tower import Tower, TowerElement

logger = logging.getLogger(__name__)

Normalization = Literal["tau1", "inf"]


def delta(tower: Tower) -> TowerElement:
    """Delta = 6 l0^2 + t."""
    l0 = tower.gen("l0")
    return 6 * l0 * l0 + tower.gen("t")


def shift_parameter(tower: Tower, drop_half: bool = False) -> EtaSeries:
    """The factor c - eta^-1/2 of the Backlund map."""
    coeffs = {0: tower.gen("c")}
    if not drop_half:
        coeffs[1] = tower.const(Fraction(-1, 2))
    return EtaSeries(tower, coeffs, EXACT)


@lru_cache(maxsize=None)
def zero_param_solution(tower: Tower, N: int) -> Tuple[EtaSeries, EtaSeries]:
    """
    The 0-parameter solution (lambda^(0), nu^(0)) through eta^-N.

    Args:
        tower: Tower holding l0 and w
        N: Truncation order

    Returns:
        (lambda^(0), nu^(0)) as EtaSeries
    """
    l0 = tower.gen("l0")
    delta_inv = delta(tower).inverse()
    lam: Dict[int, TowerElement] = {0: l0}
    second: Dict[int, TowerElement] = {}

    def dd(k: int) -> TowerElement:
        if k not in second:
            e = lam.get(k, tower.zero)
            second[k] = e.diff("t").diff("t") if e else tower.zero
        return second[k]

    for k in range(1, N + 1):
        cube = tower.zero
        for i in range(k):
            if i not in lam:
                continue
            for j in range(k - i + 1):
                m = k - i - j
                if max(i, j, m) >= k or j not in lam or m not in lam:
                    continue
                cube = cube + lam[i] * lam[j] * lam[m]
        rhs = (dd(k - 2) if k >= 2 else tower.zero) - 2 * cube
        lam[k] = rhs * delta_inv
        logger.debug(f"lambda^(0)_{k} computed")
    nu = {k: lam[k - 1].diff("t") for k in range(1, N + 1) if lam.get(k - 1)}
    logger.info(f"0-parameter solution computed through order {N}")
    return EtaSeries(tower, lam, N), EtaSeries(tower, nu, N)


def solve_riccati(
    tower: Tower,
    leading: TowerElement,
    potential: Transseries,
    derivative: Callable[[TowerElement], TowerElement],
    K: int,
    N: int,
) -> Transseries:
    """
    Solve Y^2 + D(Y) = potential order by order, sector by sector.

    The potential is given already multiplied by eta^2, so its coefficient of
    eta^-m at sector k is potential.coeff(k, m). Y starts with eta * leading in
    sector 0; every other coefficient follows from
    2 leading Y^(k)_n = -[(Y^2)^(k)_(n-1) + D(Y^(k)_(n-1)) - potential^(k)_(n-1)],
    the bracket taken with Y^(k)_n itself set to zero.
    """
    Y: Dict[int, Dict[int, TowerElement]] = {k: {} for k in range(K + 1)}
    Y[0][-1] = leading
    two_lead_inv = (2 * leading).inverse()
    for n in range(-1, N + 1):
        for k in range(K + 1):
            if k == 0 and n == -1:
                continue
            m = n - 1
            acc = -potential.coeff(k, m)
            previous = Y[k].get(m)
            if previous is not None and previous:
                acc = acc + derivative(previous)
            for k1 in range(k + 1):
                k2 = k - k1
                for a, ya in list(Y[k1].items()):
                    b = m - a
                    if (k1, a) == (0, -1) and (k2, b) == (k, n):
                        continue
                    if (k2, b) == (0, -1) and (k1, a) == (k, n):
                        continue
                    yb = Y[k2].get(b)
                    if yb is not None and ya and yb:
                        acc = acc + ya * yb
            Y[k][n] = -(acc * two_lead_inv)
    return Transseries(tower, {k: EtaSeries(tower, Y[k], N) for k in range(K + 1)})


def split_odd_even(Y: Transseries, Y_dagger: Transseries) -> Tuple[Transseries, Transseries]:
    """Odd and even parts from the two solutions with opposite leading terms."""
    half = Fraction(1, 2)
    return (Y - Y_dagger) * half, (Y + Y_dagger) * half


@lru_cache(maxsize=None)
def riccati_series(tower: Tower, N: int) -> Tuple[EtaSeries, EtaSeries, EtaSeries]:
    """
    The Riccati series R = sum R_k eta^-k (R_-1 = w) of the linearized equation.

    Returns:
        (R, R_odd, R_even), each through eta^-N
    """
    lam, _ = zero_param_solution(tower, N + 2)
    potential = Transseries.from_series((6 * lam * lam + tower.gen("t")).shift(-2))
    w = tower.gen("w")
    dt = lambda e: e.diff("t")
    R = solve_riccati(tower, w, potential, dt, 0, N)
    R_dagger = solve_riccati(tower, -w, potential, dt, 0, N)
    R_odd, R_even = split_odd_even(R, R_dagger)
    logger.info(f"Riccati series computed through order {N}")
    return R.sector(0), R_odd.sector(0), R_even.sector(0)


def riccati_residual(tower: Tower, R: EtaSeries, N: int) -> EtaSeries:
    """R^2 + dR/dt - eta^2 (6 lambda0^2 + t) through order N."""
    lam, _ = zero_param_solution(tower, N + 2)
    potential = (6 * lam * lam + tower.gen("t")).shift(-2)
    return (R * R + R.diff("t") - potential).truncate(N)


def even_part_residual(R_odd: EtaSeries, R_even: EtaSeries, N: int) -> EtaSeries:
    """R_even R_odd + (1/2) dR_odd/dt, zero iff R_even = -(1/2) d/dt log R_odd."""
    return (R_even * R_odd + R_odd.diff("t") * Fraction(1, 2)).truncate(N)


def _bind_odd_primitives(tower: Tower, R_odd: EtaSeries, N: int, basepoint: str) -> Dict[int, TowerElement]:
    primitives = {}
    for k in range(1, N + 1, 2):
        name = primitive_name("P", k, basepoint)
        if name not in tower.names:
            raise PrimitiveError(f"tower has no primitive slot {name!r}; raise PRIMITIVE_DEPTH")
        tower.bind_primitive(name, R_odd.coeff(k), basepoint)
        primitives[k] = tower.gen(name)
    return primitives


def first_sector(tower: Tower, N: int, normalization: Normalization) -> EtaSeries:
    """
    lambda^(1) = q^-1 (1 + sum_j eta^-2j R_(2j-1)/w)^(-1/2) exp(sum_j eta^(1-2j) P_(2j-1)).

    P_k is the primitive of R_k with lower endpoint at the normalization point.
    """
    _, R_odd, _ = riccati_series(tower, N)
    w_inv = tower.gen("w").inverse()
    tail = {k + 1: R_odd.coeff(k) * w_inv for k in range(1, N, 2)}
    amplitude = (EtaSeries(tower, tail, N) + 1).power(Fraction(-1, 2))
    primitives = _bind_odd_primitives(tower, R_odd, N, normalization)
    phase = EtaSeries(tower, primitives, N).exp()
    return amplitude * phase * tower.gen("q").inverse()


def higher_sector(tower: Tower, lam: Transseries, k: int, N: int) -> EtaSeries:
    """
    Sector k >= 2 from
    (k^2-1) Delta lam_l = [6(lam0^2 - l0^2) lam^(k)]_l + 2[cubic terms below k]_l
                          - lam''_(l-2) - k(2 w lam'_(l-1) + w' lam_(l-1)).
    """
    w = tower.gen("w")
    w_t = w.diff("t")
    l0 = tower.gen("l0")
    lam0 = lam.sector(0).truncate(N)
    mixing = (lam0 * lam0 - l0 * l0) * 6
    lower = lam.restrict(k - 1)
    lower = Transseries(tower, {**lower.sectors, k: EtaSeries.zero(tower, EXACT)})
    cube = (lower * lower * lower).sector(k)
    factor = ((k * k - 1) * delta(tower)).inverse()
    coeffs: Dict[int, TowerElement] = {}
    first: Dict[int, TowerElement] = {}
    for ell in range(N + 1):
        rhs = 2 * cube.coeff(ell)
        for i, a in mixing.items():
            prev = coeffs.get(ell - i)
            if prev is not None:
                rhs = rhs + a * prev
        prev = coeffs.get(ell - 2)
        if prev is not None:
            rhs = rhs - first[ell - 2].diff("t")
        prev = coeffs.get(ell - 1)
        if prev is not None:
            rhs = rhs - k * (2 * w * first[ell - 1] + w_t * prev)
        coeffs[ell] = rhs * factor
        first[ell] = coeffs[ell].diff("t")
    return EtaSeries(tower, coeffs, N)


@lru_cache(maxsize=None)
def one_param_solution(
    tower: Tower, K: int, N: int, normalization: Normalization = "tau1"
) -> Tuple[Transseries, Transseries]:
    """
    The 1-parameter transseries (lambda, nu) through sectors 0..K and order N.

    Args:
        tower: Tower with primitive slots P<k>_<normalization>
        K: Highest sector
        N: Truncation order in every sector
        normalization: Lower endpoint of the phase integrals, 'tau1' or 'inf'

    Returns:
        (lambda, nu) transseries; nu = eta^-1 d lambda/dt
    """
    if K < 1:
        raise ValueError("one_param_solution needs K >= 1")
    lam0, _ = zero_param_solution(tower, N)
    lam = Transseries(tower, {0: lam0, 1: first_sector(tower, N, normalization)})
    for k in range(2, K + 1):
        sector = higher_sector(tower, lam, k, N)
        lam = Transseries(tower, {**lam.sectors, k: sector})
        logger.debug(f"sector {k} computed through order {N}")
    nu = lam.d_dt().shift(1)
    logger.info(f"1-parameter solution ({normalization}) computed for K={K}, N={N}")
    return lam, nu


def pii_residual(lam: Transseries) -> Transseries:
    """d^2 lambda/dt^2 - eta^2 (2 lambda^3 + t lambda + c), truncated to what is known."""
    tower = lam.tower
    t, c = tower.gen("t"), tower.gen("c")
    rhs = (lam * lam * lam * 2 + lam * t + c).shift(-2)
    return lam.d_dt().d_dt() - rhs


def first_sector_nu_residual(tower: Tower, N: int, normalization: Normalization = "tau1") -> EtaSeries:
    """nu^(1) - eta^-1 R lambda^(1); the sector-1 derivative is governed by the full R."""
    lam, nu = one_param_solution(tower, 1, N, normalization)
    R, _, _ = riccati_series(tower, N)
    return (nu.sector(1) - (R * lam.sector(1)).shift(1)).truncate(N)


def backlund_transform(lam, nu, drop_half: bool = False):
    """
    The map (lambda, nu) -> (Lambda, Nu) sending solutions at c to solutions at c - 1/eta.

    Works on EtaSeries and on Transseries alike.
    """
    tower = lam.tower
    h = shift_parameter(tower, drop_half)
    denom = nu - lam * lam - tower.gen("t") * Fraction(1, 2)
    ratio = denom.inverse() * h
    Lam = -lam + ratio
    Nu = -nu + lam * ratio * 2 - ratio * ratio
    return Lam, Nu


def taylor_shift_c(e: LaurentSeries, N: Optional[int] = None) -> LaurentSeries:
    """e(c - 1/eta) = sum_m (-1/eta)^m d^m e/dc^m / m!, truncated at N."""
    order = e.order if N is None else min(e.order, N)
    if order >= EXACT:
        raise PrecisionError("taylor_shift_c needs a truncation order")
    coeffs: Dict[int, TowerElement] = {}
    for i, value in e.items():
        derivative = value
        m = 0
        while i + m <= order and derivative:
            term = derivative * Fraction((-1) ** m, factorial(m))
            coeffs[i + m] = coeffs[i + m] + term if i + m in coeffs else term
            derivative = derivative.diff("c")
            m += 1
    return type(e)(e.tower, coeffs, order)


def verify_backlund_identity(tower: Tower, N: int) -> Tuple[EtaSeries, EtaSeries]:
    """Lambda(lambda^(0), nu^(0)) - lambda^(0)(c - 1/eta) and the same for Nu, through N."""
    lam, nu = zero_param_solution(tower, N)
    Lam, Nu = backlund_transform(lam, nu)
    return (
        (Lam - taylor_shift_c(lam, N)).truncate(N),
        (Nu - taylor_shift_c(nu, N)).truncate(N),
    )


def riccati_difference_residual(tower: Tower, N: int, drop_shift_factor: bool = False) -> EtaSeries:
    """
    R(c) - R(c - 1/eta) + A'/A with
    A = 1 + (c - eta^-1/2)(eta^-1 R - 2 lambda^(0)) / (nu^(0) - lambda^(0)^2 - t/2)^2.
    """
    R, _, _ = riccati_series(tower, N + 1)
    lam, nu = zero_param_solution(tower, N + 2)
    denom = nu - lam * lam - tower.gen("t") * Fraction(1, 2)
    numerator = R.shift(1) - lam * 2
    if not drop_shift_factor:
        numerator = numerator * shift_parameter(tower)
    A = numerator * (denom * denom).inverse() + 1
    residual = R - taylor_shift_c(R, N + 1) + A.diff("t") * A.inverse()
    return residual.truncate(N)


def homogeneity_degree(e: TowerElement) -> Optional[Fraction]:
    """Scaling degree under (x, t, c, eta) -> (r^-1/3 x, r^-2/3 t, r^-1 c, r eta)."""
    return e.homogeneity_degree()
