"""
WKB data of the isomonodromic linear system attached to P_II.

    (d^2/dx^2 - eta^2 Q(x, t, c, eta)) psi = 0,   d psi/dt = A d psi/dx - (1/2) dA/dx psi

with Q = x^4 + t x^2 + 2 c x + 2 K - eta^-1 nu/(x - lambda) + (3/4) eta^-2 / (x - lambda)^2
and A = 1 / (2 (x - lambda)). Series here are transseries whose coefficients
live in the tower with x and s = sqrt(x^2 + 2 l0 x + 3 l0^2 + t).
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Literal, Optional, Tuple

from app.context import primitive_name
from app.utils.errors import PrimitiveError
from app.utils.pii_series import (
    Normalization,
    backlund_transform,
    delta,
    one_param_solution,
    solve_riccati,
    split_odd_even,
    taylor_shift_c,
    zero_param_solution,
)
from app.utils.series import EXACT, EtaSeries, LocalSeries, Transseries
from app.utils.tower import Tower, TowerElement

logger = logging.getLogger(__name__)

# Coefficients involve x and s; grading as for P_II transseries.
XTransseries = Transseries

Point = Literal["lambda0", "infinity"]


def pii_data(tower: Tower, K: int, N: int, normalization: Normalization = "tau1") -> Tuple[Transseries, Transseries]:
    """(lambda, nu) through sectors 0..K and order N; K = 0 gives the 0-parameter solution."""
    if K == 0:
        lam, nu = zero_param_solution(tower, N)
        return Transseries.from_series(lam), Transseries.from_series(nu)
    return one_param_solution(tower, K, N, normalization)


def leading_term(tower: Tower) -> TowerElement:
    """S_-1 = (x - l0) s."""
    return (tower.gen("x") - tower.gen("l0")) * tower.gen("s")


def q_potential_series(lam: Transseries, nu: Transseries) -> XTransseries:
    """Q_II expanded in eta^-1 and the sectors of (lambda, nu)."""
    tower = lam.tower
    x, t, c = tower.gen("x"), tower.gen("t"), tower.gen("c")
    inv = (x - lam).inverse()
    lam2 = lam * lam
    k_ham = (nu * nu - (lam2 * lam2 + lam2 * t + lam * (2 * c))) * Fraction(1, 2)
    polynomial = x ** 4 + t * x * x + 2 * c * x
    return k_ham * 2 + polynomial - (nu * inv).shift(1) + (inv * inv).shift(2) * Fraction(3, 4)


def a_series(lam: Transseries, leading_only: bool = False) -> XTransseries:
    """A_II = 1/(2(x - lambda)); with leading_only, 1/(2(x - l0)) without sector corrections."""
    tower = lam.tower
    x = tower.gen("x")
    if leading_only:
        value = (x - tower.gen("l0")).inverse() * Fraction(1, 2)
        return Transseries.from_series(EtaSeries(tower, {0: value}, EXACT), lam.K)
    return (x - lam).inverse() * Fraction(1, 2)


@lru_cache(maxsize=None)
def sl2_riccati_series(
    tower: Tower, K: int, N: int, normalization: Normalization = "tau1"
) -> Tuple[XTransseries, XTransseries]:
    """
    Solve S^2 + dS/dx = eta^2 Q_II through sectors 0..K and order N.

    Args:
        tower: Tower with x and s
        K: Highest sector
        N: Truncation order
        normalization: Phase normalization of the underlying P_II transseries

    Returns:
        (S, S_odd)
    """
    lam, nu = pii_data(tower, K, N + 1, normalization)
    potential = q_potential_series(lam, nu).shift(-2)
    lead = leading_term(tower)
    dx = lambda e: e.diff("x")
    S = solve_riccati(tower, lead, potential, dx, K, N)
    S_dagger = solve_riccati(tower, -lead, potential, dx, K, N)
    S_odd, _ = split_odd_even(S, S_dagger)
    logger.info(f"SL_II Riccati series computed for K={K}, N={N}")
    return S, S_odd


def sl2_riccati_residual(tower: Tower, K: int, N: int, normalization: Normalization = "tau1") -> XTransseries:
    """S^2 + dS/dx - eta^2 Q_II."""
    S, _ = sl2_riccati_series(tower, K, N, normalization)
    lam, nu = pii_data(tower, K, N + 1, normalization)
    potential = q_potential_series(lam, nu).shift(-2)
    return (S * S + S.diff("x") - potential).truncate(N - 1)


def sl2_compat_residual(
    tower: Tower, K: int, N: int, normalization: Normalization = "tau1", leading_only_a: bool = False
) -> XTransseries:
    """dS/dt - d/dx (A S - (1/2) dA/dx), exact through order N."""
    S, _ = sl2_riccati_series(tower, K, N, normalization)
    lam, _ = pii_data(tower, K, N + 1, normalization)
    A = a_series(lam, leading_only=leading_only_a)
    flux = A * S - A.diff("x") * Fraction(1, 2)
    return (S.d_dt() - flux.diff("x")).truncate(N)


@lru_cache(maxsize=None)
def u_series(tower: Tower, K: int, N: int, normalization: Normalization = "tau1") -> Transseries:
    """
    U with dU/dt = eta (lambda - l0), through order N in every sector.

    Sector 0 is sum_n eta^(1-2n) I_2n with I_2n the primitive of lambda^(0)_2n
    normalized at t = infinity; sector k >= 1 solves k eta w U + dU/dt = eta lambda^(k).
    """
    lam0, _ = zero_param_solution(tower, N + 1)
    sector0: Dict[int, TowerElement] = {}
    for n in range(1, (N + 1) // 2 + 1):
        name = primitive_name("I", 2 * n, "inf")
        if name not in tower.names:
            raise PrimitiveError(f"tower has no primitive slot {name!r}; raise PRIMITIVE_DEPTH")
        tower.bind_primitive(name, lam0.coeff(2 * n), "inf")
        sector0[2 * n - 1] = tower.gen(name)
    sectors = {0: EtaSeries(tower, sector0, N)}
    if K:
        lam, _ = pii_data(tower, K, N, normalization)
        w_inv = tower.gen("w").inverse()
        for k in range(1, K + 1):
            coeffs: Dict[int, TowerElement] = {}
            for n in range(N + 1):
                rhs = lam.coeff(k, n)
                if n - 1 in coeffs:
                    rhs = rhs - coeffs[n - 1].diff("t")
                coeffs[n] = rhs * w_inv * Fraction(1, k)
            sectors[k] = EtaSeries(tower, coeffs, N)
    return Transseries(tower, sectors)


def u_residual(tower: Tower, K: int, N: int, normalization: Normalization = "tau1") -> Transseries:
    """dU/dt - eta (lambda - l0)."""
    U = u_series(tower, K, N, normalization)
    lam, _ = pii_data(tower, K, N, normalization)
    return (U.d_dt() - (lam - tower.gen("l0")).shift(-1)).truncate(N - 1)


def log_u_residual(
    tower: Tower, K: int, N: int, normalization: Normalization = "tau1", include_log_term: bool = True
) -> Transseries:
    """
    d/dt[(4/3) eta l0^3 + c eta log(-(2 l0^2 + t)/4) - U] + eta lambda.

    The logarithm enters only through its t-derivative 1/Delta.
    """
    l0, c = tower.gen("l0"), tower.gen("c")
    explicit = (l0 ** 3).diff("t") * Fraction(4, 3)
    if include_log_term:
        explicit = explicit + c * delta(tower).inverse()
    U = u_series(tower, K, N, normalization)
    lam, _ = pii_data(tower, K, N, normalization)
    residual = -U.d_dt() + lam.shift(-1) + EtaSeries(tower, {-1: explicit}, EXACT)
    return residual.truncate(N - 1)


def schlesinger_difference_residual(tower: Tower, N: int, drop_half_term: bool = False) -> EtaSeries:
    """
    S(c) - S(c - 1/eta) - (1/2)(1/(x - Lambda) + 1/(x - lambda)) + dB/dx / B,

    B = x^2 - lambda^2 + nu - eta^-1/(2(x - lambda)) - eta^-1 S, all in sector 0,
    Lambda the Backlund image of lambda. Zero through order N.
    """
    S, _ = sl2_riccati_series(tower, 0, N + 1)
    S = S.sector(0)
    lam, nu = zero_param_solution(tower, N + 2)
    x = tower.gen("x")
    inv = (x - lam).inverse()
    B = -(lam * lam) + nu + x * x - S.shift(1)
    if not drop_half_term:
        B = B - inv.shift(1) * Fraction(1, 2)
    Lam, _ = backlund_transform(lam, nu)
    prefactor = ((x - Lam).inverse() + inv) * Fraction(1, 2)
    residual = S - taylor_shift_c(S, N + 1) - prefactor + B.diff("x") * B.inverse()
    return residual.truncate(N)


class LocalChart:
    """
    Expansion of tower elements at a point of the x-plane in a local coordinate y.

    At lambda0: x = l0 + y, s = w sqrt(1 + (4 l0 y + y^2)/Delta), s(l0) = w.
    At infinity: x = 1/y, s = y^-1 sqrt(1 + 2 l0 y + (3 l0^2 + t) y^2), s ~ x.
    """

    def __init__(self, tower: Tower, point: Point):
        if point not in ("lambda0", "infinity"):
            raise ValueError(f"unknown expansion point {point!r}")
        self.tower = tower
        self.point = point
        self._s_index = tower.index("s")
        self._l0_powers = [tower.one]
        self._s_cache: Dict[int, LocalSeries] = {}
        # valuation of s in y
        self.s_valuation = 0 if point == "lambda0" else -1

    def _l0_power(self, n: int) -> TowerElement:
        while len(self._l0_powers) <= n:
            self._l0_powers.append(self._l0_powers[-1] * self.tower.gen("l0"))
        return self._l0_powers[n]

    def _x_polynomial(self, parts: Dict[int, object]) -> LocalSeries:
        tower = self.tower
        coeffs: Dict[int, TowerElement] = {}
        for p, a in parts.items():
            a = tower.const(a)
            if self.point == "infinity":
                coeffs[-p] = coeffs.get(-p, tower.zero) + a
                continue
            for i in range(p + 1):
                term = a * self._l0_power(p - i) * comb(p, i)
                coeffs[i] = coeffs[i] + term if i in coeffs else term
        return LocalSeries(tower, coeffs, EXACT)

    def s_series(self, order: int) -> LocalSeries:
        cached = self._s_cache.get(order)
        if cached is not None:
            return cached
        tower = self.tower
        l0, t = tower.gen("l0"), tower.gen("t")
        if self.point == "lambda0":
            d_inv = delta(tower).inverse()
            u = LocalSeries(tower, {0: tower.one, 1: 4 * l0 * d_inv, 2: d_inv}, order)
            result = u.power(Fraction(1, 2)) * tower.gen("w")
        else:
            u = LocalSeries(tower, {0: tower.one, 1: 2 * l0, 2: 3 * l0 * l0 + t}, order + 1)
            result = u.power(Fraction(1, 2)).shift(-1)
        self._s_cache[order] = result
        return result

    def expand(self, e: TowerElement, order: int) -> LocalSeries:
        """Local Laurent expansion of e, exact through y**order."""
        tower = self.tower
        total = LocalSeries.zero(tower, EXACT)
        for key, coeff in e.terms.items():
            numer_parts, denom_parts = tower.x_coefficients(coeff)
            numer = self._x_polynomial(numer_parts)
            denom = self._x_polynomial(denom_parts)
            v_num, v_den = numer.valuation(), denom.valuation()
            v_rat = v_num - v_den
            s_power = key[self._s_index]
            if v_rat + s_power * self.s_valuation > order:
                continue
            rational_order = order - s_power * self.s_valuation
            denom_inv = denom.truncate(rational_order - v_num + 2 * v_den).inverse()
            term = numer * denom_inv
            if s_power:
                term = term * self.s_series(order - v_rat)
            rest = key[:self._s_index] + (0,) + key[self._s_index + 1:]
            if any(rest):
                term = term * TowerElement(tower, {rest: tower.field.one})
            total = total + term
        return total.truncate(order)

    def residue(self, e: TowerElement) -> TowerElement:
        """Res of e dx at the chart's point."""
        if self.point == "lambda0":
            return self.expand(e, -1).coeff(-1)
        # dx = -y^-2 dy, so Res_inf = -(coefficient of y)
        return -self.expand(e, 1).coeff(1)


def residue_at_lambda0(series: Transseries, k: int, ell: int) -> TowerElement:
    """Residue at x = l0 of the (k, ell) coefficient."""
    return LocalChart(series.tower, "lambda0").residue(series.coeff(k, ell))


def residue_at_infinity(e: TowerElement) -> TowerElement:
    return LocalChart(e.tower, "infinity").residue(e)


def asymptotic_expand_x_infinity(
    series: Transseries, M: int, sectors: Optional[int] = None
) -> Dict[Tuple[int, int], LocalSeries]:
    """
    Expansion at x = infinity (y = 1/x, branch s ~ x) of every (k, l) coefficient.

    Each entry is exact through y**M, i.e. through x**-M.
    """
    chart = LocalChart(series.tower, "infinity")
    K = series.K if sectors is None else min(sectors, series.K)
    table = {}
    for k in range(K + 1):
        sector = series.sector(k)
        for ell, value in sector.items():
            table[(k, ell)] = chart.expand(value, M)
    return table


def expansion_at_lambda0(series: Transseries, M: int) -> Dict[Tuple[int, int], LocalSeries]:
    """Expansion at x = l0 (y = x - l0, branch s(l0) = w) of every (k, l) coefficient."""
    chart = LocalChart(series.tower, "lambda0")
    return {(k, ell): chart.expand(value, M) for k, s in series.sectors.items() for ell, value in s.items()}


def odd_part_residues(tower: Tower, K: int, N: int, normalization: Normalization = "tau1") -> Dict[Tuple[int, int], TowerElement]:
    """Residues of S_odd at x = l0 for every computed (k, l); all vanish."""
    _, S_odd = sl2_riccati_series(tower, K, N, normalization)
    chart = LocalChart(tower, "lambda0")
    residues = {}
    for k, sector in S_odd.sectors.items():
        for ell in range(-1, sector.order + 1):
            value = sector.coeff(ell)
            residues[(k, ell)] = chart.residue(value) if value else tower.zero
    return residues


def homogeneity_table(series: Transseries) -> Dict[Tuple[int, int], Optional[Fraction]]:
    """Scaling degree of each nonzero coefficient (None if inhomogeneous)."""
    return {
        (k, ell): value.homogeneity_degree()
        for k, sector in series.sectors.items()
        for ell, value in sector.items()
    }

