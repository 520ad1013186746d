"""
Exact series in z = 1/(c eta): Bernoulli numbers, the Voros coefficient W of
P_II, the Weber Voros coefficient, 2V - U, the difference equation satisfied
by W, and the Stokes multiplier tables with the connection ratio.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Optional, Sequence

import sympy

from app.models.multiplier import (
    ALPHA,
    ALPHA_TILDE,
    E_TOKEN,
    W_MINUS,
    W_PLUS,
    X_MINUS,
    X_PLUS,
    MultiplierNormalization,
    MultiplierTable,
    Side,
)
from app.utils.errors import ConnectionInconsistencyError

logger = logging.getLogger(__name__)


class ZSeries:
    """sum coeffs[n] z^n for n = 0..n_max with rational coefficients."""

    __slots__ = ("coeffs", "n_max")

    def __init__(self, coeffs: Sequence[Fraction], n_max: Optional[int] = None):
        n_max = len(coeffs) - 1 if n_max is None else n_max
        padded = [Fraction(v) for v in coeffs[: n_max + 1]]
        padded += [Fraction(0)] * (n_max + 1 - len(padded))
        self.coeffs: List[Fraction] = padded
        self.n_max = n_max

    @classmethod
    def zero(cls, n_max: int) -> "ZSeries":
        return cls([], n_max)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n] if 0 <= n <= self.n_max else Fraction(0)

    def __add__(self, other: "ZSeries") -> "ZSeries":
        n_max = min(self.n_max, other.n_max)
        return ZSeries([self[n] + other[n] for n in range(n_max + 1)], n_max)

    def __neg__(self) -> "ZSeries":
        return ZSeries([-v for v in self.coeffs], self.n_max)

    def __sub__(self, other: "ZSeries") -> "ZSeries":
        return self + (-other)

    def __mul__(self, other) -> "ZSeries":
        if isinstance(other, ZSeries):
            n_max = min(self.n_max, other.n_max)
            out = [sum((self[i] * other[n - i] for i in range(n + 1)), Fraction(0)) for n in range(n_max + 1)]
            return ZSeries(out, n_max)
        return ZSeries([v * Fraction(other) for v in self.coeffs], self.n_max)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZSeries):
            return NotImplemented
        n_max = min(self.n_max, other.n_max)
        return all(self[n] == other[n] for n in range(n_max + 1))

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def compose_shift(self) -> "ZSeries":
        """F(z/(1 - z)), i.e. c eta -> c eta - 1."""
        out = [Fraction(0)] * (self.n_max + 1)
        out[0] = self[0]
        for n in range(1, self.n_max + 1):
            if not self[n]:
                continue
            for m in range(n, self.n_max + 1):
                out[m] += self[n] * comb(m - 1, m - n)
        return ZSeries(out, self.n_max)

    def evaluate(self, z: complex) -> complex:
        return sum(complex(v) * z ** n for n, v in enumerate(self.coeffs))

    def to_json(self) -> dict:
        return {"n_max": self.n_max, "coefficients": [str(v) for v in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "ZSeries":
        return cls([Fraction(v) for v in data["coefficients"]], int(data["n_max"]))

    def __repr__(self):
        body = ", ".join(f"{n}: {v}" for n, v in enumerate(self.coeffs) if v)
        return f"ZSeries({{{body}}}, n_max={self.n_max})"


@lru_cache(maxsize=None)
def _bernoulli_table(n_max: int) -> tuple:
    # sum_{r=0}^{m} C(m+1, r) B_r = 0 with B_1 = -1/2, odd B_r = 0 beyond
    evens: List[Fraction] = [Fraction(1)]
    for m in range(1, n_max + 1):
        n = 2 * m
        s = sum((comb(n + 1, 2 * j) * evens[j] for j in range(m)), Fraction(0))
        s += Fraction(n + 1) * Fraction(-1, 2)
        evens.append(-s / (n + 1))
    return tuple(evens)


def bernoulli_numbers(n_max: int) -> List[Fraction]:
    """
    B_2, B_4, ..., B_{2 n_max} as exact fractions.

    Args:
        n_max: Number of even-index Bernoulli numbers

    Returns:
        List whose entry n - 1 is B_2n
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return list(_bernoulli_table(n_max)[1:])


def bernoulli_generating_coefficients(order: int) -> List[Fraction]:
    """Coefficients of w/(e^w - 1) through w**order (1, -1/2, B_2/2!, ...)."""
    evens = _bernoulli_table(max(order // 2, 1))
    out = []
    for n in range(order + 1):
        if n == 1:
            out.append(Fraction(-1, 2))
        elif n % 2:
            out.append(Fraction(0))
        else:
            out.append(evens[n // 2] / factorial(n))
    return out


def voros_coefficient(n: int) -> Fraction:
    """W_n = -(2^(1-2n) - 1) B_2n / (2n (2n - 1)), the coefficient of z^(2n-1)."""
    b = _bernoulli_table(n)[n]
    return -(Fraction(2) ** (1 - 2 * n) - 1) * b / (2 * n * (2 * n - 1))


def p_voros_series(n_max: int) -> ZSeries:
    """The P_II Voros coefficient W as a series in z through z**n_max."""
    coeffs = [Fraction(0)] * (n_max + 1)
    for n in range(1, (n_max + 1) // 2 + 1):
        coeffs[2 * n - 1] = voros_coefficient(n)
    return ZSeries(coeffs, n_max)


def weber_voros_series(n_max: int) -> ZSeries:
    """
    V_Weber as a series in u = (i E eta)^-1 through u**n_max.

    The coefficient of u^(2n-1) is (2^(1-2n) - 1) B_2n / (4n (2n - 1)).
    """
    coeffs = [Fraction(0)] * (n_max + 1)
    table = _bernoulli_table(max((n_max + 1) // 2, 1))
    for n in range(1, (n_max + 1) // 2 + 1):
        coeffs[2 * n - 1] = (Fraction(2) ** (1 - 2 * n) - 1) * table[n] / (4 * n * (2 * n - 1))
    return ZSeries(coeffs, n_max)


def weber_relation_residual(n_max: int, sign: int = 1) -> ZSeries:
    """W + 2 sign V_Weber(-i c, eta); with E = -i c the Weber variable is z itself."""
    return p_voros_series(n_max) + weber_voros_series(n_max) * (2 * sign)


def difference_rhs(n_max: int) -> ZSeries:
    """
    -1 - log(1 - z)/z - log((2 - z)/(2(1 - z))) expanded through z**n_max.

    The z coefficient vanishes; the first nonzero one is -1/24 at z**2.
    """
    coeffs = [Fraction(0)] * (n_max + 1)
    for k in range(1, n_max + 1):
        coeffs[k] = Fraction(1, k + 1) - (1 - Fraction(1, 2 ** k)) / k
    return ZSeries(coeffs, n_max)


def difference_equation_residual(F: ZSeries, n_max: Optional[int] = None) -> ZSeries:
    """F(z) - F(z/(1 - z)) - rhs, truncated at n_max; zero iff F solves the shift relation."""
    n_max = F.n_max if n_max is None else min(n_max, F.n_max)
    if F[0]:
        raise ValueError("F must have a zero constant term")
    F = ZSeries(F.coeffs, n_max)
    return F - F.compose_shift() - difference_rhs(n_max)


def solve_difference_equation(n_max: int) -> ZSeries:
    """
    The unique F with F(0) = 0 solving the shift relation, through z**n_max.

    The z**m coefficient of F(z) - F(z/(1 - z)) is
    -sum_{n < m} C(m-1, m-n) F_n, so F_(m-1) is fixed by the z**m equation.
    """
    rhs = difference_rhs(n_max + 1)
    F = [Fraction(0)] * (n_max + 1)
    for m in range(2, n_max + 2):
        acc = rhs[m] + sum((comb(m - 1, m - n) * F[n] for n in range(1, m - 1)), Fraction(0))
        F[m - 1] = -acc / (m - 1)
    logger.debug(f"difference equation solved through z^{n_max}")
    return ZSeries(F, n_max)


def two_v_minus_u_series(n_max: int) -> ZSeries:
    """2V - U at x = infinity as a series in z; the same series as W."""
    return p_voros_series(n_max)


def v_infinity_series(n_max: int) -> ZSeries:
    """V^(0)(infinity, c, eta) = (1/2)(2V - U)."""
    return two_v_minus_u_series(n_max) * Fraction(1, 2)


# Stokes multipliers around x = infinity, transcribed with the tokens of app.models.multiplier

def _infinity_entries(side: Side) -> Dict[int, sympy.Expr]:
    I, sqrt_pi = sympy.I, sympy.sqrt(sympy.pi)
    E = E_TOKEN
    if side == "minus":
        X, a = X_MINUS, ALPHA
        return {
            1: I * (1 + E) / X,
            2: I * X / E,
            3: I * (1 + E) / (E * X),
            4: -2 * sqrt_pi * a,
            5: sympy.Integer(0),
            6: 2 * sqrt_pi * a + I * X,
        }
    X, a = X_PLUS, ALPHA_TILDE
    return {
        1: I / X,
        2: I * (1 + E) * X / E,
        3: I / (E * X),
        4: -2 * sqrt_pi * a,
        5: sympy.Integer(0),
        6: 2 * sqrt_pi * a + I * (1 + E) * X,
    }


def stokes_multiplier_table(normalization: MultiplierNormalization, side: Side) -> MultiplierTable:
    """
    The six multipliers on one side of arg c = pi/2.

    The tau1 table is the infinity table with alpha -> alpha e^W. e^W has its own
    token, so its jump across arg c = pi/2 is applied separately from that of e^(2V - U).
    """
    if side not in ("minus", "plus"):
        raise ValueError(f"unknown side {side!r}")
    table = MultiplierTable(side=side, normalization="inf", entries=_infinity_entries(side))
    if normalization == "inf":
        return table
    if normalization != "tau1":
        raise ValueError(f"unknown normalization {normalization!r}")
    a, W = table.alpha_token, table.w_token
    entries = {j: expr.xreplace({a: a * W}) for j, expr in table.entries.items()}
    return MultiplierTable(side=side, normalization="tau1", entries=entries)


def connection_ratio(normalization: MultiplierNormalization, apply_jump: bool = True,
                     jump_w: bool = True) -> sympy.Expr:
    """
    alpha_tilde / alpha from equating the Borel sums of the multipliers across arg c = pi/2.

    The rewrite rules are the jumps e^(2V-U) and e^W on the minus side = (1 + e^(2 pi i c eta))
    times their values on the plus side; apply_jump and jump_w switch them off. Every
    j involving alpha must give the same ratio, every other j must hold identically.

    Raises:
        ConnectionInconsistencyError: if the equations disagree
    """
    minus = stokes_multiplier_table(normalization, "minus")
    plus = stokes_multiplier_table(normalization, "plus")
    rule = {
        X_MINUS: (1 + E_TOKEN) * X_PLUS if apply_jump else X_PLUS,
        W_MINUS: (1 + E_TOKEN) * W_PLUS if jump_w else W_PLUS,
    }
    ratio = None
    for j in sorted(minus.entries):
        equation = sympy.simplify(minus.entries[j].xreplace(rule) - plus.entries[j])
        if not equation.has(ALPHA_TILDE):
            if equation != 0:
                raise ConnectionInconsistencyError(f"multiplier s{j} does not match across the Stokes line: {equation}")
            continue
        solutions = sympy.solve(equation, ALPHA_TILDE)
        if len(solutions) != 1:
            raise ConnectionInconsistencyError(f"multiplier s{j} does not determine alpha_tilde uniquely")
        candidate = sympy.simplify(solutions[0] / ALPHA)
        if ratio is None:
            ratio = candidate
        elif sympy.simplify(candidate - ratio) != 0:
            raise ConnectionInconsistencyError(f"multiplier s{j} gives ratio {candidate}, earlier {ratio}")
    if ratio is None:
        raise ConnectionInconsistencyError("no multiplier involves alpha")
    logger.info(f"connection ratio ({normalization}): {ratio}")
    return ratio
