"""
Truncated Laurent series with tower coefficients, and graded transseries.

A series stores ``coeffs[n]`` as the coefficient of eps**n, where eps is the
small variable (eta**-1 for WKB series, a local coordinate for expansions at a
point). Everything through eps**order is exact; nothing beyond is known.
"""

import logging
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterator, Mapping, Tuple

from app.utils.errors import PrecisionError
from app.utils.tower import Tower, TowerElement

logger = logging.getLogger(__name__)

# truncation order of exactly known (finite) series
EXACT = 10 ** 9


def _binomial(alpha: Fraction, m: int) -> Fraction:
    result = Fraction(1)
    for i in range(m):
        result *= (alpha - i) / (i + 1)
    return result


class LaurentSeries:
    """Sum of coeffs[n] * eps**n, exact through eps**order."""

    __slots__ = ("tower", "coeffs", "order")

    def __init__(self, tower: Tower, coeffs: Mapping[int, TowerElement], order: int):
        self.tower = tower
        self.order = min(order, EXACT)
        self.coeffs: Dict[int, TowerElement] = {
            n: e for n, e in coeffs.items() if n <= self.order and not e.is_zero()
        }

    # constructors

    @classmethod
    def constant(cls, tower: Tower, value, order: int = EXACT):
        return cls(tower, {0: tower.coerce(value)}, order)

    @classmethod
    def zero(cls, tower: Tower, order: int = EXACT):
        return cls(tower, {}, order)

    @classmethod
    def monomial(cls, tower: Tower, value, n: int, order: int = EXACT):
        return cls(tower, {n: tower.coerce(value)}, order)

    def _new(self, coeffs, order):
        return type(self)(self.tower, coeffs, order)

    def _coerce(self, other):
        if isinstance(other, LaurentSeries):
            return other
        return self._new({0: self.tower.coerce(other)}, EXACT)

    # inspection

    def valuation(self) -> int:
        return min(self.coeffs) if self.coeffs else self.order + 1

    def coeff(self, n: int) -> TowerElement:
        if n > self.order:
            raise PrecisionError(f"coefficient {n} requested beyond truncation order {self.order}")
        return self.coeffs.get(n, self.tower.zero)

    __getitem__ = coeff

    def items(self) -> Iterator[Tuple[int, TowerElement]]:
        return iter(sorted(self.coeffs.items()))

    def is_zero(self) -> bool:
        return not self.coeffs

    def nonzero_indices(self):
        return sorted(self.coeffs)

    def __repr__(self):
        body = ", ".join(f"{n}: {e.as_expr()}" for n, e in self.items())
        return f"{type(self).__name__}({{{body}}}, order={self.order})"

    # ring operations

    def __add__(self, other):
        if isinstance(other, Transseries):
            return NotImplemented
        other = self._coerce(other)
        order = min(self.order, other.order)
        coeffs = dict(self.coeffs)
        for n, e in other.coeffs.items():
            coeffs[n] = coeffs[n] + e if n in coeffs else e
        return self._new(coeffs, order)

    __radd__ = __add__

    def __neg__(self):
        return self._new({n: -e for n, e in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        if isinstance(other, Transseries):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, Transseries):
            return NotImplemented
        if not isinstance(other, LaurentSeries):
            factor = other if isinstance(other, (int, Fraction)) else self.tower.coerce(other)
            return self._new({n: e * factor for n, e in self.coeffs.items()}, self.order)
        order = min(self.order + other.valuation(), other.order + self.valuation())
        coeffs: Dict[int, TowerElement] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                n = i + j
                if n > order:
                    continue
                product = a * b
                coeffs[n] = coeffs[n] + product if n in coeffs else product
        return self._new(coeffs, order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return self * other.inverse()
        return self * self.tower.coerce(other).inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self._new({0: self.tower.one}, EXACT)
        for _ in range(exponent):
            result = result * self
        return result

    def shift(self, m: int):
        """Multiply by eps**m."""
        return self._new({n + m: e for n, e in self.coeffs.items()}, self.order + m)

    def truncate(self, order: int):
        return self._new(self.coeffs, min(order, self.order))

    def map(self, fn: Callable[[TowerElement], TowerElement]):
        return self._new({n: fn(e) for n, e in self.coeffs.items()}, self.order)

    def diff(self, var: str):
        return self.map(lambda e: e.diff(var))

    def inverse(self):
        if not self.coeffs:
            raise PrecisionError("inverse of a series with no known nonzero coefficient")
        v = self.valuation()
        if self.order >= EXACT:
            if len(self.coeffs) == 1:
                return self._new({-v: self.coeffs[v].inverse()}, EXACT)
            raise PrecisionError("inverse of an exact multi-term series needs a finite order")
        lead_inv = self.coeffs[v].inverse()
        length = self.order - v
        inv = [lead_inv]
        for n in range(1, length + 1):
            acc = self.tower.zero
            for i in range(1, n + 1):
                a = self.coeffs.get(v + i)
                if a is not None and not inv[n - i].is_zero():
                    acc = acc + a * inv[n - i]
            inv.append(-(acc * lead_inv))
        return self._new({n - v: e for n, e in enumerate(inv)}, length - v)

    def _require_finite(self):
        if self.order >= EXACT:
            raise PrecisionError("series functions need a finite truncation order")

    def _unit_tail(self):
        lead = self.coeffs.get(0)
        if lead is None or lead != 1 or self.valuation() < 0:
            raise PrecisionError("expected a series of the form 1 + O(eps)")
        return self - 1

    def power(self, alpha: Fraction):
        """(1 + u)**alpha for a series 1 + u with u = O(eps)."""
        self._require_finite()
        u = self._unit_tail()
        result = self._new({0: self.tower.one}, self.order)
        if u.is_zero():
            return result
        term = self._new({0: self.tower.one}, EXACT)
        for m in range(1, self.order // u.valuation() + 1):
            term = term * u
            result = result + term * _binomial(Fraction(alpha), m)
        return result

    def exp(self):
        """exp(v) for a series v = O(eps)."""
        self._require_finite()
        if self.coeffs and self.valuation() < 1:
            raise PrecisionError("exp needs a series without constant or polar part")
        result = self._new({0: self.tower.one}, self.order)
        if self.is_zero():
            return result
        term = self._new({0: self.tower.one}, EXACT)
        for m in range(1, self.order // self.valuation() + 1):
            term = term * self
            result = result + term * Fraction(1, factorial(m))
        return result

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coefficients": {str(n): self.tower.to_json(e) for n, e in self.items()},
        }

    @classmethod
    def from_json(cls, tower: Tower, data: dict):
        coeffs = {int(n): tower.from_json(e) for n, e in data["coefficients"].items()}
        return cls(tower, coeffs, int(data["order"]))


class EtaSeries(LaurentSeries):
    """Truncated Laurent series in eta**-1 (index n is the coefficient of eta**-n)."""


class LocalSeries(LaurentSeries):
    """Truncated Laurent series in a local coordinate y at a point of the x-plane."""


class Transseries:
    """
    Finite graded sum over k = 0..K of (alpha eta^-1/2)^k e^(k eta phi) sector_k.

    phi is the phase with d(phi)/dt = w; the grading factor is implicit.
    """

    __slots__ = ("tower", "sectors")

    def __init__(self, tower: Tower, sectors: Mapping[int, EtaSeries]):
        self.tower = tower
        self.sectors: Dict[int, EtaSeries] = dict(sectors)
        if sorted(self.sectors) != list(range(len(self.sectors))):
            raise ValueError(f"sectors must be 0..K, got {sorted(self.sectors)}")

    @classmethod
    def from_series(cls, series: EtaSeries, K: int = 0) -> "Transseries":
        tower = series.tower
        sectors = {0: series}
        for k in range(1, K + 1):
            sectors[k] = EtaSeries.zero(tower, EXACT)
        return cls(tower, sectors)

    @property
    def K(self) -> int:
        return len(self.sectors) - 1

    def sector(self, k: int) -> EtaSeries:
        return self.sectors[k]

    def coeff(self, k: int, n: int) -> TowerElement:
        return self.sectors[k].coeff(n)

    def orders(self) -> Dict[int, int]:
        return {k: s.order for k, s in self.sectors.items()}

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.sectors.values())

    def _coerce(self, other) -> "Transseries":
        if isinstance(other, Transseries):
            return other
        if isinstance(other, LaurentSeries):
            return Transseries.from_series(other, self.K)
        return Transseries.from_series(EtaSeries.constant(self.tower, other), self.K)

    def __add__(self, other):
        other = self._coerce(other)
        K = min(self.K, other.K)
        return Transseries(self.tower, {k: self.sectors[k] + other.sectors[k] for k in range(K + 1)})

    __radd__ = __add__

    def __neg__(self):
        return Transseries(self.tower, {k: -s for k, s in self.sectors.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, (Transseries, LaurentSeries)):
            return Transseries(self.tower, {k: s * other for k, s in self.sectors.items()})
        other = self._coerce(other)
        K = min(self.K, other.K)
        sectors = {}
        for k in range(K + 1):
            acc = None
            for k1 in range(k + 1):
                term = self.sectors[k1] * other.sectors[k - k1]
                acc = term if acc is None else acc + term
            sectors[k] = acc
        return Transseries(self.tower, sectors)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self._coerce(1)
        for _ in range(exponent):
            result = result * self
        return result

    def inverse(self) -> "Transseries":
        inv0 = self.sectors[0].inverse()
        tail = Transseries(self.tower, {
            k: (EtaSeries.zero(self.tower, EXACT) if k == 0 else s)
            for k, s in self.sectors.items()
        })
        u = tail * inv0
        result = self._coerce(1)
        power = self._coerce(1)
        for _ in range(self.K):
            power = power * (-u)
            result = result + power
        return result * inv0

    def shift(self, m: int) -> "Transseries":
        return Transseries(self.tower, {k: s.shift(m) for k, s in self.sectors.items()})

    def truncate(self, order: int) -> "Transseries":
        return Transseries(self.tower, {k: s.truncate(order) for k, s in self.sectors.items()})

    def restrict(self, K: int) -> "Transseries":
        return Transseries(self.tower, {k: self.sectors[k] for k in range(K + 1)})

    def map(self, fn: Callable[[TowerElement], TowerElement]) -> "Transseries":
        return Transseries(self.tower, {k: s.map(fn) for k, s in self.sectors.items()})

    def d_dt(self) -> "Transseries":
        """Total t-derivative, including k eta w from the exponential factor."""
        w = self.tower.gen("w")
        sectors = {}
        for k, s in self.sectors.items():
            derived = s.diff("t")
            if k:
                derived = derived + (s * (k * w)).shift(-1)
            sectors[k] = derived
        return Transseries(self.tower, sectors)

    def diff(self, var: str) -> "Transseries":
        """Coefficientwise derivative; for t use :meth:`d_dt`."""
        if var == "t":
            return self.d_dt()
        if var == "c" and self.K > 0:
            raise ValueError("c-derivative of a transseries with exponential sectors is not defined here")
        return self.map(lambda e: e.diff(var))

    def to_json(self) -> dict:
        return {str(k): s.to_json() for k, s in self.sectors.items()}

    def __repr__(self):
        return f"Transseries(K={self.K}, orders={self.orders()})"

