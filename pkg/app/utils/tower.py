"""
Exact differential-field tower.

Elements are sparse polynomials in the registered generators with coefficients
in the rational-function field Q(t, c, x). Algebraic generators are reduced by
their monic relations after every product; transcendental generators (formal
primitives) stay free and are never inverted.
"""

import logging
from fractions import Fraction
from typing import Callable, Dict, List, Literal, Mapping, Optional, Sequence, Tuple

import sympy
from pydantic import BaseModel, ConfigDict, Field
from sympy import QQ
from sympy.polys.fields import field as rational_field

from app.utils.errors import (
    DerivationError,
    NumericsError,
    PrimitiveError,
    TowerSpecError,
    TowerZeroDivisionError,
)

logger = logging.getLogger(__name__)

BASE_VARIABLES = ("t", "c", "x")

# Scaling (x, t, c) -> (r^-1/3 x, r^-2/3 t, r^-1 c)
BASE_WEIGHTS = {"t": Fraction(-2, 3), "c": Fraction(-1), "x": Fraction(-1, 3)}

Monomial = Tuple[int, ...]


class GeneratorSpec(BaseModel):
    """Declaration of one generator of the tower."""

    name: str
    kind: Literal["transcendental", "algebraic"] = "algebraic"
    relation: Optional[str] = Field(
        default=None,
        description="Polynomial in the generator and earlier ones, understood as '= 0'",
    )
    derivatives: Dict[str, str] = Field(default_factory=dict)
    weight: Optional[str] = Field(default=None, description="Homogeneity degree as 'p/q'")


def _fraction_of(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(int(value.numerator), int(value.denominator))


class TowerElement:
    """Immutable element of a :class:`Tower`."""

    __slots__ = ("tower", "terms", "_compiled")

    def __init__(self, tower: "Tower", terms: Dict[Monomial, object]):
        self.tower = tower
        self.terms = terms
        self._compiled = None

    # arithmetic

    def _peer(self, other):
        try:
            return self.tower.coerce(other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._peer(other)
        if other is None:
            return NotImplemented
        return self.tower.add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self.tower.scale(self, -1)

    def __sub__(self, other):
        other = self._peer(other)
        if other is None:
            return NotImplemented
        return self.tower.add(self, -other)

    def __rsub__(self, other):
        other = self._peer(other)
        if other is None:
            return NotImplemented
        return self.tower.add(other, -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.tower.scale(self, other)
        other = self._peer(other)
        if other is None:
            return NotImplemented
        return self.tower.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise TowerZeroDivisionError("division by the rational 0")
            return self.tower.scale(self, 1 / Fraction(other))
        other = self._peer(other)
        if other is None:
            return NotImplemented
        return self * self.tower.inverse(other)

    def __rtruediv__(self, other):
        return self.tower.coerce(other) * self.tower.inverse(self)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("tower elements only admit integer powers")
        if exponent < 0:
            return self.tower.inverse(self) ** (-exponent)
        result = self.tower.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other):
        try:
            other = self.tower.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"TowerElement({self.as_expr()})"

    # calculus and inspection

    def is_zero(self) -> bool:
        return not self.terms

    def diff(self, var: str) -> "TowerElement":
        return self.tower.diff(self, var)

    def inverse(self) -> "TowerElement":
        return self.tower.inverse(self)

    def as_expr(self):
        return self.tower.as_expr(self)

    def homogeneity_degree(self) -> Optional[Fraction]:
        return self.tower.homogeneity_degree(self)

    def involves(self, name: str) -> bool:
        j = self.tower.index(name)
        return any(key[j] for key in self.terms)

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        """Numeric value at a point given by symbol name -> value."""
        if self._compiled is None:
            self._compiled = self.tower.compile(self)
        return self._compiled(values)


class PrimitiveSymbol(BaseModel):
    """A formal antiderivative in t, bound once to its integrand."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    integrand: TowerElement
    basepoint: Literal["tau1", "inf"]


class Tower:
    """
    A tower Q(t, c, x)[g_1, ..., g_m] built from an ordered list of specs.

    Relations and derivative rules are parsed from strings with sympy. A spec
    may only mention base variables, earlier generators and itself.
    """

    def __init__(self, specs: Sequence[GeneratorSpec]):
        self.specs: List[GeneratorSpec] = list(specs)
        self.field, *base = rational_field(",".join(BASE_VARIABLES), QQ)
        self._base = dict(zip(BASE_VARIABLES, base))
        self.names = [spec.name for spec in self.specs]
        if len(set(self.names)) != len(self.names) or set(self.names) & set(BASE_VARIABLES):
            raise TowerSpecError(f"duplicate or reserved generator names in {self.names}")
        self._index = {name: j for j, name in enumerate(self.names)}
        self._zero_key: Monomial = (0,) * len(self.names)
        self._degrees: List[Optional[int]] = []
        self._rules: Dict[int, TowerElement] = {}
        self._derivs: Dict[Tuple[int, str], TowerElement] = {}
        self._weights: Dict[int, Optional[Fraction]] = {}
        self._primitives: Dict[str, PrimitiveSymbol] = {}
        self._reduce_cache: Dict[Monomial, Dict[Monomial, object]] = {}
        self._mono_diff_cache: Dict[Tuple[Monomial, str], TowerElement] = {}
        self._symbols = {name: sympy.Symbol(name) for name in (*BASE_VARIABLES, *self.names)}

        self.zero = TowerElement(self, {})
        self.one = TowerElement(self, {self._zero_key: self.field.one})

        for j, spec in enumerate(self.specs):
            self._register_relation(j, spec)
        for j, spec in enumerate(self.specs):
            for var, text in spec.derivatives.items():
                if var not in BASE_VARIABLES:
                    raise TowerSpecError(f"{spec.name}: unknown derivation variable {var!r}")
                self._derivs[(j, var)] = self._parse(text, allowed=j + 1, owner=spec.name)
        logger.debug(f"Built tower with generators {self.names}")

    # construction

    def _register_relation(self, j: int, spec: GeneratorSpec) -> None:
        self._weights[j] = Fraction(spec.weight) if spec.weight is not None else None
        if spec.kind == "transcendental":
            if spec.relation is not None:
                raise TowerSpecError(f"{spec.name}: transcendental generators carry no relation")
            self._degrees.append(None)
            return
        if spec.relation is None:
            raise TowerSpecError(f"{spec.name}: algebraic generator without relation")
        symbol = self._symbols[spec.name]
        expr = self._sympify(spec.relation, spec.name)
        try:
            poly = sympy.Poly(expr, symbol)
        except sympy.PolynomialError as e:
            raise TowerSpecError(f"{spec.name}: relation is not polynomial in the generator: {e}")
        degree = poly.degree()
        if degree < 2:
            raise TowerSpecError(f"{spec.name}: relation must have degree >= 2, got {degree}")
        # append the degree first so lower-tower arithmetic sees a consistent list
        self._degrees.append(degree)
        coeffs = poly.all_coeffs()[::-1]
        lead = self._parse_expr(coeffs[degree], allowed=j, owner=spec.name)
        if lead.is_zero():
            raise TowerSpecError(f"{spec.name}: relation has a vanishing leading coefficient")
        lead_inv = self.inverse(lead)
        rule = self.zero
        for i in range(degree):
            coeff = self._parse_expr(coeffs[i], allowed=j, owner=spec.name)
            if coeff.is_zero():
                continue
            rule = rule - coeff * lead_inv * self._gen_power(j, i)
        self._rules[j] = rule

    def _sympify(self, text: str, owner: str):
        try:
            return sympy.sympify(text, locals=self._symbols)
        except (sympy.SympifyError, SyntaxError, TypeError) as e:
            raise TowerSpecError(f"{owner}: cannot parse {text!r}: {e}")

    def _parse(self, text: str, allowed: int, owner: str) -> TowerElement:
        return self._parse_expr(self._sympify(text, owner), allowed, owner)

    def _parse_expr(self, expr, allowed: int, owner: str) -> TowerElement:
        if expr.is_Rational:
            return self.const(Fraction(int(expr.p), int(expr.q)))
        if expr.is_Symbol:
            name = expr.name
            if name in self._base:
                return self.base(name)
            j = self._index.get(name)
            if j is None:
                raise TowerSpecError(f"{owner}: unknown symbol {name!r}")
            if j >= allowed:
                raise TowerSpecError(f"{owner}: references later generator {name!r}")
            return self._gen_power(j, 1)
        if expr.is_Add:
            result = self.zero
            for arg in expr.args:
                result = result + self._parse_expr(arg, allowed, owner)
            return result
        if expr.is_Mul:
            result = self.one
            for arg in expr.args:
                result = result * self._parse_expr(arg, allowed, owner)
            return result
        if expr.is_Pow:
            base, exponent = expr.as_base_exp()
            if exponent.is_Integer:
                return self._parse_expr(base, allowed, owner) ** int(exponent)
        raise TowerSpecError(f"{owner}: unsupported expression {expr}")

    # element constructors

    def parse(self, text: str) -> TowerElement:
        """Parse a sympy-readable expression over the whole tower."""
        return self._parse(text, allowed=len(self.names), owner="parse")

    def const(self, value) -> TowerElement:
        if isinstance(value, TowerElement):
            return value
        if isinstance(value, (int, Fraction, sympy.Rational)):
            value = _fraction_of(value)
            if value == 0:
                return self.zero
            return TowerElement(self, {self._zero_key: self.field(QQ(value.numerator, value.denominator))})
        if getattr(value, "field", None) is self.field:
            return TowerElement(self, {self._zero_key: value}) if value else self.zero
        raise TypeError(f"cannot coerce {type(value).__name__} into the tower")

    def coerce(self, value) -> TowerElement:
        if isinstance(value, TowerElement):
            if value.tower is self or value.tower.specs == self.specs:
                return value if value.tower is self else TowerElement(self, value.terms)
            raise TypeError("elements belong to incompatible towers")
        return self.const(value)

    def base(self, name: str) -> TowerElement:
        return TowerElement(self, {self._zero_key: self._base[name]})

    def gen(self, name: str) -> TowerElement:
        if name in self._base:
            return self.base(name)
        return self._gen_power(self.index(name), 1)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise TowerSpecError(f"unknown generator {name!r}")

    def _gen_power(self, j: int, exponent: int) -> TowerElement:
        key = list(self._zero_key)
        key[j] = exponent
        return self._from_terms({tuple(key): self.field.one})

    def _from_terms(self, acc: Dict[Monomial, object]) -> TowerElement:
        terms = {}
        for key, coeff in acc.items():
            if coeff:
                if self._is_reduced(key):
                    terms[key] = terms.get(key, self.field.zero) + coeff
                else:
                    for rkey, rcoeff in self._reduce(key).items():
                        terms[rkey] = terms.get(rkey, self.field.zero) + coeff * rcoeff
        return TowerElement(self, {k: v for k, v in terms.items() if v})

    # ring operations

    def _is_reduced(self, key: Monomial) -> bool:
        for j, degree in enumerate(self._degrees):
            if degree is not None and key[j] >= degree:
                return False
        return True

    def _reduce(self, key: Monomial) -> Dict[Monomial, object]:
        cached = self._reduce_cache.get(key)
        if cached is not None:
            return cached
        acc: Dict[Monomial, object] = {}
        for j in reversed(range(len(self._degrees))):
            degree = self._degrees[j]
            if degree is None or key[j] < degree:
                continue
            lowered = key[:j] + (key[j] - degree,) + key[j + 1:]
            for rkey, rcoeff in self._rules[j].terms.items():
                combined = tuple(a + b for a, b in zip(lowered, rkey))
                for k2, c2 in self._reduce(combined).items():
                    acc[k2] = acc.get(k2, self.field.zero) + rcoeff * c2
            acc = {k: v for k, v in acc.items() if v}
            break
        else:
            acc = {key: self.field.one}
        self._reduce_cache[key] = acc
        return acc

    def add(self, a: TowerElement, b: TowerElement) -> TowerElement:
        if not a.terms:
            return b
        if not b.terms:
            return a
        terms = dict(a.terms)
        for key, coeff in b.terms.items():
            value = terms.get(key)
            value = coeff if value is None else value + coeff
            if value:
                terms[key] = value
            else:
                terms.pop(key, None)
        return TowerElement(self, terms)

    def scale(self, a: TowerElement, factor) -> TowerElement:
        if isinstance(factor, TowerElement):
            return self.mul(a, factor)
        factor = _fraction_of(factor)
        if factor == 0:
            return self.zero
        coeff = self.field(QQ(factor.numerator, factor.denominator))
        return TowerElement(self, {k: v * coeff for k, v in a.terms.items()})

    def mul(self, a: TowerElement, b: TowerElement) -> TowerElement:
        if not a.terms or not b.terms:
            return self.zero
        zero = self.field.zero
        acc: Dict[Monomial, object] = {}
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                coeff = ca * cb
                key = tuple(i + j for i, j in zip(ka, kb))
                if self._is_reduced(key):
                    acc[key] = acc.get(key, zero) + coeff
                else:
                    for rkey, rcoeff in self._reduce(key).items():
                        acc[rkey] = acc.get(rkey, zero) + coeff * rcoeff
        return TowerElement(self, {k: v for k, v in acc.items() if v})

    def _split(self, a: TowerElement, j: int) -> Dict[int, TowerElement]:
        parts: Dict[int, Dict[Monomial, object]] = {}
        for key, coeff in a.terms.items():
            lowered = key[:j] + (0,) + key[j + 1:]
            parts.setdefault(key[j], {})[lowered] = coeff
        return {e: TowerElement(self, terms) for e, terms in parts.items()}

    def inverse(self, a: TowerElement) -> TowerElement:
        if not a.terms:
            raise TowerZeroDivisionError("inverse of an element that normalizes to zero")
        return self._inverse(a, len(self.names))

    def _inverse(self, a: TowerElement, top: int) -> TowerElement:
        for j in reversed(range(top)):
            if not any(key[j] for key in a.terms):
                continue
            degree = self._degrees[j]
            if degree is None:
                raise PrimitiveError(
                    f"cannot invert an element polynomial in the primitive {self.names[j]!r}"
                )
            if degree == 2:
                return self._inverse_quadratic(a, j)
            return self._inverse_linear_system(a, j, degree)
        (key, coeff), = a.terms.items()
        return TowerElement(self, {key: 1 / coeff})

    def _inverse_quadratic(self, a: TowerElement, j: int) -> TowerElement:
        # g^2 = r1 g + r0, the conjugate root is r1 - g
        parts = self._split(a, j)
        low, high = parts.get(0, self.zero), parts.get(1, self.zero)
        rule_parts = self._split(self._rules[j], j)
        r1 = rule_parts.get(1, self.zero)
        conjugate = low + high * r1 - high * self._gen_power(j, 1)
        norm = self.mul(a, conjugate)
        if any(key[j] for key in norm.terms):
            raise TowerSpecError(f"norm over {self.names[j]!r} did not descend")
        if not norm.terms:
            raise TowerZeroDivisionError(f"zero divisor over {self.names[j]!r}")
        return self.mul(conjugate, self._inverse(norm, j))

    def _inverse_linear_system(self, a: TowerElement, j: int, degree: int) -> TowerElement:
        # columns of multiplication-by-a in the basis 1, g, ..., g^(d-1)
        matrix = [[self.zero] * degree for _ in range(degree)]
        for m in range(degree):
            column = self._split(self.mul(a, self._gen_power(j, m)), j)
            for i, entry in column.items():
                matrix[i][m] = entry
        rhs = [self.one] + [self.zero] * (degree - 1)
        for col in range(degree):
            pivot = next((r for r in range(col, degree) if matrix[r][col].terms), None)
            if pivot is None:
                raise TowerZeroDivisionError(f"zero divisor over {self.names[j]!r}")
            matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
            rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
            inv = self._inverse(matrix[col][col], j)
            matrix[col] = [entry * inv for entry in matrix[col]]
            rhs[col] = rhs[col] * inv
            for r in range(degree):
                if r != col and matrix[r][col].terms:
                    factor = matrix[r][col]
                    matrix[r] = [x - factor * y for x, y in zip(matrix[r], matrix[col])]
                    rhs[r] = rhs[r] - factor * rhs[col]
        result = self.zero
        for i, y in enumerate(rhs):
            result = result + y * self._gen_power(j, i)
        return result

    # derivations

    def diff(self, a: TowerElement, var: str) -> TowerElement:
        if var not in self._base:
            raise DerivationError(f"unknown derivation variable {var!r}")
        base_gen = self._base[var]
        result = self.zero
        direct: Dict[Monomial, object] = {}
        for key, coeff in a.terms.items():
            dcoeff = coeff.diff(base_gen)
            if dcoeff:
                direct[key] = dcoeff
            if any(key):
                chain = self._mono_diff(key, var)
                if chain.terms:
                    result = result + self.mul(TowerElement(self, {self._zero_key: coeff}), chain)
        return result + TowerElement(self, direct)

    def _mono_diff(self, key: Monomial, var: str) -> TowerElement:
        cached = self._mono_diff_cache.get((key, var))
        if cached is not None:
            return cached
        result = self.zero
        for j, exponent in enumerate(key):
            if not exponent:
                continue
            rule = self._derivs.get((j, var))
            if rule is None:
                raise DerivationError(f"no {var}-derivative registered for {self.names[j]!r}")
            if not rule.terms:
                continue
            lowered = key[:j] + (exponent - 1,) + key[j + 1:]
            factor = TowerElement(self, {lowered: self.field(exponent)})
            result = result + self.mul(factor, rule)
        self._mono_diff_cache[(key, var)] = result
        return result

    # primitives

    def bind_primitive(self, name: str, integrand: TowerElement, basepoint: str) -> PrimitiveSymbol:
        """Attach the t-derivative of a declared transcendental generator (write once)."""
        j = self.index(name)
        if self._degrees[j] is not None:
            raise PrimitiveError(f"{name!r} is algebraic, not a primitive slot")
        existing = self._primitives.get(name)
        if existing is not None:
            if existing.integrand == integrand and existing.basepoint == basepoint:
                return existing
            raise PrimitiveError(f"primitive {name!r} is already bound to another integrand")
        if integrand.involves(name):
            raise PrimitiveError(f"primitive {name!r} cannot appear in its own integrand")
        symbol = PrimitiveSymbol(name=name, integrand=integrand, basepoint=basepoint)
        self._primitives[name] = symbol
        self._derivs[(j, "t")] = integrand
        self._derivs.setdefault((j, "x"), self.zero)
        degree = integrand.homogeneity_degree()
        self._weights[j] = None if degree is None else degree + BASE_WEIGHTS["t"]
        self._mono_diff_cache.clear()
        logger.debug(f"Bound primitive {name} (basepoint {basepoint})")
        return symbol

    def primitive(self, name: str) -> Optional[PrimitiveSymbol]:
        return self._primitives.get(name)

    # inspection

    def as_expr(self, a: TowerElement):
        expr = sympy.Integer(0)
        for key, coeff in a.terms.items():
            monomial = sympy.Integer(1)
            for j, exponent in enumerate(key):
                if exponent:
                    monomial *= self._symbols[self.names[j]] ** exponent
            expr += coeff.as_expr() * monomial
        return expr

    def _poly_weight(self, poly) -> Optional[Fraction]:
        weight = None
        for monom, _ in poly.terms():
            w = sum((e * BASE_WEIGHTS[v] for e, v in zip(monom, BASE_VARIABLES)), Fraction(0))
            if weight is None:
                weight = w
            elif w != weight:
                return None
        return weight

    def homogeneity_degree(self, a: TowerElement) -> Optional[Fraction]:
        """Scaling degree of a homogeneous element, None if inhomogeneous or zero."""
        degree = None
        for key, coeff in a.terms.items():
            num, den = self._poly_weight(coeff.numer), self._poly_weight(coeff.denom)
            if num is None or den is None:
                return None
            d = num - den
            for j, exponent in enumerate(key):
                if exponent:
                    weight = self._weights.get(j)
                    if weight is None:
                        return None
                    d += exponent * weight
            if degree is None:
                degree = d
            elif d != degree:
                return None
        return degree

    def x_coefficients(self, coeff) -> Tuple[Dict[int, object], Dict[int, object]]:
        """Split numerator and denominator of a field element into powers of x."""
        x_index = BASE_VARIABLES.index("x")

        def split(poly):
            parts: Dict[int, object] = {}
            for monom, value in poly.terms():
                rest = self.field(QQ(value.numerator, value.denominator))
                for k, (e, v) in enumerate(zip(monom, BASE_VARIABLES)):
                    if e and k != x_index:
                        rest = rest * self._base[v] ** e
                parts[monom[x_index]] = parts.get(monom[x_index], self.field.zero) + rest
            return parts

        return split(coeff.numer), split(coeff.denom)

    def compile(self, a: TowerElement) -> Callable[[Mapping[str, complex]], complex]:
        expr = self.as_expr(a)
        names = sorted(str(s) for s in expr.free_symbols)
        fn = sympy.lambdify([self._symbols[n] for n in names], expr, modules="numpy")

        def evaluate(values: Mapping[str, complex]) -> complex:
            try:
                args = [values[n] for n in names]
            except KeyError as e:
                raise NumericsError(f"no numeric value supplied for {e.args[0]!r}")
            return fn(*args)

        return evaluate

    # serialization

    def to_json(self, a: TowerElement) -> dict:
        def encode(poly):
            return {
                ",".join(str(e) for e in monom): f"{value.numerator}/{value.denominator}"
                for monom, value in poly.terms()
            }

        terms = []
        for key in sorted(a.terms):
            coeff = a.terms[key]
            terms.append({
                "generators": {self.names[j]: e for j, e in enumerate(key) if e},
                "numerator": encode(coeff.numer),
                "denominator": encode(coeff.denom),
            })
        return {"terms": terms}

    def from_json(self, data: dict) -> TowerElement:
        ring = self.field.ring

        def decode(mapping):
            coeffs = {}
            for monom, text in mapping.items():
                p, _, q = text.partition("/")
                coeffs[tuple(int(e) for e in monom.split(","))] = QQ(int(p), int(q or 1))
            return self.field(ring.from_dict(coeffs))

        acc: Dict[Monomial, object] = {}
        for term in data["terms"]:
            key = [0] * len(self.names)
            for name, e in term["generators"].items():
                key[self.index(name)] = int(e)
            acc[tuple(key)] = decode(term["numerator"]) / decode(term["denominator"])
        return self._from_terms(acc)

    def spec_json(self) -> List[dict]:
        return [spec.model_dump() for spec in self.specs]


def make_context(generators: Sequence[GeneratorSpec]) -> Tower:
    """Build a tower from an ordered generator list."""
    return Tower(generators)


def normalize(e: TowerElement) -> TowerElement:
    """Canonical representative of e: every monomial reduced by the generator relations."""
    return e.tower._from_terms(dict(e.terms))


def differentiate(e: TowerElement, var: str) -> TowerElement:
    """
    Leibniz/chain-rule derivative of e with respect to t, c or x.

    Raises:
        DerivationError: if var has no registered rule
    """
    return e.tower.diff(e, var)
