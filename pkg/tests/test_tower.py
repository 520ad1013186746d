from fractions import Fraction

import pytest

from app import context
from app.context import default_generator_specs, get_tower, primitive_name
from app.utils.errors import (
    DerivationError,
    NumericsError,
    PrimitiveError,
    TowerSpecError,
    TowerZeroDivisionError,
)
from app.utils.tower import GeneratorSpec, TowerElement, differentiate, make_context, normalize


def test_cubic_relation_reduces_powers(tower):
    l0, t, c = tower.gen("l0"), tower.gen("t"), tower.gen("c")
    assert l0 ** 3 == (-t * l0 - c) * Fraction(1, 2)
    assert 2 * l0 ** 3 + t * l0 + c == 0


def test_square_roots_reduce(tower):
    w, q = tower.gen("w"), tower.gen("q")
    assert w * w == tower.parse("6*l0**2 + t")
    assert q ** 4 == w * w


def test_inverse_of_algebraic_elements(tower):
    for text in ("l0", "w", "q", "l0 + w", "6*l0**2 + t", "s - x"):
        e = tower.parse(text)
        assert e * e.inverse() == 1


def test_derivations_respect_relations(tower):
    l0, w, t = tower.gen("l0"), tower.gen("w"), tower.gen("t")
    delta = 6 * l0 * l0 + t
    for var in ("t", "c"):
        assert (2 * w * w.diff(var) - delta.diff(var)).is_zero()
    relation = tower.parse("s**2 - x**2 - 2*l0*x - 3*l0**2 - t")
    assert relation.is_zero()
    s = tower.gen("s")
    for var in ("x", "t", "c"):
        assert 2 * s * s.diff(var) == tower.parse("x**2 + 2*l0*x + 3*l0**2 + t").diff(var)


def test_homogeneity_degrees(tower):
    assert tower.parse("6*l0**2 + t").homogeneity_degree() == Fraction(-2, 3)
    assert tower.gen("q").homogeneity_degree() == Fraction(-1, 6)
    assert tower.parse("t + c").homogeneity_degree() is None


def test_zero_division(tower):
    with pytest.raises(TowerZeroDivisionError):
        tower.zero.inverse()
    with pytest.raises(ZeroDivisionError):
        tower.one / 0


def test_unknown_derivation(tower):
    with pytest.raises(DerivationError):
        tower.gen("l0").diff("eta")


def test_spec_referencing_later_generator():
    specs = [
        GeneratorSpec(name="a", relation="a**2 - b"),
        GeneratorSpec(name="b", relation="b**2 - t"),
    ]
    with pytest.raises(TowerSpecError):
        make_context(specs)


def test_algebraic_generator_needs_relation():
    with pytest.raises(TowerSpecError):
        make_context([GeneratorSpec(name="a")])


def test_primitives_are_write_once():
    tower = make_context(default_generator_specs(1))
    name = primitive_name("P", 1, "tau1")
    integrand = tower.gen("w").inverse()
    tower.bind_primitive(name, integrand, "tau1")
    tower.bind_primitive(name, integrand, "tau1")
    assert tower.gen(name).diff("t") == integrand
    assert tower.gen(name).diff("x").is_zero()
    with pytest.raises(PrimitiveError):
        tower.bind_primitive(name, tower.gen("l0"), "tau1")
    with pytest.raises(PrimitiveError):
        tower.gen(name).inverse()


def test_evaluate_needs_every_symbol(tower):
    delta = tower.parse("6*l0**2 + t")
    assert delta.evaluate({"l0": 1.0, "t": 2.0}) == pytest.approx(8.0)
    with pytest.raises(NumericsError):
        delta.evaluate({"l0": 1.0})


def test_json_snapshot(tower):
    e = tower.parse("w*l0/(t + c) + 3*x")
    assert tower.from_json(tower.to_json(e)) == e


def test_get_tower_requires_init(monkeypatch):
    monkeypatch.setattr(context, "_tower", None)
    with pytest.raises(RuntimeError):
        get_tower()


def test_normalize_reduces_raw_monomials(tower):
    l0, t, c = tower.gen("l0"), tower.gen("t"), tower.gen("c")
    key = list(tower._zero_key)
    key[tower.index("l0")] = 3
    raw = TowerElement(tower, {tuple(key): tower.field.one})
    assert normalize(raw) == (-t * l0 - c) * Fraction(1, 2)
    assert normalize(-l0 - 2 * c / (2 * l0 * l0 + t)) == l0


def test_differentiate(tower):
    l0, w, t = tower.gen("l0"), tower.gen("w"), tower.gen("t")
    delta = 6 * l0 * l0 + t
    assert differentiate(l0, "c") == -delta.inverse()
    assert differentiate(l0, "t") == -l0 / delta
    assert differentiate(w, "t") == (t - 6 * l0 * l0) / (2 * delta * w)
    with pytest.raises(DerivationError):
        differentiate(l0, "y")
