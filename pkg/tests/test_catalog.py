from __future__ import annotations

import math

import numpy as np
import pytest

from fracdhk.catalog import (
    UNIT,
    example52,
    generators,
    half_power,
    monomial,
    random_piecewise,
    resolve,
    step_half_integral,
    step_printed_formula,
    test_bumps as catalog_bumps,
    weierstrass,
)
from fracdhk.errors import ParameterOutOfRange
from fracdhk.primitives import Interval


def test_every_generator_fact_holds():
    for entry in generators(seed=3):
        for quantity, ok, err in entry.check_facts():
            assert ok, (entry.name, quantity, err)


def test_generators_are_deterministic():
    a = [e.name for e in generators(seed=5)]
    b = [e.name for e in generators(seed=5)]
    assert a == b
    x = np.linspace(0, 1, 17)
    for e1, e2 in zip(generators(seed=5), generators(seed=5)):
        np.testing.assert_array_equal(e1.dist.rep(x), e2.dist.rep(x))


def test_generators_off_the_unit_interval_skip_the_step_example():
    iv = Interval(-1.0, 2.0)
    names = [e.name for e in generators(iv=iv)]
    assert not any(n.startswith("example52") for n in names)
    assert all(e.dist.interval == iv for e in generators(iv=iv))


def test_monomial_zero_fact():
    entry = monomial(0)
    assert entry.exact_facts[0].value == pytest.approx(2 / math.sqrt(math.pi))


def test_step_example_facts():
    entry = example52(12)
    assert entry.dist.rep(1.0) == pytest.approx(sum((-1) ** (k + 1) / k for k in range(1, 13)), abs=1e-14)
    assert entry.dist.rep(1.0) == pytest.approx(0.6532, abs=1e-4)
    assert entry.dist.rep(0.5) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ParameterOutOfRange):
        example52(0)


def test_step_half_integral_value():
    assert step_half_integral(0.6) == pytest.approx(0.320779, abs=1e-6)
    # on the first step the function is 2, so J^(1/2) f = 4 sqrt(x) / sqrt(pi)
    assert step_half_integral(0.3) == pytest.approx(4 * math.sqrt(0.3) / math.sqrt(math.pi), abs=1e-14)


def test_printed_step_formula_disagrees_with_direct_integral():
    # the printed closed form is kept only to document the mismatch
    assert step_printed_formula(0.6) == pytest.approx(-0.6220643003, abs=1e-9)
    assert abs(step_printed_formula(0.6) - step_half_integral(0.6)) > 0.5
    with pytest.raises(ValueError):
        step_printed_formula(1.0)


def test_weierstrass_parameters():
    w = weierstrass()
    assert w.dist.rep(0.0) == 0.0
    with pytest.raises(ParameterOutOfRange):
        weierstrass(0.5, 4)
    with pytest.raises(ParameterOutOfRange):
        weierstrass(0.2, 13)
    with pytest.raises(ParameterOutOfRange):
        weierstrass(terms=10)


def test_half_power_is_singular_function():
    d = half_power().dist
    assert d.order == 1
    assert d.rep(0.25) == pytest.approx(1.0)


def test_random_piecewise_is_continuous():
    for seed in range(10):
        g = random_piecewise(seed).dist.rep
        for z in g.breakpoints()[1:-1]:
            assert g(z - 1e-12) == pytest.approx(g(z + 1e-12), abs=1e-9)


def test_resolve():
    assert resolve("monomial:2").name == "monomial:2"
    assert resolve("example52:5").name == "example52:5"
    assert resolve("weierstrass:0.5:13:25").name == "weierstrass:0.5:13:25"
    assert resolve("half_power", Interval(1, 3)).dist.interval == Interval(1, 3)
    with pytest.raises(ValueError):
        resolve("nonsense")
    with pytest.raises(ValueError):
        resolve("monomial:x")
    with pytest.raises(ParameterOutOfRange):
        resolve("example52", Interval(0, 2))


def test_bumps_are_staggered():
    bumps = catalog_bumps(UNIT)
    starts = [b.lo for b in bumps]
    assert starts == sorted(starts) and len(set(starts)) == len(starts)
