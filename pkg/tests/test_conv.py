from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from fracdhk.catalog import example52, random_piecewise
from fracdhk.conv import BVFunction, bv_norm, convolve, holder_bound, restrict, stieltjes_pair
from fracdhk.core import RepDistribution, alexiewicz_norm, raise_order, reduce_order
from fracdhk.errors import OrderTooHigh
from fracdhk.ops import frac_integral_left
from fracdhk.primitives import Interval, PowerSum
from fracdhk.testfunctions import Bump


def test_bv_norm_examples():
    assert bv_norm(BVFunction.constant(0, 1)) == pytest.approx(2.0)
    assert bv_norm(BVFunction.polynomial_pieces([0, 1], [[0.0, 1.0]])) == pytest.approx(2.0)
    assert bv_norm(BVFunction.constant(0, 1, 0.0)) == 0.0


def test_bv_norm_counts_interior_extrema():
    # sin(2 pi x) on [0, 1]: up 1, down 2, up 1, no end jumps
    g = BVFunction([0, 1], [lambda t: np.sin(2 * np.pi * t)], [lambda t: 2 * np.pi * np.cos(2 * np.pi * t)])
    assert bv_norm(g) == pytest.approx(4.0, abs=1e-12)


def test_hat_variation_and_jumps():
    g = BVFunction.hat(0.2, 0.5, 0.9, 3.0)
    assert g.jumps() == []
    assert bv_norm(g) == pytest.approx(6.0)
    assert g(0.5) == pytest.approx(3.0)


def test_breaks_validation():
    with pytest.raises(ValueError):
        BVFunction([0, 0], [np.sin], [np.cos])
    with pytest.raises(ValueError):
        BVFunction([0, 1, 2], [np.sin], [np.cos])


def test_power_kernel_needs_n_at_least_one():
    with pytest.raises(ValueError):
        BVFunction.power_kernel(0.5, 1.0)


def test_convolve_constant_window_gives_total_integral(unit):
    f = RepDistribution(1, PowerSum.polynomial(unit, [0, 1, 2]))
    g = BVFunction.constant(-5, 5)
    assert convolve(g, f, 0.5) == pytest.approx(3.0, abs=1e-13)


def test_convolve_step_example_total():
    g = BVFunction.constant(-5, 5)
    want = sum((-1) ** (k + 1) / k for k in range(1, 13))
    assert convolve(g, example52(12).dist, 0.5) == pytest.approx(want, abs=1e-12)
    assert want == pytest.approx(0.6532, abs=1e-4)


def test_convolve_hat_matches_classical(unit):
    f = RepDistribution(1, PowerSum.polynomial(unit, [0, 0, 0.5]))  # f(y) = y
    g = BVFunction.hat(-0.3, 0.1, 0.4)
    for x in (-0.2, 0.15, 0.5, 0.9, 1.3):
        want, _ = quad(lambda y: g(x - y) * y, 0, 1, points=[x - 0.4, x - 0.1, x + 0.3], limit=200)
        assert convolve(g, f, x) == pytest.approx(want, abs=1e-10)


def test_convolve_box_matches_classical(unit):
    f = RepDistribution(1, PowerSum.polynomial(unit, [0, 1, 0, 1]))  # f(y) = 1 + 3 y^2
    g = BVFunction.constant(0.1, 0.35, 2.0)
    for x in np.linspace(-0.2, 1.4, 9):
        want, _ = quad(lambda y: g(x - y) * (1 + 3 * y * y), 0, 1, points=[x - 0.35, x - 0.1], limit=200)
        assert convolve(g, f, x) == pytest.approx(want, abs=1e-10)


def test_convolve_accepts_order_zero_and_rejects_order_two(unit):
    f0 = RepDistribution(0, PowerSum.polynomial(unit, [1.0]))
    g = BVFunction.constant(-5, 5)
    assert convolve(g, f0, 0.3) == pytest.approx(1.0)
    with pytest.raises(OrderTooHigh):
        convolve(g, RepDistribution(2, PowerSum.polynomial(unit, [0, 1])), 0.3)


@pytest.mark.parametrize("seed", range(6))
def test_holder_bound_on_random_pairs(seed):
    rng = np.random.default_rng(seed)
    f = random_piecewise(seed + 100, order=1).dist
    lo = rng.uniform(-0.5, 0.3)
    g = BVFunction.hat(lo, lo + rng.uniform(0.05, 0.4), lo + 0.6, rng.normal())
    x = np.linspace(-0.5, 1.5, 81)
    sup = float(np.max(np.abs(convolve(g, f, x))))
    assert sup <= alexiewicz_norm(f) * bv_norm(g) + 1e-12
    assert holder_bound(f, g) == pytest.approx(2 * alexiewicz_norm(f) * bv_norm(g))


def test_convolution_is_lipschitz_for_bounded_f():
    # box of height 1 against a bounded f: slope of g*f is at most 2 sup|f|
    f = random_piecewise(33, order=1).dist
    x = np.linspace(0, 1, 2001)
    bound = 2 * float(np.max(np.abs(f.rep.to_powersum().derivative()(x[1:-1]))))
    v = convolve(BVFunction.constant(0.0, 0.3), f, np.linspace(-0.2, 1.4, 1601))
    assert np.max(np.abs(np.diff(v))) <= bound * 0.001 + 1e-12


@pytest.mark.parametrize("n", [1.0, 1.05, 1.2, 1.5, 2.5])
def test_power_kernel_convolution_is_fractional_integral(n):
    f = random_piecewise(21, order=1).dist
    g = BVFunction.power_kernel(n, 1.0)
    x = np.linspace(0.05, 1.0, 12)
    conv = convolve(g, f, x) / math.gamma(n)
    vals = reduce_order(frac_integral_left(f, n)).dist.rep(x)
    np.testing.assert_allclose(conv, vals, atol=1e-12)


def test_stieltjes_pair_matches_pairing_for_smooth(unit):
    from fracdhk.core import pair

    f = random_piecewise(4, order=1).dist
    b = Bump(unit, 0.2, 0.8)
    assert stieltjes_pair(f, BVFunction.from_smooth(b)) == pytest.approx(pair(f, b), abs=1e-10)


def test_stieltjes_pair_with_step(unit):
    f = raise_order(RepDistribution(0, PowerSum.polynomial(unit, [0, 1])))  # f(x) = x
    # int_0.25^0.75 x dx
    assert stieltjes_pair(f, BVFunction.constant(0.25, 0.75)) == pytest.approx(0.25, abs=1e-13)


def test_restrict_clips_support():
    g = restrict(BVFunction.hat(-0.5, 0.5, 1.5), Interval(0, 1))
    assert g.support == (0.0, 1.0)
    assert g(0.5) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        restrict(BVFunction.constant(2, 3), Interval(0, 1))
