from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from fracdhk.catalog import example52, random_piecewise
from fracdhk.errors import DomainError, QuadratureNonConvergence
from fracdhk.primitives import ClosedForm, Interval, PiecewisePolynomial, PowerSum
from fracdhk.quad import (
    FracOrder,
    Kernel,
    frac_kernel_integral,
    frac_kernel_integral_right,
    gauss_jacobi,
    integrate_against,
    kernel_norms,
)
from fracdhk.testfunctions import Bump

SQRT_PI = math.sqrt(math.pi)


def test_frac_order_fields():
    o = FracOrder.of(1.5)
    assert (o.m, o.floor_m, o.is_integer) == (2, 1, False)
    assert FracOrder.of(2.0).is_integer and FracOrder.of(2.0).m == 2
    assert FracOrder.of(0).m == 0
    with pytest.raises(DomainError):
        FracOrder.of(-0.1)


@pytest.mark.parametrize(
    "n, l1, bv", [(0.5, 2.0, math.inf), (1.0, 1.0, 2.0), (2.0, 0.5, 2.0)]
)
def test_kernel_norms_examples(unit, n, l1, bv):
    norms = kernel_norms(Kernel("left", FracOrder.of(n), unit))
    assert norms.l1 == pytest.approx(l1)
    assert norms.bv == bv


def test_kernel_rejects_bad_side(unit):
    with pytest.raises(ValueError):
        Kernel("up", FracOrder.of(1), unit)


def test_gauss_jacobi_integrates_weighted_polynomials():
    u, w = gauss_jacobi(8, -0.5)
    for k in range(10):
        with mpmath.workdps(40):
            exact = float(mpmath.quad(lambda t: (1 - t) ** -0.5 * t**k, [-1, 1]))
        assert np.dot(w, u**k) == pytest.approx(exact, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("method", ["exact", "gauss_jacobi"])
def test_kernel_integral_examples(unit, method):
    one = PowerSum.polynomial(unit, [1.0])
    t = PowerSum.polynomial(unit, [0.0, 1.0])
    assert frac_kernel_integral(one, 0.5, 1.0, method=method) == pytest.approx(2 / SQRT_PI, rel=1e-12)
    assert frac_kernel_integral(t, 0.5, 1.0, method=method) == pytest.approx(4 / (3 * SQRT_PI), rel=1e-12)
    # kernel of order one is the plain integral
    assert frac_kernel_integral(t, 1.0, 0.6, method=method) == pytest.approx(0.18, rel=1e-12)


def test_power_rule_both_backends(unit):
    x = np.linspace(0.0, 1.0, 33)
    for beta in (0, 1, 2, 3):
        g = PowerSum.monomial(unit, beta)
        for n in (0.3, 0.5, 1.0, 1.5, 2.5):
            want = math.gamma(beta + 1) / math.gamma(beta + n + 1) * x ** (beta + n)
            scale = np.maximum(np.abs(want), 1e-300)
            for method, tol in (("exact", 1e-8), ("gauss_jacobi", 1e-6)):
                got = frac_kernel_integral(g, n, x, method=method)
                rel = np.abs(got - want) / scale
                assert np.max(rel[x > 0]) <= tol
                assert abs(got[0]) <= 1e-300


def test_exact_and_gauss_jacobi_agree_on_catalog(unit):
    x = np.linspace(0, 1, 21)
    entries = [random_piecewise(s) for s in range(6)] + [example52(6)]
    for e in entries:
        for n in (0.3, 0.5, 1.5):
            ex = frac_kernel_integral(e.dist.rep, n, x, method="exact")
            gj = frac_kernel_integral(e.dist.rep, n, x, method="gauss_jacobi")
            assert np.max(np.abs(ex - gj)) <= 1e-7


def test_gauss_jacobi_smooth_closed_form_against_mpmath(unit):
    g = ClosedForm(unit, np.sin, smooth=True)
    for x in (0.3, 1.0):
        with mpmath.workdps(40):
            want = float(mpmath.quad(lambda t: (x - t) ** -0.7 * mpmath.sin(t), [0, x]) / mpmath.gamma(0.3))
        assert frac_kernel_integral(g, 0.3, x, method="gauss_jacobi") == pytest.approx(want, rel=1e-10)


def test_nonconvergence_raises(unit):
    g = ClosedForm(unit, lambda t: np.sin(400 * t), smooth=True)
    with pytest.raises(QuadratureNonConvergence):
        frac_kernel_integral(g, 0.5, 1.0, method="gauss_jacobi", atol=0.0, rtol=0.0)


def test_nonnegative_input_gives_nonnegative_output(unit):
    g = PiecewisePolynomial.linear_interpolant(unit, [0, 0.3, 0.6, 1], [0, 1, 0, 2])
    x = np.linspace(0, 1, 101)
    for n in (0.4, 1.0, 1.7):
        vals = frac_kernel_integral(g, n, x)
        assert np.all(vals >= 0)
        if n >= 1:
            assert np.all(np.diff(vals) >= -1e-15)


def test_below_order_one_monotonicity_can_fail(unit):
    # the kernel decays in x when n < 1, so a falling input can pull the integral down
    g = PiecewisePolynomial.linear_interpolant(unit, [0, 0.3, 0.6, 1], [0, 1, 0, 2])
    vals = frac_kernel_integral(g, 0.4, np.linspace(0, 1, 101))
    assert np.diff(vals).min() < -1e-3


def test_right_kernel_mirror(unit):
    x = np.linspace(0, 1, 11)
    got = frac_kernel_integral_right(PowerSum.polynomial(unit, [1.0]), unit, 0.5, x)
    np.testing.assert_allclose(got, 2 * np.sqrt(1 - x) / SQRT_PI, atol=1e-13)


def test_integrate_against_matches_mpmath(unit):
    g = PowerSum(unit, [0.0, 0.35], [0.5, 1.3], [1.0, -2.0])
    bump = Bump(unit, 0.2, 0.8)
    got = integrate_against(g, lambda t: bump.deriv(2, t), (0.2, 0.8))
    want = mpmath.quad(
        lambda t: (mpmath.sqrt(t) - 2 * max(t - 0.35, 0) ** 1.3) * bump.deriv(2, float(t)), [0.2, 0.35, 0.8]
    )
    assert got == pytest.approx(float(want), abs=1e-11)


def test_integrate_against_complex_weight(unit):
    g = PowerSum.polynomial(unit, [0.0, 1.0])
    got = integrate_against(g, lambda t: np.exp(2j * np.pi * t))
    assert got == pytest.approx(1 / (2j * np.pi), abs=1e-13)


def test_lattice_and_panel_paths_agree():
    iv = Interval(0.0, 1.0)
    breaks = np.linspace(0, 1, 257)
    vals = np.sin(17 * breaks) * breaks
    pp = PiecewisePolynomial.linear_interpolant(iv, breaks, vals)
    g = pp.to_powersum().frac_integral(0.5)
    bump = Bump(iv, 0.1, 0.9)
    whole = integrate_against(g, bump)
    # an extra break disables the lattice path
    split = integrate_against(g, bump, None, [0.123456])
    assert whole == pytest.approx(split, abs=1e-12)
