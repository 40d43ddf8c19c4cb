from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from fracdhk.errors import DomainError
from fracdhk.special import gamma, power_rule_factor


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (5.0, 24.0), (0.5, math.sqrt(math.pi))])
def test_gamma_known_values(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-14)


def test_gamma_matches_mpmath_on_range():
    xs = np.concatenate([np.linspace(0.05, 50, 400), [0.1, 0.3333, 2.5, 10.25, 49.9]])
    worst = max(abs(gamma(x) / float(mpmath.gamma(x)) - 1.0) for x in xs)
    assert worst <= 1e-12


def test_gamma_functional_equation(rng):
    xs = rng.uniform(0.05, 40, 1000)
    rel = np.abs(gamma(xs + 1) / (xs * gamma(xs)) - 1.0)
    assert rel.max() <= 1e-11


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, math.inf, math.nan])
def test_gamma_rejects_nonpositive(bad):
    with pytest.raises(DomainError):
        gamma(bad)


def test_gamma_accepts_arrays():
    out = gamma(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert out.shape == (2, 2)
    np.testing.assert_allclose(out, [[1, 1], [2, 6]], rtol=1e-15)


def test_power_rule_factor_against_beta_integral():
    for beta in (0, 1, 2.5):
        for n in (0.3, 1.0, 2.5):
            # int_0^1 (1-t)^(n-1) t^beta dt / Gamma(n) = Gamma(beta+1)/Gamma(beta+n+1)
            oracle = float(mpmath.beta(beta + 1, n) / mpmath.gamma(n))
            assert power_rule_factor(beta, n) == pytest.approx(oracle, rel=1e-10)
    assert power_rule_factor(3.0, 0) == 1.0
