"""Reference functions: worked examples and seeded families for the property suites."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import RepDistribution, reduce_order, sup_abs
from .errors import ParameterOutOfRange
from .ops import frac_integral_left
from .primitives import ClosedForm, Interval, PiecewisePolynomial, PowerSum
from .testfunctions import Bump, bump_battery

UNIT = Interval(0.0, 1.0)
FACT_TOL = 1e-9


@dataclass(frozen=True)
class ExactFact:
    quantity: str
    value: float
    oracle: str
    compute: Callable[[], float] = field(repr=False, compare=False)

    def check(self, tol: float = FACT_TOL) -> tuple[bool, float]:
        got = float(self.compute())
        err = abs(got - self.value)
        return bool(err <= tol * max(1.0, abs(self.value))), float(err)


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    dist: RepDistribution
    provenance: str
    exact_facts: tuple[ExactFact, ...] = ()
    smooth: bool = True

    def check_facts(self) -> list[tuple[str, bool, float]]:
        return [(f.quantity, *f.check()) for f in self.exact_facts]


# --------------------------------------------------------------------------
# synthetic families


def monomial(beta: int, iv: Interval = UNIT) -> CatalogEntry:
    """``(x - a) ** beta`` as an order-0 function."""
    d = RepDistribution(0, PowerSum.monomial(iv, float(beta)))
    x = iv.b
    value = math.gamma(beta + 1) / math.gamma(beta + 1.5) * (x - iv.a) ** (beta + 0.5)
    fact = ExactFact(
        f"J^(1/2) at x={x:g}", value, "power rule with math.gamma",
        lambda: frac_integral_left(d, 0.5).rep(x),
    )
    return CatalogEntry(f"monomial:{beta}", d, "synthetic family", (fact,))


def half_power(iv: Interval = UNIT) -> CatalogEntry:
    """``(x - a) ** -1/2`` as the order-1 object over ``2 sqrt(x - a)``."""
    d = RepDistribution(1, PowerSum.monomial(iv, 0.5, 2.0))

    def half_integral_value():
        r = reduce_order(frac_integral_left(d, 0.5))
        return r.dist.rep(0.5 * (iv.a + iv.b)) if r.reducible else math.nan

    fact = ExactFact("J^(1/2) f (constant)", math.sqrt(math.pi), "Beta integral B(1/2, 1/2) = pi",
                     half_integral_value)
    return CatalogEntry("half_power", d, "synthetic family", (fact,), smooth=False)


def constant(value: float = 1.0, iv: Interval = UNIT) -> CatalogEntry:
    d = RepDistribution(0, PowerSum.polynomial(iv, [value]))
    return CatalogEntry(f"constant:{value:g}", d, "synthetic family")


def random_piecewise(seed: int, iv: Interval = UNIT, order: int | None = None) -> CatalogEntry:
    """Seeded continuous piecewise polynomial with 2 to 5 pieces of degree at most 3."""
    rng = np.random.default_rng(seed)
    pieces = int(rng.integers(2, 6))
    inner = np.sort(rng.uniform(0.05, 0.95, pieces - 1))
    breaks = np.concatenate([[iv.a], iv.a + iv.length * inner, [iv.b]])
    deg = int(rng.integers(1, 4))
    coeffs = rng.normal(size=(pieces, deg + 1))
    for i in range(1, pieces):
        width = breaks[i] - breaks[i - 1]
        coeffs[i, 0] = np.polynomial.polynomial.polyval(width, coeffs[i - 1])
    k = seed % 2 if order is None else order
    d = RepDistribution(k, PiecewisePolynomial(iv, breaks, coeffs))
    return CatalogEntry(f"random:{seed}", d, "synthetic family (seeded)")


def bump_entry(index: int, iv: Interval = UNIT) -> CatalogEntry:
    b = bump_battery(iv)[index]
    derivs = tuple((lambda x, j=j: b.deriv(j, x)) for j in range(1, 5))
    g = ClosedForm(iv, lambda x: b.deriv(0, x), derivs, True, f"bump:{index}")
    return CatalogEntry(f"bump:{index}", RepDistribution(0, g), "synthetic family")


# --------------------------------------------------------------------------
# worked examples


def step_breaks(K: int) -> np.ndarray:
    return 1.0 - 2.0 ** -np.arange(K + 1, dtype=float)


def step_values(K: int) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=float)
    return (-1.0) ** (k + 1) * 2.0**k / k


def step_half_integral(x: float, K: int = 12, n: float = 0.5) -> float:
    """``J^n f (x)`` for the K-level step function, summed piece by piece."""
    c = step_breaks(K)
    s = step_values(K)
    total = 0.0
    for k in range(K):
        lo, hi = c[k], min(c[k + 1], x)
        if lo >= x:
            break
        total += s[k] * ((x - lo) ** n - (x - hi) ** n) / n
    return total / math.gamma(n)


def example52(K: int = 12) -> CatalogEntry:
    """Alternating steps ``(-1)^(k+1) 2^k / k`` on ``[1 - 2^-(k-1), 1 - 2^-k)``, zero past level K.

    Represented as order 1 over its piecewise-linear primitive.
    """
    if not 1 <= K <= 40:
        raise ParameterOutOfRange("K must lie in 1..40")
    c = step_breaks(K)
    s = step_values(K)
    iv = UNIT
    breaks = np.concatenate([c, [1.0]]) if c[-1] < 1.0 else c
    slopes = np.concatenate([s, [0.0]])[: breaks.size - 1]
    values = np.concatenate([[0.0], np.cumsum(slopes * np.diff(breaks))])
    pp = PiecewisePolynomial.linear_interpolant(iv, breaks, values)
    d = RepDistribution(1, pp)
    partial = sum((-1) ** (k + 1) / k for k in range(1, K + 1))
    facts = [
        ExactFact("F(1)", partial, "partial alternating harmonic sum", lambda: d.rep(1.0)),
        ExactFact("Alexiewicz norm", 1.0, "maximum of the piecewise-linear primitive at x=1/2",
                  lambda: sup_abs(d.rep)),
    ]
    if K >= 2:
        facts.append(ExactFact(
            "J^(1/2) f (0.6)", step_half_integral(0.6, K), "step-by-step kernel integral",
            lambda: reduce_order(frac_integral_left(d, 0.5)).dist.rep(0.6),
        ))
    return CatalogEntry(f"example52:{K}", d, "worked example", tuple(facts), smooth=False)


def weierstrass(a_param: float = 0.5, b_param: int = 13, terms: int = 30, iv: Interval = UNIT) -> CatalogEntry:
    """Order-1 object over the normalised Weierstrass function ``sum a^j (cos(b^j pi x) - cos(b^j pi a))``."""
    if not 0 < a_param < 1:
        raise ParameterOutOfRange("a_param must lie in (0, 1)")
    if int(b_param) != b_param or b_param % 2 != 1 or b_param < 3:
        raise ParameterOutOfRange("b_param must be an odd integer >= 3")
    if a_param * b_param <= 1 + 1.5 * math.pi:
        raise ParameterOutOfRange("need a_param * b_param > 1 + 3 pi / 2")
    if terms < 20:
        raise ParameterOutOfRange("need at least 20 terms")
    amps = a_param ** np.arange(terms)
    freqs = float(b_param) ** np.arange(terms) * math.pi
    base = np.cos(freqs * iv.a)

    def fn(x):
        x = np.asarray(x, dtype=float)
        return (amps * (np.cos(np.multiply.outer(x, freqs)) - base)).sum(axis=-1)

    name = f"weierstrass:{a_param:g}:{int(b_param)}:{terms}"
    g = ClosedForm(iv, fn, (), False, name)
    d = RepDistribution(1, g)
    bound = 2.0 / (1.0 - a_param)
    facts = (
        ExactFact("F(a)", 0.0, "construction", lambda: d.rep(iv.a)),
        ExactFact("norm within geometric bound", 0.0, "sup |F| <= 2/(1-a)",
                  lambda: max(0.0, sup_abs(d.rep) - bound)),
    )
    return CatalogEntry(name, d, "worked example", facts, smooth=False)


weierstrass_primitive = weierstrass


# --------------------------------------------------------------------------
# lookup


def generators(seed: int = 0, randoms: int = 4, iv: Interval = UNIT) -> list[CatalogEntry]:
    """The standard suite inputs, deterministic in ``seed``; the step example only on [0, 1]."""
    out = [monomial(b, iv) for b in range(4)]
    out.append(half_power(iv))
    out.extend(random_piecewise(seed * 1000 + i, iv) for i in range(randoms))
    out.extend(bump_entry(i, iv) for i in (1, 5))
    if iv == UNIT:
        out.append(example52(12))
    out.append(weierstrass(iv=iv))
    return out


def test_bumps(iv: Interval = UNIT, count: int = 4) -> list[Bump]:
    """Every other bump of the standard battery."""
    return bump_battery(iv)[::2][:count]


def resolve(spec: str, iv: Interval = UNIT) -> CatalogEntry:
    """Entry from a ``name[:param[:param...]]`` string, built on ``iv`` where the entry allows it."""
    name, _, rest = spec.partition(":")
    args = [a for a in rest.split(":") if a] if rest else []
    try:
        if name == "monomial":
            return monomial(int(args[0]) if args else 1, iv)
        if name == "constant":
            return constant(float(args[0]) if args else 1.0, iv)
        if name == "half_power":
            return half_power(iv)
        if name == "random":
            return random_piecewise(int(args[0]) if args else 0, iv)
        if name == "bump":
            return bump_entry(int(args[0]) if args else 0, iv)
        if name == "example52":
            if iv != UNIT:
                raise ParameterOutOfRange("the step example lives on [0, 1]")
            return example52(int(args[0]) if args else 12)
        if name == "weierstrass":
            a = float(args[0]) if len(args) > 0 else 0.5
            b = int(args[1]) if len(args) > 1 else 13
            t = int(args[2]) if len(args) > 2 else 30
            return weierstrass(a, b, t, iv)
    except ParameterOutOfRange:
        raise
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad catalog spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown catalog entry {spec!r}")


def step_printed_formula(x: float) -> float:
    """The closed form printed alongside the step example, evaluated as written.

    On ``(c_{j-1}, c_j)`` it reads
    ``pi^-1/2 [sum_{k<j} (-1)^(k+1)/k + 2 c_{j-1} (-1)^(j+1)/j] x^-1/2 + (-1)^(j+1) 2^(j+1)/(j pi) x^1/2``.
    Kept only to report its disagreement with :func:`step_half_integral`.
    """
    if not 0 < x < 1:
        raise ValueError("x must lie in (0, 1)")
    j = int(math.floor(-math.log2(1.0 - x))) + 1
    c_prev = 1.0 - 2.0 ** -(j - 1)
    head = sum((-1) ** (k + 1) / k for k in range(1, j)) + 2 * c_prev * (-1) ** (j + 1) / j
    return head / math.sqrt(math.pi) * x**-0.5 + (-1) ** (j + 1) * 2 ** (j + 1) / (j * math.pi) * x**0.5
