"""Smooth functions used as the right argument of pairings."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DerivativeUnavailable, DomainError
from .primitives import Interval

BUMP_MAX_ORDER = 12
BATTERY_SIZE = 8


class SmoothFunction(ABC):
    """A function with derivatives up to ``max_order`` on ``interval``.

    ``support`` is ``None`` when the function is not compactly supported in
    the interval; pairings then integrate over all of ``[a, b]``.
    """

    interval: Interval
    support: tuple[float, float] | None
    max_order: int

    @abstractmethod
    def _deriv(self, j: int, x: np.ndarray) -> np.ndarray: ...

    def deriv(self, j: int, x):
        if j < 0:
            raise ValueError("derivative order must be nonnegative")
        if j > self.max_order:
            raise DerivativeUnavailable(f"{type(self).__name__} supplies derivatives up to {self.max_order}, asked {j}")
        arr = np.asarray(x, dtype=float)
        out = self._deriv(j, np.atleast_1d(arr).ravel())
        return out[0] if arr.ndim == 0 else out.reshape(arr.shape)

    def __call__(self, x):
        return self.deriv(0, x)

    @property
    def span(self) -> tuple[float, float]:
        return self.support if self.support is not None else (self.interval.a, self.interval.b)

    def l1_norm(self, j: int = 0) -> float:
        """``int |f^(j)|`` over the span, by composite Gauss-Legendre."""
        lo, hi = self.span
        u, w = _legendre(16)
        edges = np.linspace(lo, hi, 65)
        half = 0.5 * np.diff(edges)
        t = (edges[:-1] + half)[:, None] + half[:, None] * u
        vals = np.abs(self.deriv(j, t))
        return float(np.sum(half * (vals @ w)))


@lru_cache(maxsize=64)
def _legendre(count: int):
    return np.polynomial.legendre.leggauss(count)


@lru_cache(maxsize=None)
def _bump_polys(order: int) -> tuple[Polynomial, ...]:
    # d^j/du^j exp(-1/(1-u^2)) = P_j(u) / (1-u^2)^(2j) * exp(-1/(1-u^2))
    q = Polynomial([1.0, 0.0, -1.0])
    u = Polynomial([0.0, 1.0])
    polys = [Polynomial([1.0])]
    for j in range(order):
        p = polys[-1]
        polys.append(p.deriv() * q * q + 4 * j * u * q * p - 2 * u * p)
    return tuple(polys)


_BUMP_MASS = 0.44399381616807943  # int_{-1}^{1} exp(-1/(1-u^2)) du


@dataclass(frozen=True, eq=False)
class Bump(SmoothFunction):
    """``scale * exp(-1/(1-u^2))`` with ``u`` the affine image of ``[lo, hi]`` on ``[-1, 1]``.

    ``unit_mass=True`` rescales so that the integral is 1.
    """

    interval: Interval
    lo: float
    hi: float
    scale: float = 1.0
    unit_mass: bool = False
    max_order: int = BUMP_MAX_ORDER

    def __post_init__(self):
        iv = self.interval
        if not (iv.a < self.lo < self.hi < iv.b):
            raise DomainError(f"bump support [{self.lo}, {self.hi}] must sit inside ({iv.a}, {iv.b})")

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def amplitude(self) -> float:
        if self.unit_mass:
            return self.scale / (_BUMP_MASS * 0.5 * (self.hi - self.lo))
        return self.scale

    def _deriv(self, j, x):
        half = 0.5 * (self.hi - self.lo)
        u = (x - self.center) / half
        inside = np.abs(u) < 1.0
        out = np.zeros(x.shape)
        if inside.any():
            ui = u[inside]
            q = 1.0 - ui * ui
            poly = _bump_polys(j)[j]
            log_mag = -1.0 / q - 2.0 * j * np.log(q)
            out[inside] = poly(ui) * np.exp(log_mag)
        return out * (self.amplitude / half**j)


def bump_battery(interval: Interval, count: int = BATTERY_SIZE) -> list[Bump]:
    """Bumps with staggered, overlapping supports covering the interior."""
    a, length = interval.a, interval.length
    out = []
    for i in range(count):
        lo = 0.04 + 0.84 * i / max(count, 1)
        width = 0.14 + 0.03 * (i % 4)
        hi = min(lo + width, 0.97)
        out.append(Bump(interval, a + lo * length, a + hi * length))
    return out


@dataclass(frozen=True, eq=False)
class PolynomialFunction(SmoothFunction):
    """Polynomial in ``x`` (ascending coefficients); not compactly supported."""

    interval: Interval
    coeffs: Sequence[float]
    support: tuple[float, float] | None = None
    max_order: int = 64

    def _deriv(self, j, x):
        p = Polynomial(np.asarray(self.coeffs))
        return p.deriv(j)(x) if j else p(x)


@dataclass(frozen=True, eq=False)
class FunctionList(SmoothFunction):
    """Derivatives supplied as a list of vectorised callables."""

    interval: Interval
    derivatives: Sequence[Callable]
    support: tuple[float, float] | None = None

    @property
    def max_order(self) -> int:
        return len(self.derivatives) - 1

    def _deriv(self, j, x):
        return np.broadcast_to(np.asarray(self.derivatives[j](x)), x.shape)


@dataclass(frozen=True, eq=False)
class PolyWeighted(SmoothFunction):
    """``p(x) * base(x)`` for a (possibly complex) polynomial ``p``; Leibniz rule for derivatives."""

    base: SmoothFunction
    coeffs: Sequence[complex]
    _poly: Polynomial = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_poly", Polynomial(np.asarray(self.coeffs)))

    @property
    def interval(self) -> Interval:
        return self.base.interval

    @property
    def support(self):
        return self.base.support

    @property
    def max_order(self) -> int:
        return self.base.max_order

    def _deriv(self, j, x):
        total = 0
        p = self._poly
        for i in range(j + 1):
            if i > p.degree():
                break
            pi = p.deriv(i)(x) if i else p(x)
            total = total + math.comb(j, i) * pi * self.base.deriv(j - i, x)
        return np.asarray(total) * np.ones(x.shape)


@dataclass(frozen=True, eq=False)
class Combination(SmoothFunction):
    """Finite linear combination of smooth functions on a common interval."""

    parts: Sequence[SmoothFunction]
    weights: Sequence[complex]

    @property
    def interval(self) -> Interval:
        return self.parts[0].interval

    @property
    def support(self):
        sups = [p.support for p in self.parts]
        if any(s is None for s in sups):
            return None
        return (min(s[0] for s in sups), max(s[1] for s in sups))

    @property
    def max_order(self) -> int:
        return min(p.max_order for p in self.parts)

    def _deriv(self, j, x):
        total = 0
        for w, p in zip(self.weights, self.parts):
            total = total + w * p.deriv(j, x)
        return np.asarray(total) * np.ones(x.shape)
