"""Fourier-side identities for the fractional operators, checked through pairings.

A transform never acts on a distribution here: ``<T^, phi> = <T, phi^>`` and
multiplication by ``eta(s) = 2 pi i s`` is always moved onto the test function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import RepDistribution, pair, raise_order, reduce_fully
from .errors import OrderTooHigh, QuadratureNonConvergence
from .ops import frac_derivative, frac_integral_left
from .primitives import Interval
from .testfunctions import Bump, FunctionList, PolyWeighted, SmoothFunction

MAX_DERIV = 4
NODES = 16
MIN_PANELS = 8
MAX_PANELS = 1024
WAVE_FRACTION = 8
FOURIER_RTOL = 1e-13
OUTER_PANELS = 4
CHEB_DEGREES = (32, 64, 128)
CHEB_TAIL = 1e-15


@dataclass(frozen=True)
class FrequencySymbol:
    """``s -> (2 pi i s) ** power``."""

    power: int = 1

    def __call__(self, s):
        return (2j * math.pi * np.asarray(s, dtype=float)) ** self.power

    def coeffs(self, sign: int = 1) -> list[complex]:
        """Ascending polynomial coefficients of ``(sign * 2 pi i s) ** power``."""
        return [0.0] * self.power + [(sign * 2j * math.pi) ** self.power]


@lru_cache(maxsize=8)
def _legendre(count: int):
    return np.polynomial.legendre.leggauss(count)


def _panel_nodes(lo: float, hi: float, panels: int):
    u, w = _legendre(NODES)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    t = ((edges[:-1] + half)[:, None] + half[:, None] * u).ravel()
    wt = (half[:, None] * w).ravel()
    return t, wt


def _transform(phi: SmoothFunction, s: np.ndarray, deriv: int, panels: int) -> np.ndarray:
    lo, hi = phi.span
    t, wt = _panel_nodes(lo, hi, panels)
    vals = phi(t) * wt * (-2j * math.pi * t) ** deriv
    return np.exp(-2j * math.pi * np.multiply.outer(s, t)) @ vals


def _settle(phi: SmoothFunction, s: np.ndarray, deriv: int, panels: int) -> tuple[int, np.ndarray]:
    coarse = _transform(phi, s, deriv, panels)
    while True:
        if 2 * panels > MAX_PANELS:
            raise QuadratureNonConvergence(f"Fourier quadrature did not settle within {MAX_PANELS} panels")
        panels *= 2
        fine = _transform(phi, s, deriv, panels)
        scale = max(1.0, float(np.max(np.abs(fine))))
        if np.max(np.abs(fine - coarse)) <= FOURIER_RTOL * scale:
            return panels, fine
        coarse = fine


@lru_cache(maxsize=256)
def _panels_for(phi: SmoothFunction, deriv: int, reach: int) -> int:
    # probe frequencies up to ``reach`` once; later calls reuse the panel count
    lo, hi = phi.span
    start = max(MIN_PANELS, int(math.ceil(WAVE_FRACTION * (hi - lo) * reach)))
    probe = np.linspace(-reach, reach, 33)
    return _settle(phi, probe, deriv, start)[0]


def test_fn_fourier(phi: SmoothFunction, s, deriv: int = 0):
    """``d^deriv/ds^deriv phi^(s) = int (-2 pi i t)^deriv phi(t) exp(-2 pi i t s) dt``.

    Composite Gauss-Legendre on the support of ``phi`` with panels no wider
    than an eighth of the shortest wavelength, doubled until two levels agree
    on a probe grid covering the requested frequencies.
    """
    if not 0 <= deriv <= MAX_DERIV:
        raise ValueError(f"deriv must lie in 0..{MAX_DERIV}")
    arr = np.asarray(s, dtype=float)
    flat = np.atleast_1d(arr).ravel()
    reach = max(1, int(math.ceil(float(np.max(np.abs(flat))) if flat.size else 0.0)))
    vals = _transform(phi, flat, deriv, _panels_for(phi, deriv, reach))
    return vals[0] if arr.ndim == 0 else vals.reshape(arr.shape)


def _chebyshev_proxy(fn, lo: float, hi: float):
    """Chebyshev interpolant of a complex entire function, degree doubled until the tail is negligible."""
    for deg in CHEB_DEGREES:
        x = np.polynomial.chebyshev.chebpts1(deg + 1)
        vals = fn(lo + 0.5 * (x + 1.0) * (hi - lo))
        parts = []
        for comp in (vals.real, vals.imag):
            cheb = np.polynomial.Chebyshev.fit(lo + 0.5 * (x + 1.0) * (hi - lo), comp, deg, domain=[lo, hi])
            parts.append(cheb)
        scale = max(1.0, float(np.max(np.abs(vals))))
        tail = max(float(np.max(np.abs(c.coef[-4:]))) for c in parts)
        if tail <= CHEB_TAIL * scale:
            return parts
    return None


@dataclass(frozen=True, eq=False)
class FourierTransformed(SmoothFunction):
    """``phi^`` restricted to ``interval``; not compactly supported there.

    On the interval each derivative is replaced by a Chebyshev interpolant
    accurate to rounding; points outside fall back to direct quadrature.
    """

    base: SmoothFunction
    interval: Interval
    support: tuple[float, float] | None = None
    max_order: int = MAX_DERIV
    _proxies: dict = field(default_factory=dict, init=False, repr=False)

    def _proxy(self, j: int):
        if j not in self._proxies:
            iv = self.interval
            self._proxies[j] = _chebyshev_proxy(lambda s: test_fn_fourier(self.base, s, j), iv.a, iv.b)
        return self._proxies[j]

    def _deriv(self, j, x):
        iv = self.interval
        proxy = self._proxy(j)
        if proxy is None or x.size == 0 or x.min() < iv.a or x.max() > iv.b:
            return test_fn_fourier(self.base, x, j)
        re, im = proxy
        return re(x) + 1j * im(x)


@dataclass(frozen=True, eq=False)
class Derivative(SmoothFunction):
    """``phi^(order)`` as a smooth function in its own right."""

    base: SmoothFunction
    order: int

    @property
    def interval(self) -> Interval:
        return self.base.interval

    @property
    def support(self):
        return self.base.support

    @property
    def max_order(self) -> int:
        return self.base.max_order - self.order

    def _deriv(self, j, x):
        return self.base.deriv(j + self.order, x)


@dataclass(frozen=True, eq=False)
class Shifted(SmoothFunction):
    """``x -> base(x + shift)``, kept on the interval of ``base``."""

    base: SmoothFunction
    shift: float
    support: tuple[float, float] | None = None

    @property
    def interval(self) -> Interval:
        return self.base.interval

    @property
    def max_order(self) -> int:
        return self.base.max_order

    def _deriv(self, j, x):
        return self.base.deriv(j, x + self.shift)


@dataclass(frozen=True, eq=False)
class Mollified(SmoothFunction):
    """``(psi^- * phi^)(x) = int psi(u) phi^(x + u) du`` by nested quadrature."""

    psi: SmoothFunction
    phi: SmoothFunction
    interval: Interval
    support: tuple[float, float] | None = None
    max_order: int = MAX_DERIV
    _nodes: tuple = field(init=False, repr=False)

    def __post_init__(self):
        lo, hi = self.psi.span
        u, w = _panel_nodes(lo, hi, OUTER_PANELS)
        object.__setattr__(self, "_nodes", (u, w * self.psi(u)))

    def _deriv(self, j, x):
        # phi^(x + u) factors as a sum over the inner nodes t of
        # c_t exp(-2 pi i t x) exp(-2 pi i t u); the u-sum is done first
        u, w = self._nodes
        reach = max(1, int(math.ceil(float(np.max(np.abs(x))) + float(np.max(np.abs(u))))))
        lo, hi = self.phi.span
        t, wt = _panel_nodes(lo, hi, _panels_for(self.phi, j, reach))
        c = self.phi(t) * wt * (-2j * math.pi * t) ** j
        inner = np.exp(-2j * math.pi * np.multiply.outer(t, u)) @ w
        return np.exp(-2j * math.pi * np.multiply.outer(x, t)) @ (c * inner)


def fourier_pair(d: RepDistribution, phi: SmoothFunction):
    """``<d^, phi> = <d, phi^>``."""
    return pair(d, FourierTransformed(phi, d.interval))


def _order_one(f: RepDistribution) -> RepDistribution:
    if f.order == 0:
        return raise_order(f)
    if f.order > 1:
        raise OrderTooHigh("the Fourier identities take a distribution of order at most 1")
    return f


def _ceil_order(n: float) -> int:
    # m - 1 < n <= m, the split used by frac_derivative; at integer n the
    # other split would add boundary terms that the non-compact phi^ sees
    return int(math.ceil(n))


@dataclass
class FourierReport:
    n: float
    sides: dict[str, list[complex]]
    skipped: dict[str, str] = field(default_factory=dict)

    @property
    def gaps(self) -> dict[str, float]:
        out = {}
        for key, vals in self.sides.items():
            arr = np.asarray(vals, dtype=complex)
            out[key] = float(np.max(np.abs(arr[:, None] - arr[None, :])))
        return out

    @property
    def max_gap(self) -> float:
        return max(self.gaps.values(), default=0.0)


def prop1_check(f: RepDistribution, n: float, phi: SmoothFunction, ks=(1, 2)) -> FourierReport:
    """Transform of the fractional integral, the derivative and the transform's derivatives.

    * ``<(J^n f)^, phi> = <(J^n F)^, eta phi>``
    * ``<(D^n f)^, phi> = <(J^(m-n) f)^, eta^m phi> = <(J^(m-n) F)^, eta^(m+1) phi>``
    * ``<D^k (J^n f)^, phi> = <J^n f, (-eta)^k phi^>`` for each ``k`` in ``ks``
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    f = _order_one(f)
    F = RepDistribution(0, f.rep)
    iv = f.interval
    sides: dict[str, list[complex]] = {}

    jf = frac_integral_left(f, n)
    jF = frac_integral_left(F, n)
    sides["i"] = [fourier_pair(jf, phi), fourier_pair(jF, PolyWeighted(phi, FrequencySymbol(1).coeffs()))]

    m = _ceil_order(n)
    # unreduced: reduction would drop boundary terms seen by the non-compact phi^
    dn = frac_derivative(f, n)
    jmf = frac_integral_left(f, m - n)
    jmF = frac_integral_left(F, m - n)
    sides["ii"] = [
        fourier_pair(dn, phi),
        fourier_pair(jmf, PolyWeighted(phi, FrequencySymbol(m).coeffs())),
        fourier_pair(jmF, PolyWeighted(phi, FrequencySymbol(m + 1).coeffs())),
    ]

    hat = FourierTransformed(phi, iv)
    for k in ks:
        lhs = (-1) ** k * fourier_pair(jf, Derivative(phi, k))
        rhs = pair(jf, PolyWeighted(hat, FrequencySymbol(k).coeffs(sign=-1)))
        sides[f"iii_k{k}"] = [lhs, rhs]
    return FourierReport(n, sides)


def _eta_psi_phi(psi: SmoothFunction, phi: SmoothFunction, power: int) -> FunctionList:
    sym = FrequencySymbol(power)
    return FunctionList(phi.interval, [lambda t: sym(t) * test_fn_fourier(psi, t, 0) * phi(t)], phi.support)


def prop2_check(
    f: RepDistribution, n: float, psi: SmoothFunction, phi: SmoothFunction, max_order: int = 2
) -> FourierReport:
    """Convolution with a test function on the Fourier side.

    * ``<(psi * J^n f)^, phi> = <(J^n F)^ psi^, eta phi>``
    * ``<(psi * D^n f)^, phi> = <(J^(m-n) F)^ psi^, eta^(m+1) phi>``, run only when
      ``D^n f`` reduces to order ``max_order`` or less.

    Left sides pair against the mollified transform ``psi^- * phi^``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    f = _order_one(f)
    F = RepDistribution(0, f.rep)
    iv = f.interval
    moll = Mollified(psi, phi, iv)
    sides: dict[str, list[complex]] = {}
    skipped: dict[str, str] = {}

    jf = frac_integral_left(f, n)
    jF = frac_integral_left(F, n)
    sides["i"] = [pair(jf, moll), fourier_pair(jF, _eta_psi_phi(psi, phi, 1))]

    dn = frac_derivative(f, n)
    reduced = reduce_fully(dn)
    if reduced.order <= max_order:
        m = _ceil_order(n)
        jmF = frac_integral_left(F, m - n)
        sides["ii"] = [pair(dn, moll), fourier_pair(jmF, _eta_psi_phi(psi, phi, m + 1))]
    else:
        skipped["ii"] = f"D^n f reduces only to order {reduced.order}"
    return FourierReport(n, sides, skipped)


def mollifier_limit(
    f: RepDistribution, n: float, phi: SmoothFunction, center: float, widths=(0.2, 0.1, 0.05)
) -> list[float]:
    """Gaps ``|<(psi_w * J^n f)^, phi> - <J^n f, phi^(. + center)>|`` for unit-mass bumps ``psi_w``.

    Convolving with a unit mass concentrated at ``center`` translates by
    ``center``, so the gaps should shrink with the width.
    """
    f = _order_one(f)
    iv = f.interval
    jf = frac_integral_left(f, n)
    target = pair(jf, Shifted(FourierTransformed(phi, iv), center))
    gaps = []
    for w in widths:
        psi = Bump(iv, center - 0.5 * w, center + 0.5 * w, unit_mass=True)
        gaps.append(float(abs(pair(jf, Mollified(psi, phi, iv)) - target)))
    return gaps
