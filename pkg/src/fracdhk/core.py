"""Distributions as pairs ``(k, G)`` meaning the k-th derivative of a continuous ``G``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import minimize_scalar

from .errors import DerivativeUnavailable, OrderTooHigh
from .primitives import (
    DEFAULT_RESOLUTION,
    ClosedForm,
    GridSamples,
    Interval,
    PiecewisePolynomial,
    PowerSum,
    Primitive,
    Reflected,
)
from .quad import integrate_against
from .testfunctions import SmoothFunction, bump_battery

TOL_EXACT = 1e-8
TOL_GRID = 1e-5
SAMPLE_POINTS = 257
COVERAGE = 0.99


def default_tol(g: Primitive) -> float:
    return TOL_EXACT if g.exact and not isinstance(g, GridSamples) else TOL_GRID


def canonical_rep(g: Primitive) -> Primitive:
    """Same function minus its value at ``a``; the result vanishes at ``a`` exactly."""
    if isinstance(g, PowerSum):
        return g.canonical()
    if isinstance(g, PiecewisePolynomial):
        c0 = g.coeffs[0, 0]
        if c0 == 0.0:
            return g
        co = g.coeffs.copy()
        co[:, 0] -= c0
        co[0, 0] = 0.0
        return PiecewisePolynomial(g.interval, g.breaks, co)
    if isinstance(g, GridSamples):
        v0 = g.values[0]
        if v0 == 0.0:
            return g
        source = g.source
        shifted = None if source is None else (lambda x: source(x) - v0)
        return GridSamples(g.interval, g.values - v0, g.interp, shifted)
    if isinstance(g, ClosedForm):
        v0 = g.value_at_a()
        return g if v0 == 0.0 else g.shifted(v0)
    if isinstance(g, Reflected):
        v0 = g.value_at_a()
        return g if v0 == 0.0 else Reflected(g.base, g.sign, g.offset + v0 / g.sign)
    raise TypeError(f"unsupported primitive {type(g).__name__}")


@dataclass(frozen=True, eq=False)
class RepDistribution:
    """The distribution ``D^order G``; for ``order >= 1`` the representative vanishes at ``a``."""

    order: int
    rep: Primitive

    def __post_init__(self):
        k = int(self.order)
        if k != self.order or k < 0:
            raise ValueError(f"order must be a nonnegative integer, got {self.order}")
        object.__setattr__(self, "order", k)
        if k >= 1:
            object.__setattr__(self, "rep", canonical_rep(self.rep))

    @property
    def interval(self) -> Interval:
        return self.rep.interval

    @property
    def exact(self) -> bool:
        return self.rep.exact

    def __repr__(self):
        return f"RepDistribution(order={self.order}, rep={type(self.rep).__name__})"

    def __add__(self, other: "RepDistribution") -> "RepDistribution":
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "RepDistribution") -> "RepDistribution":
        return combine([(1.0, self), (-1.0, other)])

    def __mul__(self, c: float) -> "RepDistribution":
        return combine([(float(c), self)])

    __rmul__ = __mul__

    def __neg__(self) -> "RepDistribution":
        return combine([(-1.0, self)])


def evaluate(d: RepDistribution, x):
    """Pointwise value of an order-0 distribution."""
    if d.order != 0:
        raise OrderTooHigh("a distribution of order >= 1 has no pointwise values")
    return d.rep(d.interval.check(x))


def pair(d: RepDistribution, psi: SmoothFunction):
    """``<D^k G, psi> = (-1)^k int_a^b G psi^(k)``.

    Integration runs over the support of ``psi`` when it has one and over
    ``[a, b]`` otherwise; boundary terms are not included.
    """
    k = d.order
    if k > psi.max_order:
        raise DerivativeUnavailable(f"need derivative {k}, test function supplies {psi.max_order}")
    span = psi.support
    val = integrate_against(d.rep, lambda t: psi.deriv(k, t), span)
    return -val if k % 2 else val


def _as_exact(g: Primitive) -> PowerSum:
    return g.to_powersum()


def raise_order(d: RepDistribution) -> RepDistribution:
    """``(k, G) -> (k + 1, int_a^x G)``; closed forms are sampled onto a grid first."""
    return RepDistribution(d.order + 1, _as_exact(d.rep).integral())


def raise_to(d: RepDistribution, order: int) -> RepDistribution:
    while d.order < order:
        d = raise_order(d)
    return d


@dataclass(frozen=True)
class Reduction:
    dist: RepDistribution
    reducible: bool
    detail: str = ""

    def __iter__(self):
        return iter((self.dist, self.reducible))


def _richardson(fn, x: np.ndarray, h: float, a: float, b: float) -> np.ndarray:
    """One Richardson step on central differences, one-sided near the ends."""

    def quotient(step):
        out = np.empty(x.shape)
        left = x - step < a
        right = x + step > b
        mid = ~(left | right)
        xm = x[mid]
        out[mid] = (fn(xm + step) - fn(xm - step)) / (2 * step)
        xl = x[left & ~right]
        out[left & ~right] = (-3 * fn(xl) + 4 * fn(xl + step) - fn(xl + 2 * step)) / (2 * step)
        xr = x[right & ~left]
        out[right & ~left] = (3 * fn(xr) - 4 * fn(xr - step) + fn(xr - 2 * step)) / (2 * step)
        return out

    return (4 * quotient(h / 2) - quotient(h)) / 3


def numeric_derivative(g: ClosedForm, h: float | None = None) -> ClosedForm:
    iv = g.interval
    step = h if h is not None else iv.length / (2 * (DEFAULT_RESOLUTION - 1))
    fn = g.fn

    def deriv(x):
        arr = np.asarray(x, dtype=float)
        flat = np.atleast_1d(arr).ravel()
        out = _richardson(fn, flat, step, iv.a, iv.b)
        return out[0] if arr.ndim == 0 else out.reshape(arr.shape)

    return ClosedForm(iv, deriv, (), g.smooth, f"d({g.name})", g.resolution)


def classical_derivative(g: Primitive, tol: float) -> tuple[Primitive | None, str]:
    """``G'`` when ``G`` is numerically C^1, else ``None`` with a reason."""
    if isinstance(g, ClosedForm):
        if g.derivatives:
            rest = tuple(g.derivatives[1:])
            return ClosedForm(g.interval, g.derivatives[0], rest, g.smooth, f"d({g.name})", g.resolution), "analytic"
        iv = g.interval
        x = iv.grid(SAMPLE_POINTS)
        h0 = iv.length / (DEFAULT_RESOLUTION - 1)
        with np.errstate(all="ignore"):
            r1 = _richardson(g.fn, x, h0, iv.a, iv.b)
            r2 = _richardson(g.fn, x, h0 / 2, iv.a, iv.b)
        ok = np.abs(r1 - r2) <= tol * np.maximum(1.0, np.abs(r2))
        frac = float(np.mean(ok & np.isfinite(r2)))
        if frac < COVERAGE:
            return None, f"difference quotients converge at {frac:.1%} of sample points"
        return numeric_derivative(g, h0 / 2), f"difference quotients converge at {frac:.1%} of sample points"
    ps = _as_exact(g)
    dps = ps.derivative()
    scale = max(1.0, float(np.max(np.abs(ps.coefs), initial=0.0)))
    bad = dps.defects(tol * scale)
    if bad:
        xi, beta, c = max(bad, key=lambda t: abs(t[2]))
        kind = "singular power" if beta < 0 else "jump"
        return None, f"{len(bad)} defects, largest {kind} {c:.3g} at x={xi:.6g}"
    return dps.without_defects(tol * scale), "exact"


def reduce_order(d: RepDistribution, tol: float | None = None) -> Reduction:
    """Inverse of :func:`raise_order` when the representative is classically C^1."""
    if d.order < 1:
        raise ValueError("reduce_order needs order >= 1")
    tol = default_tol(d.rep) if tol is None else tol
    deriv, detail = classical_derivative(d.rep, tol)
    if deriv is None:
        return Reduction(d, False, "irreducible: " + detail)
    return Reduction(RepDistribution(d.order - 1, deriv), True, detail)


def reduce_fully(d: RepDistribution, tol: float | None = None) -> RepDistribution:
    while d.order >= 1:
        r = reduce_order(d, tol)
        if not r.reducible:
            break
        d = r.dist
    return d


def combine(terms: Sequence[tuple[float, RepDistribution]]) -> RepDistribution:
    """Linear combination ``sum c_i d_i`` at the largest order among the terms."""
    if not terms:
        raise ValueError("empty combination")
    order = max(d.order for _, d in terms)
    raised = [(float(c), raise_to(d, order)) for c, d in terms]
    reps = [d.rep for _, d in raised]
    if all(not isinstance(g, ClosedForm) for g in reps):
        total = PowerSum.zero(reps[0].interval)
        for c, d in raised:
            total = total + _as_exact(d.rep).scaled(c)
        return RepDistribution(order, total)
    coefs = [c for c, _ in raised]

    def fn(x):
        return sum(c * g(x) for c, g in zip(coefs, reps))

    smooth = all(getattr(g, "smooth", True) for g in reps)
    return RepDistribution(order, ClosedForm(reps[0].interval, fn, (), smooth, "combination"))


def sample(g: Primitive, count: int = DEFAULT_RESOLUTION) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(g, PowerSum):
        return g.sample(count)
    x = g.interval.grid(count)
    return x, g(x)


@dataclass
class EqualityReport:
    equal: bool
    order: int
    residual_sup: float
    pairing_gaps: list[float] = field(default_factory=list)
    pairing_bounds: list[float] = field(default_factory=list)
    tol: float = 0.0

    def __bool__(self):
        return self.equal

    @property
    def max_pairing_gap(self) -> float:
        return max(self.pairing_gaps, default=0.0)

    @property
    def distance(self) -> float:
        """Sup residual and normalised pairing gaps, whichever is larger."""
        scaled = [g / b * self.tol for g, b in zip(self.pairing_gaps, self.pairing_bounds)]
        return max([self.residual_sup, *scaled])

    @property
    def weak_residual(self) -> float:
        """Largest pairing gap relative to its allowed bound, times ``tol``."""
        ratios = [g / b * self.tol for g, b in zip(self.pairing_gaps, self.pairing_bounds)]
        return max(ratios, default=0.0)


def polynomial_residual(diff: np.ndarray, x: np.ndarray, iv: Interval, degree: int) -> np.ndarray:
    """``diff`` minus its least-squares polynomial of degree ``degree`` (none if negative)."""
    if degree < 0:
        return diff
    u = (2 * x - iv.a - iv.b) / iv.length
    coef = C.chebfit(u, diff, degree)
    return diff - C.chebval(u, coef)


def approx_equal(
    d1: RepDistribution,
    d2: RepDistribution,
    battery: Sequence[SmoothFunction] | None = None,
    tol: float | None = None,
) -> EqualityReport:
    """Weak equality test at a common order.

    Equal when ``G1 - G2`` is a polynomial of degree below the common order
    up to ``tol`` in sup norm, and every pairing against the battery agrees
    within ``tol * (1 + ||psi^(k)||_1)``.
    """
    if d1.interval != d2.interval:
        raise ValueError("interval mismatch")
    iv = d1.interval
    battery = bump_battery(iv) if battery is None else list(battery)
    if not battery:
        raise ValueError("battery must be nonempty")
    if tol is None:
        tol = max(default_tol(d1.rep), default_tol(d2.rep))
    k = max(d1.order, d2.order)
    r1, r2 = raise_to(d1, k), raise_to(d2, k)
    x, v1 = sample(r1.rep)
    _, v2 = sample(r2.rep)
    resid = polynomial_residual(v1 - v2, x, iv, k - 1)
    sup = float(np.max(np.abs(resid)))
    gaps, bounds = [], []
    for psi in battery:
        gap = abs(pair(d1, psi) - pair(d2, psi))
        gaps.append(float(gap))
        bounds.append(tol * (1.0 + psi.l1_norm(k)))
    equal = sup <= tol and all(g <= bd for g, bd in zip(gaps, bounds))
    return EqualityReport(bool(equal), k, sup, gaps, bounds, tol)


def alexiewicz_norm(d: RepDistribution, resolution: int = DEFAULT_RESOLUTION) -> float:
    """``sup |G|`` for order 1 (order 0 is raised first)."""
    if d.order == 0:
        d = raise_order(d)
    if d.order >= 2:
        raise OrderTooHigh("the Alexiewicz norm is only defined up to order 1")
    return sup_abs(d.rep, resolution)


def sup_abs(g: Primitive, resolution: int = DEFAULT_RESOLUTION) -> float:
    """``max |g|`` on the interval: grid plus breakpoints, then local refinement."""
    iv = g.interval
    x, v = sample(g, resolution)
    bp = np.asarray(g.breakpoints(), dtype=float)
    bp = bp[(bp > iv.a) & (bp < iv.b)]
    if bp.size and bp.size < 8 * resolution:
        step = iv.length / (resolution - 1)
        off = np.abs((bp - iv.a) / step - np.round((bp - iv.a) / step)) > 1e-9
        if off.any():
            x = np.concatenate([x, bp[off]])
            v = np.concatenate([v, np.asarray(g(bp[off]), dtype=float)])
            order = np.argsort(x)
            x, v = x[order], v[order]
    a = np.abs(v)
    best = float(a.max())
    top = np.argsort(a)[-3:]
    for i in top:
        lo, hi = x[max(i - 1, 0)], x[min(i + 1, x.size - 1)]
        if hi <= lo:
            continue
        res = minimize_scalar(lambda t: -abs(float(g(t))), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, iv.length)})
        best = max(best, -float(res.fun))
    return best
