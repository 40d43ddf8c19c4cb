"""Riemann-Liouville operators on distributions and their structural identities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .conv import BVFunction
from .core import (
    EqualityReport,
    RepDistribution,
    Reduction,
    approx_equal,
    classical_derivative,
    default_tol,
    raise_to,
    reduce_fully,
    reduce_order,
)
from .errors import NotInCm
from .primitives import ClosedForm, Interval, PowerSum, Primitive, Reflected
from .quad import (
    GJ_ATOL,
    FracOrder,
    _unit_legendre,
    frac_kernel_integral,
    frac_kernel_integral_right,
    gamma,
    integrate_against,
)
from .testfunctions import SmoothFunction

LIMIT_LEVELS = range(5, 21)
OFFSET_PANELS = 32
OFFSET_LEVELS = 48
OFFSET_NODES = 16
OFFSET_CHUNK = 512


def _exact(g: Primitive) -> PowerSum:
    return g.to_powersum()


def _carry(src: Primitive, out: PowerSum, label: str) -> Primitive:
    # results built from rough sampled data stay rough
    if isinstance(src, ClosedForm) and not src.smooth:
        return ClosedForm.rough_image(out, f"{label}({src.name})", src.resolution)
    return out


def frac_integral_left(d: RepDistribution, n: float) -> RepDistribution:
    """``J_a^n``: acts on the representative and keeps the order."""
    order = FracOrder.of(n)
    if order.n == 0:
        return d
    return RepDistribution(d.order, _carry(d.rep, _exact(d.rep).frac_integral(order.n), f"J^{order.n:g}"))


def frac_derivative(d: RepDistribution, n: float) -> RepDistribution:
    """``D_a^n = D^m J_a^(m-n)`` with ``m = ceil(n)``; integer orders skip the kernel."""
    order = FracOrder.of(n)
    if order.n == 0:
        return d
    if order.is_integer:
        return RepDistribution(d.order + order.m, d.rep)
    inner = _exact(d.rep).frac_integral(order.m - order.n)
    return RepDistribution(d.order + order.m, _carry(d.rep, inner, f"J^{order.m - order.n:g}"))


def reflect(d: RepDistribution) -> RepDistribution:
    """Pull back along ``x -> a + b - x``; a k-th derivative picks up ``(-1)^k``."""
    g = d.rep
    sign = -1.0 if d.order % 2 else 1.0
    offset = float(g(g.interval.b)) if d.order else 0.0
    return RepDistribution(d.order, Reflected(g, sign, offset))


def frac_integral_right(d: RepDistribution, n: float, method: str = "reflect") -> RepDistribution:
    """``J_{b-}^n`` by reflection conjugation, or by direct right-kernel quadrature for order 0."""
    order = FracOrder.of(n)
    if order.n == 0:
        return d
    if method == "reflect":
        return reflect(frac_integral_left(reflect(d), order.n))
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    if d.order != 0:
        raise ValueError("direct right-sided quadrature is defined for order-0 inputs")
    g, iv = d.rep, d.interval

    def fn(x):
        return frac_kernel_integral_right(g, iv, order.n, x)

    return RepDistribution(0, ClosedForm(iv, fn, smooth=True, name="right-integral"))


# --------------------------------------------------------------------------
# identity checks


def ftc_check(d: RepDistribution, n: float, battery=None, tol=None) -> EqualityReport:
    """``D^n J^n d`` against ``d``."""
    return approx_equal(frac_derivative(frac_integral_left(d, n), n), d, battery, tol)


def semigroup_check(d: RepDistribution, m: float, n: float, battery=None, tol=None) -> dict:
    """``J^m J^n d`` versus ``J^(m+n) d`` and ``J^n J^m d``.

    Returns the weak reports and, at equal order, the sup-norm gap of the
    representatives.
    """
    mn = frac_integral_left(frac_integral_left(d, n), m)
    nm = frac_integral_left(frac_integral_left(d, m), n)
    direct = frac_integral_left(d, m + n)
    x = d.interval.grid()
    sup = float(np.max(np.abs(mn.rep(x) - direct.rep(x))))
    return {
        "weak": approx_equal(mn, direct, battery, tol),
        "commute": approx_equal(mn, nm, battery, tol),
        "sup": sup,
    }


def linearity_check(d1, d2, c1: float, c2: float, n: float, op: str = "integral", battery=None, tol=None):
    fn = frac_integral_left if op == "integral" else frac_derivative
    lhs = fn(c1 * d1 + c2 * d2, n)
    rhs = c1 * fn(d1, n) + c2 * fn(d2, n)
    return approx_equal(lhs, rhs, battery, tol)


@dataclass
class CompositionReport:
    reports: dict[str, EqualityReport]

    @property
    def equal(self) -> bool:
        return all(r.equal for r in self.reports.values())

    @property
    def max_gap(self) -> float:
        return max((r.max_pairing_gap for r in self.reports.values()), default=0.0)


def derivative_composition_check(g: RepDistribution, n1: float, n2: float, battery=None, tol=None) -> CompositionReport:
    """``D^n1 D^n2 f``, ``D^n2 D^n1 f`` and ``D^(n1+n2) f`` for ``f = J^(n1+n2) g``."""
    f = frac_integral_left(g, n1 + n2)
    a = frac_derivative(frac_derivative(f, n2), n1)
    b = frac_derivative(frac_derivative(f, n1), n2)
    c = frac_derivative(f, n1 + n2)
    return CompositionReport({
        "n1n2~n2n1": approx_equal(a, b, battery, tol),
        "n1n2~sum": approx_equal(a, c, battery, tol),
        "sum~g": approx_equal(c, g, battery, tol),
    })


# --------------------------------------------------------------------------
# boundary values and inversion


def boundary_limit(g: Primitive, j: int, tol: float) -> float:
    """One-sided limit of the j-th classical derivative of ``g`` at ``a``.

    Exact backends read it off the power-sum terms anchored at ``a``; closed
    forms use the geometric sequence ``a + (b - a) 2^-l``.  Raises
    :class:`NotInCm` when the limit does not exist numerically.
    """
    iv = g.interval
    if g.exact:
        ps = _exact(g)
        at_a = ps.shifts == iv.a
        for beta, c in zip(ps.exponents[at_a], ps.coefs[at_a]):
            if beta < j and beta != round(beta) and abs(c) > tol:
                raise NotInCm(f"derivative {j} blows up at a (term with exponent {beta:g})")
        sel = at_a & (ps.exponents == j)
        return float(ps.coefs[sel].sum() * math.factorial(j))
    h = g
    for _ in range(j):
        h, why = classical_derivative(h, tol)
        if h is None:
            raise NotInCm(f"not {j} times differentiable: {why}")
    pts = iv.a + iv.length * 2.0 ** -np.array(list(LIMIT_LEVELS), dtype=float)
    vals = np.asarray(h(pts), dtype=float)
    tail = vals[-4:]
    if not np.all(np.isfinite(tail)) or np.ptp(tail) > 10 * tol * max(1.0, abs(tail[-1])):
        raise NotInCm(f"limit of derivative {j} at a does not settle")
    return float(tail[-1])


@dataclass(frozen=True)
class CorrectionTerm:
    """``coefficient * (x - a) ** exponent`` with ``exponent = n - k_index - 1``."""

    coefficient: float
    exponent: float
    k_index: int

    def __call__(self, x, a: float = 0.0):
        z = np.asarray(x, dtype=float) - a
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.coefficient * np.where(z > 0, np.power(np.where(z > 0, z, 1.0), self.exponent), 0.0)

    def as_distribution(self, iv: Interval) -> RepDistribution:
        """Order 1 over the antiderivative, since the exponent may be below zero."""
        e = self.exponent + 1.0
        return RepDistribution(1, PowerSum.monomial(iv, e, self.coefficient / e))


@dataclass
class InversionResult:
    reconstruction: RepDistribution
    corrections: list[CorrectionTerm]
    check: EqualityReport
    boundary_values: list[float] = field(default_factory=list)


def inversion_with_corrections(d: RepDistribution, n: float, battery=None, tol=None) -> InversionResult:
    """``J^n D^n d`` plus the boundary corrections that restore ``d``.

    Coefficient ``k`` is ``D^(m-k-1) J^(m-n) d`` at ``a`` divided by
    ``Gamma(n - k)``.
    """
    order = FracOrder.of(n)
    if order.is_integer:
        raise ValueError("inversion with corrections needs a non-integer order")
    if d.order > 1:
        raise ValueError("input order must be at most 1")
    tol = default_tol(d.rep) if tol is None else tol
    m = order.m
    phi = frac_integral_left(d, m - order.n)
    for _ in range(phi.order):
        r = reduce_order(phi, tol)
        if not r.reducible:
            raise NotInCm("J^(m-n) d is not a continuous function: " + r.detail)
        phi = r.dist
    values = [boundary_limit(phi.rep, j, tol) for j in range(m)]
    corrections = [
        CorrectionTerm(values[m - k - 1] / gamma(order.n - k), order.n - k - 1.0, k) for k in range(m)
    ]
    # D^n d is read as a function: lower its order before integrating again
    recon = frac_integral_left(reduce_fully(frac_derivative(d, order.n), tol), order.n)
    total = recon
    for c in corrections:
        total = total + c.as_distribution(d.interval)
    return InversionResult(recon, corrections, approx_equal(total, d, battery, tol), values)


# --------------------------------------------------------------------------
# two-term splittings for 0 < n < 1


@dataclass
class SplitReport:
    integral_power: CorrectionTerm
    integral_smooth: RepDistribution
    derivative_power: CorrectionTerm
    derivative_smooth: RepDistribution
    x: np.ndarray
    integral_lhs: np.ndarray
    integral_rhs: np.ndarray
    derivative_lhs: np.ndarray
    derivative_rhs: np.ndarray

    @staticmethod
    def _rel(lhs, rhs):
        return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))))

    @property
    def integral_error(self) -> float:
        return self._rel(self.integral_lhs, self.integral_rhs)

    @property
    def derivative_error(self) -> float:
        return self._rel(self.derivative_lhs, self.derivative_rhs)


def _function_values(d: RepDistribution, x) -> np.ndarray:
    """Point values of an order-1 object whose representative is C^1 on ``(a, b]``."""
    ps = _exact(d.rep)
    for _ in range(d.order):
        ps = ps.derivative()
    return ps(x)


def corollary4_split(F: Primitive, n: float, points: int = 65) -> SplitReport:
    """Split ``J^(1-n) F`` and ``D^n F`` into the ``F(a)`` power term and the part driven by ``f = DF``.

    Left sides are computed directly (Gauss-Jacobi for the integral, exact
    differentiation of ``J^(1-n) F`` for the derivative) on a grid with
    ``x = a`` removed.
    """
    if not 0 < n < 1:
        raise ValueError("the splitting needs 0 < n < 1")
    iv = F.interval
    Fa = float(F(iv.a))
    f = RepDistribution(1, F)  # canonicalisation removes F(a)
    x = iv.grid(points)[1:]
    p_int = CorrectionTerm(Fa / gamma(2.0 - n), 1.0 - n, 0)
    s_int = frac_integral_left(f, 2.0 - n)
    p_der = CorrectionTerm(Fa / gamma(1.0 - n), -n, 0)
    s_der = frac_integral_left(f, 1.0 - n)
    lhs_int = frac_kernel_integral(F, 1.0 - n, x, method="gauss_jacobi")
    rhs_int = p_int(x, iv.a) + _function_values(s_int, x)
    lhs_der = _function_values(frac_derivative(RepDistribution(0, F), n), x)
    rhs_der = p_der(x, iv.a) + _function_values(s_der, x)
    return SplitReport(p_int, s_int, p_der, s_der, x, lhs_int, rhs_int, lhs_der, rhs_der)


# --------------------------------------------------------------------------
# C^n decomposition


@dataclass
class CnDecomposition:
    n: int
    phi: RepDistribution
    coeffs: list[float]
    residual: float


def cn_decompose(f: Primitive, n: int, tol: float | None = None) -> CnDecomposition:
    """``f = J^n phi + sum c_k (x - a)^k`` with ``phi = D^n f`` of order 1 and ``c_k = f^(k)(a)/k!``."""
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    tol = default_tol(f) if tol is None else tol
    iv = f.interval
    derivs = [f]
    for j in range(1, n):
        g, why = classical_derivative(derivs[-1], tol)
        if g is None:
            raise NotInCm(f"derivative {j} does not exist classically: {why}")
        derivs.append(g)
    coeffs = []
    for k, g in enumerate(derivs):
        coeffs.append(float(g(iv.a)) / math.factorial(k))
    phi = RepDistribution(1, derivs[-1])
    x = iv.grid()
    top = phi.rep
    if isinstance(top, ClosedForm):
        top = top.to_powersum()
    body = _exact(top).frac_integral(n - 1)(x) if n > 1 else top(x)
    poly = sum(c * (x - iv.a) ** k for k, c in enumerate(coeffs))
    residual = float(np.max(np.abs(body + poly - np.asarray(f(x)))))
    if residual > max(tol, 1e-6) * 10:
        raise NotInCm(f"reconstruction residual {residual:.3g} exceeds tolerance")
    return CnDecomposition(n, phi, coeffs, residual)


# --------------------------------------------------------------------------
# integration by parts


@dataclass
class IBPReport:
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)


def _offset_kernel_integral(fn, lo: float, hi: float, x: np.ndarray, n: float) -> np.ndarray:
    """``int_lo^hi (t - x)^(n-1) fn(t) dt / Gamma(n)`` for every ``x < lo``.

    One panel set serves all ``x``: uniform panels on ``[lo, hi]`` with the
    first one split geometrically toward ``lo``, so each panel is no wider
    than its distance to any ``x`` left of ``lo``.
    """
    h = (hi - lo) / OFFSET_PANELS
    inner = lo + h * 0.5 ** np.arange(OFFSET_LEVELS, 0, -1)
    edges = np.concatenate([[lo], inner, np.linspace(lo + h, hi, OFFSET_PANELS)])
    z, w = _unit_legendre(OFFSET_NODES)
    width = np.diff(edges)
    t = (edges[:-1, None] + width[:, None] * z).ravel()
    fw = np.asarray(fn(t)) * (width[:, None] * w).ravel()
    out = np.empty(x.size)
    for i in range(0, x.size, OFFSET_CHUNK):
        xs = x[i : i + OFFSET_CHUNK]
        out[i : i + OFFSET_CHUNK] = np.power(t[None, :] - xs[:, None], n - 1.0) @ fw
    return out / gamma(n)


def right_integral_of_derivative(phi: BVFunction, iv: Interval, n: float, x) -> np.ndarray:
    """``J_{b-}^n [phi']`` on ``[a, b]``: piece derivatives plus interior jump terms."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(xs.shape)
    for lo, hi, dfn in zip(phi.breaks[:-1], phi.breaks[1:], phi.derivs):
        lo, hi = max(lo, iv.a), min(hi, iv.b)
        if hi <= lo:
            continue
        sub = Interval(iv.a, hi)
        inside = xs < hi
        if not inside.any():
            continue
        near = inside & (xs >= lo)
        if near.any():
            # absolute tolerance follows the size of the slope, or rounding stalls it
            scale = max(1.0, float(np.max(np.abs(dfn(np.linspace(lo, hi, 65))))))
            out[near] += frac_kernel_integral_right(dfn, sub, n, xs[near], atol=GJ_ATOL * scale)
        far = xs < lo
        if far.any():
            out[far] += _offset_kernel_integral(dfn, lo, hi, xs[far], n)
    for z, dz in phi.jumps():
        if iv.a < z < iv.b:
            before = xs < z
            out[before] += dz * np.power(z - xs[before], n - 1.0) / gamma(n)
    return out


def integration_by_parts_check(f: RepDistribution, phi, n: float) -> IBPReport:
    """``int phi J^n f`` against ``int f J_{b-}^n phi`` for order-1 ``f``.

    The left side integrates ``phi`` against ``d(J^n F)`` by parts; the right
    side integrates ``F`` against the derivative of ``J_{b-}^n phi``, which
    is assembled from the right-sided integral of ``phi'`` and the endpoint
    term ``phi(b-) J^n F(b)``.  Jumps of ``phi`` strictly inside the
    interval are not supported on the right side.
    """
    if f.order != 1:
        raise ValueError("integration by parts check needs an order-1 input")
    if isinstance(phi, SmoothFunction):
        phi = BVFunction.from_smooth(phi)
    iv = f.interval
    F = f.rep
    H = _exact(F).frac_integral(n)
    phib = float(phi(np.array([np.nextafter(iv.b, -math.inf)]))[0])
    span = (max(iv.a, phi.support[0]), min(iv.b, phi.support[1]))
    lhs = phib * float(H(iv.b))
    if span[1] > span[0]:
        lhs -= float(integrate_against(H, phi.deriv, span, list(phi.breaks)))
    for z, dz in phi.jumps():
        if iv.a < z < iv.b:
            lhs -= float(H(z)) * dz
    rhs = 0.0
    if phib != 0.0:
        method = "gauss_jacobi" if F.breakpoints().size <= 64 else "exact"
        rhs = phib * float(frac_kernel_integral(F, n, iv.b, method=method))
    interior = [z for z, _ in phi.jumps() if iv.a < z < iv.b]
    if interior:
        raise ValueError("test function jumps inside the interval are not supported")
    rhs -= float(integrate_against(
        F, lambda t: right_integral_of_derivative(phi, iv, n, t.ravel()).reshape(t.shape),
        (iv.a, iv.b), list(phi.breaks), graded_ends=True,
    ))
    return IBPReport(lhs, rhs)
