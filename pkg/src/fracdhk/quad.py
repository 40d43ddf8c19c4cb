"""Gamma, power-law kernels and weakly singular kernel integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, QuadratureNonConvergence
from .primitives import (
    ClosedForm,
    GridSamples,
    Interval,
    PiecewisePolynomial,
    PowerSum,
    Primitive,
    Reflected,
    powersum_to_piecewise,
)
from .special import gamma, power_rule_factor

__all__ = [
    "FracOrder",
    "Kernel",
    "KernelNorms",
    "gamma",
    "power_rule_factor",
    "kernel_norms",
    "gauss_jacobi",
    "frac_kernel_integral",
    "frac_kernel_integral_right",
    "integrate_against",
]

GJ_START = 16
GJ_MAX = 1024
GJ_ATOL = 1e-12
GJ_RTOL = 1e-9


@dataclass(frozen=True)
class FracOrder:
    n: float
    m: int
    floor_m: int

    @classmethod
    def of(cls, n: float) -> "FracOrder":
        n = float(n)
        if not math.isfinite(n) or n < 0:
            raise DomainError(f"fractional order must be finite and >= 0, got {n}")
        return cls(n, math.ceil(n), math.floor(n))

    @property
    def is_integer(self) -> bool:
        return self.m == self.floor_m


class KernelNorms(NamedTuple):
    l1: float
    bv: float


@dataclass(frozen=True)
class Kernel:
    """``u ** (n - 1)`` on ``(0, b - a]`` (left) or ``(-u) ** (n - 1)`` on ``[a - b, 0)`` (right)."""

    side: str
    order: FracOrder
    interval: Interval

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        s = u if self.side == "left" else -u
        inside = (s > 0) & (s <= self.interval.length)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.power(np.where(inside, s, 1.0), self.order.n - 1.0)
        return np.where(inside, vals, 0.0)


def kernel_norms(k: Kernel) -> KernelNorms:
    n, length = k.order.n, k.interval.length
    if n <= 0:
        return KernelNorms(math.inf, math.inf)
    l1 = length**n / n
    if n < 1:
        return KernelNorms(l1, math.inf)
    start = 1.0 if n == 1 else 0.0
    top = length ** (n - 1.0)
    # jump at 0+, monotone rise, drop back to the zero extension at b - a
    return KernelNorms(l1, start + (top - start) + top)


@lru_cache(maxsize=256)
def gauss_jacobi(count: int, alpha: float, beta: float = 0.0):
    """Nodes and weights for weight ``(1 - u) ** alpha * (1 + u) ** beta`` on [-1, 1]."""
    u, w = roots_jacobi(count, alpha, beta)
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


def _adaptive(evaluate: Callable[[int], np.ndarray], atol: float, rtol: float):
    count = GJ_START
    prev = evaluate(count)
    while count < GJ_MAX:
        count *= 2
        cur = evaluate(count)
        if np.all(np.abs(cur - prev) <= np.maximum(atol, rtol * np.abs(cur))):
            return cur
        prev = cur
    raise QuadratureNonConvergence(f"Gauss-Jacobi did not settle within {GJ_MAX} nodes")


def _jacobi_panel(fn, lo, hi, alpha, atol, rtol, side="left"):
    """``int_lo^hi (hi - t)**alpha fn(t) dt`` (left) or ``(t - lo)**alpha`` (right).

    ``lo`` and ``hi`` are arrays of equal shape; ``fn`` maps an array of
    nodes (last axis) to values.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)

    def evaluate(count):
        if side == "left":
            u, w = gauss_jacobi(count, alpha, 0.0)
        else:
            u, w = gauss_jacobi(count, 0.0, alpha)
        t = lo[..., None] + half[..., None] * (1.0 + u)
        return half ** (alpha + 1.0) * (np.asarray(fn(t)) @ w)

    return _adaptive(evaluate, atol, rtol)


def _panels(g: Primitive):
    """Breakpoints and per-piece analytic extensions of a representative."""
    if isinstance(g, GridSamples):
        g = g.piecewise()
    if isinstance(g, PiecewisePolynomial):
        return g.breaks[:-1], [g.extension(i) for i in range(g.breaks.size - 1)]
    if isinstance(g, PowerSum):
        starts = np.unique(np.concatenate([[g.interval.a], g.shifts]))
        starts = starts[starts < g.interval.b]
        return starts, [g.extension(s) for s in starts]
    return np.array([g.interval.a]), [g]


def _gj_left_point(g: Primitive, n: float, x: float, atol, rtol) -> float:
    a = g.interval.a
    if x <= a:
        return 0.0
    starts, exts = _panels(g)
    total = 0.0
    active = np.flatnonzero(starts < x)
    for pos, i in enumerate(active):
        ext = exts[i]
        lo = np.array([starts[i]])
        hi = np.array([x])
        # panel [p_i, p_{i+1}] as a difference of two kernel integrals ending at x
        val = _jacobi_panel(ext, lo, hi, n - 1.0, atol, rtol)[0]
        if pos + 1 < active.size:
            nxt = starts[active[pos + 1]]
            val -= _jacobi_panel(ext, np.array([nxt]), hi, n - 1.0, atol, rtol)[0]
        total += val
    return total


def frac_kernel_integral(
    g: Primitive,
    n: float,
    x,
    method: str = "auto",
    atol: float = GJ_ATOL,
    rtol: float = GJ_RTOL,
):
    """``(1/Gamma(n)) * int_a^x (x - t)**(n-1) g(t) dt``.

    ``method`` is ``"exact"`` (power-sum closed form; closed-form inputs are
    sampled first), ``"gauss_jacobi"`` (adaptive Jacobi-weight quadrature,
    split at breakpoints) or ``"auto"`` (exact when the backend supports it).
    """
    order = FracOrder.of(n)
    iv = g.interval
    arr = iv.check(x)
    if order.n == 0:
        return g(arr)
    if method == "auto":
        method = "exact" if g.exact else "gauss_jacobi"
    if method == "exact":
        return g.to_powersum().frac_integral(order.n)(arr)
    if method != "gauss_jacobi":
        raise ValueError(f"unknown method {method!r}")
    scale = 1.0 / gamma(order.n)
    xs = np.atleast_1d(arr).ravel()
    if isinstance(g, ClosedForm):
        out = np.zeros(xs.size)
        live = xs > iv.a
        if live.any():
            out[live] = _jacobi_panel(
                g, np.full(live.sum(), iv.a), xs[live], order.n - 1.0, atol, rtol
            )
    else:
        out = np.array([_gj_left_point(g, order.n, xv, atol, rtol) for xv in xs])
    out *= scale
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def frac_kernel_integral_right(
    fn,
    interval: Interval,
    n: float,
    x,
    atol: float = GJ_ATOL,
    rtol: float = GJ_RTOL,
):
    """``(1/Gamma(n)) * int_x^b (t - x)**(n-1) fn(t) dt`` by Gauss-Jacobi.

    ``fn`` is a smooth callable, a smooth :class:`ClosedForm`, or a
    piecewise polynomial (also grid samples and power sums with integer
    exponents), in which case each piece is continued polynomially to ``x``
    and integrated as a difference of two kernel integrals.
    """
    order = FracOrder.of(n)
    arr = interval.check(x)
    if order.n == 0:
        out = np.asarray(fn(arr))
        return out[()] if arr.ndim == 0 else out
    pp = _as_piecewise(fn)
    xs = np.atleast_1d(arr).ravel()
    if pp is not None:
        out = np.array([_gj_right_pieces(pp, order.n, xv, atol, rtol) for xv in xs])
    else:
        out = np.zeros(xs.size, dtype=complex if _is_complex(fn, xs[:1]) else float)
        live = xs < interval.b
        if live.any():
            out[live] = _jacobi_panel(
                fn, xs[live], np.full(live.sum(), interval.b), order.n - 1.0, atol, rtol, side="right"
            )
    out = out / gamma(order.n)
    return out[0] if arr.ndim == 0 else out.reshape(arr.shape)


def _as_piecewise(fn) -> PiecewisePolynomial | None:
    if isinstance(fn, GridSamples):
        return fn.piecewise()
    if isinstance(fn, PiecewisePolynomial):
        return fn
    if isinstance(fn, PowerSum):
        if not fn.is_piecewise_polynomial:
            raise ValueError("direct right-sided quadrature needs integer exponents; use reflection")
        return powersum_to_piecewise(fn)
    if isinstance(fn, ClosedForm) and not fn.smooth:
        raise ValueError("direct right-sided quadrature needs a smooth closed form; use reflection")
    return None


def _gj_right_pieces(pp: PiecewisePolynomial, n: float, x: float, atol, rtol) -> float:
    b = pp.interval.b
    if x >= b:
        return 0.0
    br = pp.breaks
    first = int(np.clip(np.searchsorted(br, x, side="right") - 1, 0, br.size - 2))
    idx = np.arange(first, br.size - 1)
    left = br[idx]
    right = br[idx + 1]
    co = pp.coeffs[idx]

    def piece(t):
        u = t - left[:, None]
        out = np.broadcast_to(co[:, -1:], u.shape).copy()
        for j in range(co.shape[1] - 2, -1, -1):
            out = out * u + co[:, j : j + 1]
        return out

    lo = np.full(idx.size, x)
    upper = _jacobi_panel(piece, lo, right, n - 1.0, atol, rtol, side="right")
    lower_hi = np.maximum(left, x)
    lower = np.zeros(idx.size)
    far = lower_hi > x
    if far.any():
        sub = np.flatnonzero(far)

        def piece_far(t):
            u = t - left[sub, None]
            c = co[sub]
            out = np.broadcast_to(c[:, -1:], u.shape).copy()
            for j in range(c.shape[1] - 2, -1, -1):
                out = out * u + c[:, j : j + 1]
            return out

        lower[sub] = _jacobi_panel(piece_far, lo[sub], lower_hi[sub], n - 1.0, atol, rtol, side="right")
    return float(np.sum(upper - lower))


def _is_complex(fn, probe) -> bool:
    return np.iscomplexobj(np.asarray(fn(probe)))


# --------------------------------------------------------------------------
# products of a representative with a smooth weight

PANEL_NODES = 12
PANELS_PER_SPAN = 96
GRADING_RATIO = 0.2
GRADING_LEVELS = 12
LATTICE_NODES = 8
LATTICE_MIN_SHIFTS = 64


@lru_cache(maxsize=64)
def _unit_legendre(count: int):
    u, w = np.polynomial.legendre.leggauss(count)
    return 0.5 * (u + 1.0), 0.5 * w


@lru_cache(maxsize=256)
def _unit_jacobi(count: int, beta: float):
    """Nodes and weights on [0, 1] for the weight ``z ** beta``."""
    u, w = roots_jacobi(count, 0.0, beta)
    return 0.5 * (u + 1.0), w * 0.5 ** (beta + 1.0)


def _graded_edges(p: float, q: float, depth: int = GRADING_LEVELS) -> np.ndarray:
    w = q - p
    levels = GRADING_RATIO ** np.arange(depth, 0, -1)
    return np.concatenate([[p], p + w * levels, [q]])


def _sub_edges(p: float, q: float, hmax: float, graded: bool, graded_right: bool = False,
               depth: int = GRADING_LEVELS) -> np.ndarray:
    m = max(1, int(math.ceil((q - p) / hmax - 1e-9)))
    edges = np.linspace(p, q, m + 1)
    if graded:
        edges = np.concatenate([_graded_edges(edges[0], edges[1], depth)[:-1], edges[1:]])
    if graded_right:
        tail = edges[-2] + edges[-1] - _graded_edges(edges[-2], edges[-1], depth)[::-1]
        edges = np.concatenate([edges[:-2], tail])
    return edges


def _panel_rule(edges: np.ndarray):
    """Flat nodes and weights of the composite rule on ``edges``."""
    z, w = _unit_legendre(PANEL_NODES)
    width = np.diff(edges)
    t = edges[:-1, None] + width[:, None] * z
    return t.ravel(), (width[:, None] * w).ravel()


def _composite(fn: Callable, edges: np.ndarray):
    t, wt = _panel_rule(edges)
    return np.sum(fn(t) * wt)


def integrate_against(
    g: Primitive,
    weight: Callable,
    span: tuple[float, float] | None = None,
    breaks: Sequence[float] = (),
    graded_ends: bool = False,
    end_depth: int = GRADING_LEVELS,
):
    """``int g(t) * weight(t) dt`` over ``span`` (default the whole interval).

    Panels are split at the shifts of the power-sum form of ``g`` and at the
    extra ``breaks`` of the weight, and graded geometrically toward shifts
    that carry non-integer exponents (and toward both ends of the span when
    ``graded_ends`` is set).  Power sums with a dense uniform lattice of
    shifts use per-cell rules with the singular self term integrated against
    its own Jacobi weight.  ``weight`` may be complex valued.  ``end_depth``
    sets how many geometric levels the end grading uses, for weights with
    integrable singularities at the span ends.
    """
    iv = g.interval
    lo, hi = span if span is not None else (iv.a, iv.b)
    lo, hi = max(lo, iv.a), min(hi, iv.b)
    if hi <= lo:
        return 0.0
    if isinstance(g, Reflected):
        flip = iv.a + iv.b
        inner = integrate_against(
            g.base, lambda s: weight(flip - s), (flip - hi, flip - lo),
            [flip - x for x in breaks], graded_ends, end_depth,
        )
        rest = integrate_against(PowerSum.zero(iv).plus_constant(1.0), weight, (lo, hi), breaks, graded_ends, end_depth)
        return g.sign * (inner - g.offset * rest)
    extra = np.asarray([x for x in breaks if lo < x < hi], dtype=float)
    hmax = (hi - lo) / PANELS_PER_SPAN
    if isinstance(g, ClosedForm) and g.smooth:
        cuts = np.unique(np.concatenate([[lo, hi], extra]))
        edges = [
            _sub_edges(p, q, hmax, graded=(p == iv.a) or (graded_ends and i == 0),
                       graded_right=graded_ends and i == cuts.size - 2,
                       depth=end_depth if graded_ends else GRADING_LEVELS)
            for i, (p, q) in enumerate(zip(cuts[:-1], cuts[1:]))
        ]
        t, wt = (np.concatenate(parts) for parts in zip(*(_panel_rule(e) for e in edges)))
        return np.sum(g(t) * weight(t) * wt)
    ps = g.to_powersum()
    inside = (ps.shifts > lo) & (ps.shifts < hi)
    if extra.size == 0 and not graded_ends and ps.lattice is not None and ps.lattice[1] <= hmax \
            and inside.sum() >= LATTICE_MIN_SHIFTS:
        res = _lattice_integral(ps, weight, lo, hi)
        if res is not None:
            return res
    frac = ps.shifts[ps.exponents != np.round(ps.exponents)]
    cuts = np.unique(np.concatenate([[lo, hi], ps.shifts[inside], extra]))
    # nodes are interior to the panels, so one evaluation of g and of the weight covers all
    nodes, weights = [], []
    for i, (p, q) in enumerate(zip(cuts[:-1], cuts[1:])):
        near = frac[(frac <= p) & (frac >= p - (q - p))]
        edges = _sub_edges(p, q, hmax, graded=near.size > 0 or (graded_ends and i == 0),
                           graded_right=graded_ends and i == cuts.size - 2,
                           depth=end_depth if graded_ends else GRADING_LEVELS)
        t, wt = _panel_rule(edges)
        nodes.append(t)
        weights.append(wt)
    t = np.concatenate(nodes)
    return np.sum(ps(t) * weight(t) * np.concatenate(weights))


def _lattice_integral(ps: PowerSum, weight: Callable, lo: float, hi: float):
    start, step, count = ps.lattice
    iv = ps.interval
    if start != iv.a or abs(start + step * (count - 1) - iv.b) > 1e-12 * max(1.0, iv.length):
        return None
    pos = (ps.shifts - start) / step
    k = np.round(pos)
    if np.any(np.abs(pos - k) > 1e-7):
        return None
    k = k.astype(int)
    first = max(0, int(math.floor((lo - start) / step + 1e-9)))
    last = min(count - 1, int(math.ceil((hi - start) / step - 1e-9)))
    cells = np.arange(first, last)
    if cells.size == 0:
        return 0.0
    left = start + cells * step
    z, w = _unit_legendre(LATTICE_NODES)
    vals = np.empty((cells.size, z.size))
    for q, theta in enumerate(z):
        vals[:, q] = ps.lattice_values(float(theta))[cells]
    total = 0.0
    for beta in np.unique(ps.exponents):
        if beta == round(beta):
            continue
        sel = ps.exponents == beta
        self_c = np.zeros(count)
        np.add.at(self_c, k[sel], ps.coefs[sel])
        c = self_c[cells]
        if not np.any(c):
            continue
        vals -= c[:, None] * (z * step) ** beta
        zj, wj = _unit_jacobi(LATTICE_NODES, float(beta))
        wv = weight(left[:, None] + step * zj)
        total = total + step ** (beta + 1.0) * np.sum(c * (wv @ wj))
    wv = weight(left[:, None] + step * z)
    return total + step * np.sum((vals * wv) @ w)
