"""Bounded-variation functions and their convolution with order-one distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import RepDistribution, sup_abs
from .errors import OrderTooHigh
from .primitives import Interval
from .quad import _unit_legendre, integrate_against
from .testfunctions import SmoothFunction

_SCAN = 2049
KERNEL_DEPTH = 40  # halving levels toward each end of a kernel piece
END_FRACTION = 1.0 / 64
END_NODES = 12


@dataclass(frozen=True, eq=False)
class BVFunction:
    """Piecewise-C^1 function on ``[breaks[0], breaks[-1]]``, zero outside.

    ``pieces[i]`` and ``derivs[i]`` are vectorised callables valid on
    ``[breaks[i], breaks[i+1]]``.  Values are right-continuous at interior
    breaks; jumps are measured as right limit minus left limit.
    """

    breaks: np.ndarray
    pieces: Sequence[Callable]
    derivs: Sequence[Callable]

    def __post_init__(self):
        br = np.asarray(self.breaks, dtype=float).ravel()
        if br.size < 2 or np.any(np.diff(br) <= 0):
            raise ValueError("breaks must be strictly increasing")
        if not (len(self.pieces) == len(self.derivs) == br.size - 1):
            raise ValueError("need one piece and one derivative per interval")
        object.__setattr__(self, "breaks", br)

    # construction ---------------------------------------------------------

    @classmethod
    def from_smooth(cls, phi: SmoothFunction) -> "BVFunction":
        lo, hi = phi.span
        return cls([lo, hi], [lambda t: phi.deriv(0, t)], [lambda t: phi.deriv(1, t)])

    @classmethod
    def constant(cls, lo: float, hi: float, value: float = 1.0) -> "BVFunction":
        return cls([lo, hi], [lambda t: np.full(np.shape(t), value)], [lambda t: np.zeros(np.shape(t))])

    @classmethod
    def polynomial_pieces(cls, breaks, coeffs) -> "BVFunction":
        """Piece ``i`` is the polynomial with ascending ``coeffs[i]`` in ``x - breaks[i]``."""
        br = np.asarray(breaks, dtype=float)
        polys = [np.polynomial.Polynomial(c) for c in coeffs]
        pieces = [(lambda t, p=p, x0=x0: p(np.asarray(t) - x0)) for p, x0 in zip(polys, br[:-1])]
        derivs = [(lambda t, p=p.deriv(), x0=x0: p(np.asarray(t) - x0)) for p, x0 in zip(polys, br[:-1])]
        return cls(br, pieces, derivs)

    @classmethod
    def hat(cls, lo: float, peak: float, hi: float, height: float = 1.0) -> "BVFunction":
        up = height / (peak - lo)
        down = height / (hi - peak)
        return cls.polynomial_pieces([lo, peak, hi], [[0.0, up], [height, -down]])

    @classmethod
    def power_kernel(cls, n: float, length: float, side: str = "left") -> "BVFunction":
        """``u ** (n - 1)`` on ``(0, length]`` (or its mirror), zero elsewhere; needs ``n >= 1``."""
        if n < 1:
            raise ValueError("the power kernel has bounded variation only for n >= 1")
        def slope(u):
            u = np.asarray(u, dtype=float)
            if n == 1:
                return np.zeros(u.shape)
            pos = u > 0
            return np.where(pos, (n - 1.0) * np.power(np.where(pos, u, 1.0), n - 2.0), 0.0)

        if side == "left":
            return cls([0.0, length], [lambda u: np.power(np.maximum(u, 0.0), n - 1.0)], [slope])
        return cls(
            [-length, 0.0],
            [lambda u: np.power(np.maximum(-np.asarray(u), 0.0), n - 1.0)],
            [lambda u: -slope(-np.asarray(u, dtype=float))],
        )

    # evaluation -----------------------------------------------------------

    @property
    def support(self) -> tuple[float, float]:
        return (float(self.breaks[0]), float(self.breaks[-1]))

    def _locate(self, x):
        return np.clip(np.searchsorted(self.breaks, x, side="right") - 1, 0, len(self.pieces) - 1)

    def _apply(self, funcs, x):
        arr = np.asarray(x, dtype=float)
        flat = np.atleast_1d(arr).ravel()
        out = np.zeros(flat.shape)
        lo, hi = self.support
        inside = (flat >= lo) & (flat < hi)
        idx = self._locate(flat)
        for i, f in enumerate(funcs):
            sel = inside & (idx == i)
            if sel.any():
                out[sel] = f(flat[sel])
        return out[0] if arr.ndim == 0 else out.reshape(arr.shape)

    def __call__(self, x):
        return self._apply(self.pieces, x)

    def deriv(self, x):
        return self._apply(self.derivs, x)

    def left_limit(self, i: int) -> float:
        """Value at ``breaks[i]`` approached from the left (0 at the first break)."""
        if i == 0:
            return 0.0
        return float(self.pieces[i - 1](np.array([self.breaks[i]]))[0])

    def right_limit(self, i: int) -> float:
        if i == len(self.pieces):
            return 0.0
        return float(self.pieces[i](np.array([self.breaks[i]]))[0])

    def jumps(self) -> list[tuple[float, float]]:
        """``(z, g(z+) - g(z-))`` for every break, including the support ends."""
        out = []
        for i, z in enumerate(self.breaks):
            dz = self.right_limit(i) - self.left_limit(i)
            if dz != 0.0:
                out.append((float(z), dz))
        return out


def _piece_variation(f: Callable, df: Callable, lo: float, hi: float) -> float:
    """Variation of a C^1 piece: split at sign changes of the derivative."""
    t = np.linspace(lo, hi, _SCAN)
    d = np.asarray(df(t), dtype=float)
    cuts = [lo]
    for j in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0):
        try:
            cuts.append(brentq(lambda s: float(df(np.array([s]))[0]), t[j], t[j + 1], xtol=1e-14))
        except ValueError:
            cuts.append(0.5 * (t[j] + t[j + 1]))
    cuts.append(hi)
    cuts = np.asarray(cuts)
    # limits at the piece ends are taken from inside the piece
    vals = np.asarray(f(cuts), dtype=float)
    return float(np.sum(np.abs(np.diff(vals))))


def bv_norm(g: BVFunction) -> float:
    """Total variation including the jumps to the zero extension; ``|g(-inf)| = 0``."""
    total = sum(
        _piece_variation(f, df, lo, hi)
        for f, df, lo, hi in zip(g.pieces, g.derivs, g.breaks[:-1], g.breaks[1:])
    )
    return float(total + sum(abs(dz) for _, dz in g.jumps()))


def _as_order_one(f: RepDistribution) -> RepDistribution:
    if f.order == 0:
        from .core import raise_order

        return raise_order(f)
    if f.order > 1:
        raise OrderTooHigh("convolution with a BV function needs order <= 1")
    return f


def _graded_rule(lo: float, hi: float):
    """Gauss-Legendre nodes on ``[lo, hi]`` graded geometrically toward both ends."""
    levels = 0.5 ** np.arange(KERNEL_DEPTH, 0, -1)
    w = hi - lo
    edges = np.unique(np.concatenate([lo + 0.5 * w * levels, hi - 0.5 * w * levels, [lo, 0.5 * (lo + hi), hi]]))
    z, wt = _unit_legendre(END_NODES)
    width = np.diff(edges)
    return (edges[:-1, None] + width[:, None] * z).ravel(), (width[:, None] * wt).ravel()


def _end_segment(F, piece, slope, xv: float, s: float, t: float) -> float:
    """``int_s^t F(y) g'(x - y) dy`` with the chord of ``F`` integrated by parts.

    Near a kernel end ``g'`` may have an integrable singularity; ``F`` minus
    its chord vanishes at both ends and tames it.
    """
    Fs, Ft = float(F(s)), float(F(t))
    sigma = (Ft - Fs) / (t - s)
    y, w = _graded_rule(s, t)
    chord = Fs + sigma * (y - s)
    body = np.dot(w, (np.asarray(F(y)) - chord) * slope(xv - y))
    ends = -Ft * float(piece(np.array([xv - t]))[0]) + Fs * float(piece(np.array([xv - s]))[0])
    return float(body + ends + sigma * np.dot(w, piece(xv - y)))


def convolve(g: BVFunction, f: RepDistribution, x):
    """``(g * f)(x) = int_a^b g(x - y) f(y) dy`` realised by parts on the primitive ``F``.

    ``g(x - b) F(b) + int_a^b F(y) g'(x - y) dy + sum_j F(x - z_j) * jump_j``
    with the sum over breaks ``z_j`` of ``g`` such that ``x - z_j`` is inside
    ``(a, b)``.  The middle integral runs piece by piece over ``g``; a short
    segment at each end of a piece is handled by :func:`_end_segment`.
    """
    f = _as_order_one(f)
    F = f.rep
    iv = F.interval
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.size)
    jumps = g.jumps()
    for i, xv in enumerate(xs):
        # g(x - y) with y -> b from the left means g at (x - b) from the right
        val = float(g(np.array([xv - iv.b]))[0]) * float(F(iv.b))
        for zlo, zhi, piece, slope in zip(g.breaks[:-1], g.breaks[1:], g.pieces, g.derivs):
            p, q = max(iv.a, xv - zhi), min(iv.b, xv - zlo)
            if q <= p:
                continue
            delta = END_FRACTION * (q - p)
            val += _end_segment(F, piece, slope, xv, p, p + delta)
            val += _end_segment(F, piece, slope, xv, q - delta, q)
            val += float(integrate_against(F, lambda y, xv=xv, sl=slope: sl(xv - y), (p + delta, q - delta)))
        for z, dz in jumps:
            y = xv - z
            if iv.a < y < iv.b:
                val += float(F(y)) * dz
        out[i] = val
    return out[0] if np.ndim(x) == 0 else out.reshape(np.shape(x))


def stieltjes_pair(f: RepDistribution, g: BVFunction) -> float:
    """``int_a^b f g`` for order-one ``f``: ``F(b) g(b-) - int F dg`` over ``[a, b]``."""
    f = _as_order_one(f)
    F = f.rep
    iv = F.interval
    gb = float(g(np.array([np.nextafter(iv.b, -math.inf)]))[0])
    total = float(F(iv.b)) * gb
    span = (max(iv.a, g.support[0]), min(iv.b, g.support[1]))
    if span[1] > span[0]:
        total -= float(integrate_against(F, g.deriv, span, list(g.breaks)))
    for z, dz in g.jumps():
        if iv.a < z < iv.b:
            total -= float(F(z)) * dz
    return total


def holder_bound(f: RepDistribution, g: BVFunction) -> float:
    """``2 ||f||_A ||g||_BV``."""
    f = _as_order_one(f)
    return 2.0 * sup_abs(f.rep) * bv_norm(g)


def restrict(g: BVFunction, iv: Interval) -> BVFunction:
    """``g`` with its support clipped to the interval."""
    lo, hi = max(g.support[0], iv.a), min(g.support[1], iv.b)
    if hi <= lo:
        raise ValueError("support does not meet the interval")
    keep = [i for i in range(len(g.pieces)) if g.breaks[i + 1] > lo and g.breaks[i] < hi]
    br = np.concatenate([[lo], g.breaks[keep[0] + 1 : keep[-1] + 1], [hi]])
    return BVFunction(br, [g.pieces[i] for i in keep], [g.derivs[i] for i in keep])
