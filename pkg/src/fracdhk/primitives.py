"""Continuous representatives on a compact interval.

Every operator in the package acts on a :class:`Primitive`.  Four backends
exist:

* :class:`PowerSum` -- finite sums ``sum c_k (x - xi_k)_+ ** beta_k``.  This
  class is closed under Riemann-Liouville integration, because the power
  rule maps ``(x - xi)_+ ** beta`` to a multiple of ``(x - xi)_+ ** (beta + n)``.
  It is the exact workhorse.
* :class:`PiecewisePolynomial` -- breakpoints plus per-piece coefficients.
* :class:`GridSamples` -- uniform samples with linear or cubic interpolation.
* :class:`ClosedForm` -- an arbitrary vectorised callable.

The first three are exact (they convert to a power sum without error);
closed forms are sampled onto a grid when an exact representation is needed.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.interpolate import CubicSpline

from .special import power_rule_factor

DEFAULT_RESOLUTION = 4097
MAX_DEGREE = 10

_EXPONENT_SNAP = 1e-12
_LATTICE_SLACK = 1e-7
_LATTICE_MIN_TERMS = 32
_CHUNK = 1 << 22
SWEEP_MIN_TERMS = 64  # integer-exponent groups above this size are evaluated piecewise


@dataclass(frozen=True)
class Interval:
    """Compact interval ``[a, b]`` with finite ``a < b``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
            raise ValueError(f"need finite a < b, got [{self.a}, {self.b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    def grid(self, count: int = DEFAULT_RESOLUTION) -> np.ndarray:
        return np.linspace(self.a, self.b, count)

    def reflect(self, x):
        return self.a + self.b - np.asarray(x, dtype=float)

    def check(self, x, slack: float = 1e-12) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        tol = slack * max(1.0, self.length)
        if np.any(arr < self.a - tol) or np.any(arr > self.b + tol):
            raise ValueError(f"point outside [{self.a}, {self.b}]")
        return np.clip(arr, self.a, self.b)


class Primitive(ABC):
    """A continuous, pointwise-evaluable function on an interval."""

    interval: Interval
    exact: ClassVar[bool] = True

    @abstractmethod
    def __call__(self, x): ...

    @abstractmethod
    def to_powersum(self, resolution: int | None = None) -> "PowerSum": ...

    @abstractmethod
    def breakpoints(self) -> np.ndarray: ...

    def value_at_a(self) -> float:
        return float(self(self.interval.a))


def as_powersum(g: Primitive, resolution: int | None = None) -> "PowerSum":
    return g.to_powersum(resolution)


# --------------------------------------------------------------------------
# truncated power sums


def _truncated_power(z: np.ndarray, beta: float) -> np.ndarray:
    if beta == 0.0:
        return (z >= 0.0).astype(float)
    pos = z > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.power(np.where(pos, z, 1.0), beta)
    out = np.where(pos, vals, 0.0)
    if beta < 0.0:
        out = np.where(z == 0.0, np.inf, out)
    return out


def _direct_sum(x: np.ndarray, shifts: np.ndarray, coefs: np.ndarray, beta: float):
    out = np.zeros(x.shape)
    if shifts.size == 0:
        return out
    step = max(1, _CHUNK // shifts.size)
    for lo in range(0, x.size, step):
        z = x[lo : lo + step, None] - shifts[None, :]
        out[lo : lo + step] = _truncated_power(z, beta) @ coefs
    return out


def _local_polynomials(shifts: np.ndarray, coefs: np.ndarray, beta: int):
    """Breaks and per-piece ascending coefficients of ``sum c (x - xi)_+^beta``.

    Sorted shifts are swept left to right; each piece is the previous one
    Taylor-shifted to the new break plus the terms that start there.
    """
    breaks, inv = np.unique(shifts, return_inverse=True)
    fresh = np.bincount(inv, weights=coefs, minlength=breaks.size)
    k = np.arange(beta + 1)
    binom = np.array([[math.comb(int(c), int(r)) if c >= r else 0 for c in k] for r in k], dtype=float)
    out = np.zeros((breaks.size, beta + 1))
    cur = np.zeros(beta + 1)
    for i, xi in enumerate(breaks):
        if i:
            delta = xi - breaks[i - 1]
            powers = np.power(delta, np.maximum(k[None, :] - k[:, None], 0))
            cur = (binom * powers) @ cur
        cur[beta] += fresh[i]
        out[i] = cur
    return breaks, out


def _piecewise_sum(x: np.ndarray, breaks: np.ndarray, local: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(breaks, x, side="right") - 1
    inside = idx >= 0
    j = np.maximum(idx, 0)
    u = x - breaks[j]
    co = local[j]
    out = co[:, -1].copy()
    for c in range(co.shape[1] - 2, -1, -1):
        out = out * u + co[:, c]
    return np.where(inside, out, 0.0)


def _snap_exponents(beta: np.ndarray) -> np.ndarray:
    nearest = np.round(beta)
    return np.where(np.abs(beta - nearest) <= _EXPONENT_SNAP, nearest, beta)


@dataclass(frozen=True, eq=False)
class PowerSum(Primitive):
    """``G(x) = sum_k coefs[k] * (x - shifts[k])_+ ** exponents[k]`` on an interval.

    ``(0)_+ ** 0`` is taken as 1, so zero-exponent terms are right-continuous
    steps.  ``lattice = (start, step, count)`` records that most shifts sit on
    a uniform grid, which enables convolution-based evaluation on that grid.
    """

    interval: Interval
    shifts: np.ndarray
    exponents: np.ndarray
    coefs: np.ndarray
    lattice: tuple[float, float, int] | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    exact: ClassVar[bool] = True

    def __post_init__(self):
        xi = np.asarray(self.shifts, dtype=float).ravel()
        beta = _snap_exponents(np.asarray(self.exponents, dtype=float).ravel())
        c = np.asarray(self.coefs, dtype=float).ravel()
        if not (xi.size == beta.size == c.size):
            raise ValueError("shifts, exponents and coefs must have equal length")
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(beta)) and np.all(np.isfinite(c))):
            raise ValueError("power-sum data must be finite")
        iv = self.interval
        slack = 1e-12 * max(1.0, iv.length)
        if np.any(xi < iv.a - slack) or np.any(xi > iv.b + slack):
            raise ValueError("shifts must lie in the interval")
        xi = np.clip(xi, iv.a, iv.b)
        if xi.size:
            order = np.lexsort((xi, beta))
            xi, beta, c = xi[order], beta[order], c[order]
            new = np.ones(xi.size, dtype=bool)
            new[1:] = (xi[1:] != xi[:-1]) | (beta[1:] != beta[:-1])
            starts = np.flatnonzero(new)
            c = np.add.reduceat(c, starts)
            xi, beta = xi[starts], beta[starts]
            keep = c != 0.0
            xi, beta, c = xi[keep], beta[keep], c[keep]
        object.__setattr__(self, "shifts", xi)
        object.__setattr__(self, "exponents", beta)
        object.__setattr__(self, "coefs", c)

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, interval: Interval) -> "PowerSum":
        return cls(interval, [], [], [])

    @classmethod
    def monomial(cls, interval: Interval, beta: float, coef: float = 1.0) -> "PowerSum":
        """``coef * (x - a) ** beta``."""
        return cls(interval, [interval.a], [beta], [coef])

    @classmethod
    def polynomial(cls, interval: Interval, coeffs: Sequence[float]) -> "PowerSum":
        """Polynomial given by ascending coefficients in ``(x - a)``."""
        c = np.asarray(coeffs, dtype=float)
        return cls(interval, np.full(c.size, interval.a), np.arange(c.size), c)

    def _with_terms(self, shifts, exponents, coefs, lattice="keep") -> "PowerSum":
        lat = self.lattice if lattice == "keep" else lattice
        return PowerSum(self.interval, shifts, exponents, coefs, lat)

    # evaluation -----------------------------------------------------------

    @property
    def n_terms(self) -> int:
        return int(self.coefs.size)

    def _groups(self):
        if not self.coefs.size:
            return
        uniq, inv = np.unique(self.exponents, return_inverse=True)
        for k, beta in enumerate(uniq):
            yield float(beta), np.flatnonzero(inv == k)

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        xs = np.atleast_1d(arr).ravel()
        out = np.zeros(xs.shape)
        for beta, idx in self._groups():
            if idx.size > SWEEP_MIN_TERMS and beta == round(beta) and 0 <= beta <= MAX_DEGREE:
                key = ("sweep", beta)
                if key not in self._cache:
                    self._cache[key] = _local_polynomials(self.shifts[idx], self.coefs[idx], int(beta))
                out += _piecewise_sum(xs, *self._cache[key])
            else:
                out += _direct_sum(xs, self.shifts[idx], self.coefs[idx], beta)
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def _lattice_split(self, idx):
        start, step, count = self.lattice
        pos = (self.shifts[idx] - start) / step
        k = np.round(pos)
        on = (np.abs(pos - k) <= _LATTICE_SLACK) & (k >= 0) & (k < count)
        return k.astype(int), on

    def lattice_nodes(self, theta: float = 0.0) -> np.ndarray:
        start, step, count = self.lattice
        m = count if theta == 0.0 else count - 1
        return start + (np.arange(m) + theta) * step

    def lattice_values(self, theta: float = 0.0) -> np.ndarray:
        """Values at ``start + (i + theta) * step`` for the recorded lattice.

        ``theta`` must lie in ``[0, 1)``; for ``theta > 0`` the points are
        the interior offsets of the ``count - 1`` cells.
        """
        if self.lattice is None:
            raise ValueError("power sum has no lattice")
        if not 0.0 <= theta < 1.0:
            raise ValueError("theta must lie in [0, 1)")
        key = ("lattice", float(theta))
        if key in self._cache:
            return self._cache[key]
        start, step, count = self.lattice
        x = self.lattice_nodes(theta)
        m = x.size
        out = np.zeros(m)
        for beta, idx in self._groups():
            k, on = self._lattice_split(idx)
            if on.sum() >= _LATTICE_MIN_TERMS:
                dense = np.zeros(count)
                np.add.at(dense, k[on], self.coefs[idx][on])
                r = (np.arange(m) + theta) * step
                kernel = _truncated_power(r, beta)
                out += np.convolve(dense, kernel)[:m]
                rest = idx[~on]
            else:
                rest = idx
            if rest.size:
                out += _direct_sum(x, self.shifts[rest], self.coefs[rest], beta)
        out.setflags(write=False)
        self._cache[key] = out
        return out

    def sample(self, count: int = DEFAULT_RESOLUTION) -> tuple[np.ndarray, np.ndarray]:
        """Values on a uniform grid, using the lattice fast path when it matches."""
        if self.lattice is not None:
            start, step, lcount = self.lattice
            iv = self.interval
            if lcount == count and start == iv.a and abs(start + step * (count - 1) - iv.b) <= 1e-12:
                x = self.lattice_nodes()
                return x, self.lattice_values()
        x = self.interval.grid(count)
        return x, self(x)

    # calculus -------------------------------------------------------------

    def frac_integral(self, n: float) -> "PowerSum":
        """Exact left Riemann-Liouville integral of order ``n``."""
        if n < 0:
            raise ValueError("order must be nonnegative")
        if n == 0:
            return self
        factors = np.array([power_rule_factor(b, n) for b in self.exponents])
        return self._with_terms(self.shifts, self.exponents + n, self.coefs * factors)

    def integral(self) -> "PowerSum":
        return self.frac_integral(1.0)

    def derivative(self) -> "PowerSum":
        """Classical derivative away from the shifts; step terms are dropped."""
        keep = self.exponents != 0.0
        beta = self.exponents[keep]
        return self._with_terms(self.shifts[keep], beta - 1.0, self.coefs[keep] * beta)

    def defects(self, tol: float) -> list[tuple[float, float, float]]:
        """Terms that break continuity on ``[a, b]``: steps off ``a``, singular powers."""
        a = self.interval.a
        bad = []
        for xi, beta, c in zip(self.shifts, self.exponents, self.coefs):
            if abs(c) <= tol:
                continue
            if beta < 0.0 or (beta == 0.0 and xi > a):
                bad.append((float(xi), float(beta), float(c)))
        return bad

    def without_defects(self, tol: float) -> "PowerSum":
        a = self.interval.a
        drop = (np.abs(self.coefs) <= tol) & (
            (self.exponents < 0.0) | ((self.exponents == 0.0) & (self.shifts > a))
        )
        return self._with_terms(self.shifts[~drop], self.exponents[~drop], self.coefs[~drop])

    def value_at_a(self) -> float:
        a = self.interval.a
        mask = (self.shifts == a) & (self.exponents == 0.0)
        return float(self.coefs[mask].sum())

    def canonical(self) -> "PowerSum":
        """Drop the constant at ``a`` so that the value at ``a`` is exactly zero."""
        a = self.interval.a
        keep = ~((self.shifts == a) & (self.exponents == 0.0))
        return self._with_terms(self.shifts[keep], self.exponents[keep], self.coefs[keep])

    def scaled(self, factor: float) -> "PowerSum":
        return self._with_terms(self.shifts, self.exponents, self.coefs * float(factor))

    def plus_constant(self, value: float) -> "PowerSum":
        return self + PowerSum(self.interval, [self.interval.a], [0.0], [value])

    def __add__(self, other: "PowerSum") -> "PowerSum":
        if not isinstance(other, PowerSum):
            return NotImplemented
        if other.interval != self.interval:
            raise ValueError("interval mismatch")
        lat = self.lattice or other.lattice
        return PowerSum(
            self.interval,
            np.concatenate([self.shifts, other.shifts]),
            np.concatenate([self.exponents, other.exponents]),
            np.concatenate([self.coefs, other.coefs]),
            lat,
        )

    def __sub__(self, other: "PowerSum") -> "PowerSum":
        return self + other.scaled(-1.0)

    @property
    def is_piecewise_polynomial(self) -> bool:
        return bool(np.all(self.exponents == np.round(self.exponents)) and np.all(self.exponents >= 0))

    def to_powersum(self, resolution: int | None = None) -> "PowerSum":
        return self

    def breakpoints(self) -> np.ndarray:
        return np.unique(self.shifts)

    def extension(self, left: float) -> Callable:
        """Closed formula valid on ``[left, b]`` using only terms with shift <= left."""
        mask = self.shifts <= left
        xi, beta, c = self.shifts[mask], self.exponents[mask], self.coefs[mask]

        def h(t):
            t = np.asarray(t, dtype=float)
            z = np.maximum(t[..., None] - xi, 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = np.where(beta == 0.0, 1.0, np.power(z, beta))
            return vals @ c

        return h


# --------------------------------------------------------------------------
# piecewise polynomials


def _taylor_shift(coeffs: np.ndarray, delta: float) -> np.ndarray:
    """Coefficients of p(u + delta) in powers of u, for ascending ``coeffs``."""
    poly = np.polynomial.Polynomial(coeffs)
    out = np.empty_like(coeffs)
    d = poly
    fact = 1.0
    for j in range(coeffs.size):
        if j:
            fact *= j
            d = d.deriv()
        out[j] = d(delta) / fact
    return out


@dataclass(frozen=True, eq=False)
class PiecewisePolynomial(Primitive):
    """Continuous piecewise polynomial.

    ``coeffs[i]`` holds ascending coefficients of piece ``i`` in the local
    variable ``x - breaks[i]``.
    """

    interval: Interval
    breaks: np.ndarray
    coeffs: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    exact: ClassVar[bool] = True

    def __post_init__(self):
        br = np.asarray(self.breaks, dtype=float).ravel()
        co = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        iv = self.interval
        if br.size < 2 or co.shape[0] != br.size - 1:
            raise ValueError("need len(breaks) == len(coeffs) + 1 >= 2")
        if br[0] != iv.a or br[-1] != iv.b or np.any(np.diff(br) <= 0):
            raise ValueError("breaks must increase from a to b")
        if co.shape[1] - 1 > MAX_DEGREE:
            raise ValueError(f"degree capped at {MAX_DEGREE}")
        if not np.all(np.isfinite(co)):
            raise ValueError("coefficients must be finite")
        for i in range(1, br.size - 1):
            left = P.polyval(br[i] - br[i - 1], co[i - 1])
            right = co[i, 0]
            scale = max(1.0, np.abs(co[i - 1]).max(), abs(right))
            if abs(left - right) > 1e-10 * scale:
                raise ValueError(f"discontinuity at breakpoint {br[i]}: {left} vs {right}")
        object.__setattr__(self, "breaks", br)
        object.__setattr__(self, "coeffs", co)

    @classmethod
    def linear_interpolant(cls, interval: Interval, breaks, values) -> "PiecewisePolynomial":
        br = np.asarray(breaks, dtype=float)
        v = np.asarray(values, dtype=float)
        slopes = np.diff(v) / np.diff(br)
        return cls(interval, br, np.column_stack([v[:-1], slopes]))

    @classmethod
    def from_spline(cls, interval: Interval, spline: CubicSpline) -> "PiecewisePolynomial":
        return cls(interval, spline.x, spline.c[::-1].T.copy())

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        xs = np.atleast_1d(arr).ravel()
        idx = np.clip(np.searchsorted(self.breaks, xs, side="right") - 1, 0, self.coeffs.shape[0] - 1)
        u = xs - self.breaks[idx]
        co = self.coeffs[idx]
        out = co[:, -1].copy()
        for j in range(co.shape[1] - 2, -1, -1):
            out = out * u + co[:, j]
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def breakpoints(self) -> np.ndarray:
        return self.breaks

    def extension(self, i: int) -> Callable:
        left, co = self.breaks[i], self.coeffs[i]
        return lambda t: P.polyval(np.asarray(t, dtype=float) - left, co)

    def _uniform_lattice(self):
        d = np.diff(self.breaks)
        if d.size >= _LATTICE_MIN_TERMS and np.ptp(d) <= 1e-9 * d.mean():
            return (float(self.breaks[0]), float(d.mean()), int(self.breaks.size))
        return None

    def to_powersum(self, resolution: int | None = None) -> PowerSum:
        if "ps" in self._cache:
            return self._cache["ps"]
        deg = self.degree
        js = np.arange(deg + 1)
        shifts = [np.full(deg + 1, self.breaks[0])]
        exps = [js]
        cs = [self.coeffs[0].copy()]
        for i in range(1, self.coeffs.shape[0]):
            prev = _taylor_shift(self.coeffs[i - 1], self.breaks[i] - self.breaks[i - 1])
            cur = self.coeffs[i]
            jump = cur - prev
            scale = np.maximum(np.abs(cur), np.abs(prev))
            jump[np.abs(jump) <= 1e-12 * np.maximum(scale, 1e-300)] = 0.0
            jump[0] = 0.0
            shifts.append(np.full(deg + 1, self.breaks[i]))
            exps.append(js)
            cs.append(jump)
        ps = PowerSum(
            self.interval,
            np.concatenate(shifts),
            np.concatenate(exps).astype(float),
            np.concatenate(cs),
            self._uniform_lattice(),
        )
        self._cache["ps"] = ps
        return ps


# --------------------------------------------------------------------------
# grid samples and closed forms


@dataclass(frozen=True, eq=False)
class GridSamples(Primitive):
    """Uniform-grid samples with linear or cubic (not-a-knot) interpolation.

    ``source`` optionally keeps the function the samples came from, so that
    refinement probes can look below the grid scale.
    """

    interval: Interval
    values: np.ndarray
    interp: str = "linear"
    source: Callable | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    exact: ClassVar[bool] = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size < 2 or not np.all(np.isfinite(v)):
            raise ValueError("need at least two finite samples")
        if self.interp not in ("linear", "cubic"):
            raise ValueError("interp must be 'linear' or 'cubic'")
        if self.interp == "cubic" and v.size < 4:
            raise ValueError("cubic interpolation needs four samples")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def nodes(self) -> np.ndarray:
        return self.interval.grid(self.values.size)

    def piecewise(self) -> PiecewisePolynomial:
        if "pp" not in self._cache:
            if self.interp == "linear":
                pp = PiecewisePolynomial.linear_interpolant(self.interval, self.nodes, self.values)
            else:
                pp = PiecewisePolynomial.from_spline(self.interval, CubicSpline(self.nodes, self.values))
            self._cache["pp"] = pp
        return self._cache["pp"]

    def __call__(self, x):
        if self.interp == "linear":
            arr = np.asarray(x, dtype=float)
            out = np.interp(arr, self.nodes, self.values)
            return float(out) if arr.ndim == 0 else out
        return self.piecewise()(x)

    def to_powersum(self, resolution: int | None = None) -> PowerSum:
        return self.piecewise().to_powersum()

    def breakpoints(self) -> np.ndarray:
        return self.nodes


@dataclass(frozen=True, eq=False)
class ClosedForm(Primitive):
    """A vectorised callable, optionally with analytic derivatives.

    ``smooth`` selects cubic-spline sampling (adaptive up to ``resolution``)
    when an exact representation is requested; rough functions are sampled
    with linear interpolation at the full resolution.
    """

    interval: Interval
    fn: Callable
    derivatives: tuple = ()
    smooth: bool = True
    name: str = ""
    resolution: int = DEFAULT_RESOLUTION
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    exact: ClassVar[bool] = False

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.asarray(self.fn(arr), dtype=float)
        if arr.ndim == 0:
            return float(out)
        return np.broadcast_to(out, arr.shape).astype(float)

    def breakpoints(self) -> np.ndarray:
        return np.array([self.interval.a, self.interval.b])

    @classmethod
    def rough_image(cls, ps: PowerSum, name: str, resolution: int = DEFAULT_RESOLUTION) -> "ClosedForm":
        """Rough closed form evaluating an exact power sum built from sampled data.

        The power sum is returned as is by :meth:`to_powersum`; keeping the
        rough label means regularity is judged from the function's values
        rather than from the interpolant.
        """
        out = cls(ps.interval, ps, (), False, name, resolution)
        out._cache["exact"] = ps
        return out

    @property
    def exact_form(self) -> PowerSum | None:
        return self._cache.get("exact")

    def shifted(self, value: float) -> "ClosedForm":
        """Closed form minus a constant."""
        if "exact" in self._cache:
            return ClosedForm.rough_image(self._cache["exact"].plus_constant(-value), self.name, self.resolution)
        fn = self.fn
        return ClosedForm(
            self.interval, lambda x: fn(x) - value, self.derivatives, self.smooth,
            self.name, self.resolution,
        )

    def materialize(self, resolution: int | None = None) -> GridSamples:
        res = int(resolution or self.resolution)
        key = ("grid", res)
        if key in self._cache:
            return self._cache[key]
        iv = self.interval
        if not self.smooth:
            grid = GridSamples(iv, self(iv.grid(res)), "linear", self.fn)
        else:
            count = 65
            while True:
                x = iv.grid(count)
                g = GridSamples(iv, self(x), "cubic", self.fn)
                mid = 0.5 * (x[1:] + x[:-1])
                exact = self(mid)
                err = np.max(np.abs(g(mid) - exact))
                if err <= 1e-12 * max(1.0, np.max(np.abs(exact))) or count >= res:
                    break
                count = min(2 * count - 1, res)
            grid = g
        self._cache[key] = grid
        return grid

    def to_powersum(self, resolution: int | None = None) -> PowerSum:
        if "exact" in self._cache:
            return self._cache["exact"]
        return self.materialize(resolution).to_powersum()


def powersum_to_piecewise(ps: PowerSum) -> PiecewisePolynomial:
    """Exact piecewise-polynomial form of a power sum with nonnegative integer exponents."""
    if not ps.is_piecewise_polynomial:
        raise ValueError("power sum has non-integer or negative exponents")
    iv = ps.interval
    breaks = np.unique(np.concatenate([[iv.a, iv.b], ps.shifts]))
    deg = int(ps.exponents.max(initial=0))
    coeffs = np.zeros((breaks.size - 1, deg + 1))
    for i, p in enumerate(breaks[:-1]):
        mask = ps.shifts <= p
        local = np.polynomial.Polynomial([0.0])
        for xi, beta, c in zip(ps.shifts[mask], ps.exponents[mask], ps.coefs[mask]):
            local = local + c * np.polynomial.Polynomial([p - xi, 1.0]) ** int(beta)
        coeffs[i, : local.coef.size] = local.coef
    return PiecewisePolynomial(iv, breaks, coeffs)


def reflect_piecewise(pp: PiecewisePolynomial) -> PiecewisePolynomial:
    """``x -> pp(a + b - x)`` as a piecewise polynomial."""
    iv = pp.interval
    br = iv.reflect(pp.breaks)[::-1]
    br[0], br[-1] = iv.a, iv.b
    coeffs = np.zeros_like(pp.coeffs)
    m = pp.coeffs.shape[0]
    for j in range(m):
        i = m - 1 - j
        width = pp.breaks[i + 1] - pp.breaks[i]
        # local variable u = x - br[j]; original local variable is width - u
        q = np.polynomial.Polynomial(pp.coeffs[i])(np.polynomial.Polynomial([width, -1.0]))
        coeffs[j, : q.coef.size] = q.coef
    return PiecewisePolynomial(iv, br, coeffs)


@dataclass(frozen=True, eq=False)
class Reflected(Primitive):
    """``sign * (base(a + b - x) - offset)``.

    Point values are exact.  Integration against a weight substitutes back
    into the base, so quadrature sees the base's own breakpoints.
    """

    base: Primitive
    sign: float = 1.0
    offset: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    exact: ClassVar[bool] = False

    @property
    def interval(self) -> Interval:
        return self.base.interval

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self.sign * (np.asarray(self.base(self.interval.reflect(arr)), dtype=float) - self.offset)
        return float(out) if arr.ndim == 0 else out

    def breakpoints(self) -> np.ndarray:
        return np.sort(self.interval.reflect(self.base.breakpoints()))

    def to_powersum(self, resolution: int | None = None) -> PowerSum:
        if "ps" not in self._cache:
            base = self.base.to_powersum() if self.base.exact else None
            if base is not None and base.is_piecewise_polynomial:
                pp = reflect_piecewise(powersum_to_piecewise(base))
                co = pp.coeffs * self.sign
                co[:, 0] -= self.sign * self.offset
                self._cache["ps"] = PiecewisePolynomial(self.interval, pp.breaks, co).to_powersum()
            else:
                smooth = getattr(self.base, "smooth", True)
                cf = ClosedForm(self.interval, self.__call__, smooth=smooth, name="reflected")
                self._cache["ps"] = cf.to_powersum(resolution)
        return self._cache["ps"]
