"""Riemann-Liouville fractional integrals and derivatives of distributions.

A distribution is carried as ``(k, G)``: the k-th distributional derivative
of a continuous primitive ``G`` on a compact interval.
"""

from __future__ import annotations

from .abel import AbelReport, abel_check, abel_solve
from .core import (
    EqualityReport,
    RepDistribution,
    alexiewicz_norm,
    approx_equal,
    evaluate,
    pair,
    raise_order,
    reduce_fully,
    reduce_order,
)
from .errors import (
    DerivativeUnavailable,
    DomainError,
    FracDHKError,
    NotInCm,
    NotSolvable,
    OrderTooHigh,
    ParameterOutOfRange,
    QuadratureNonConvergence,
)
from .ops import frac_derivative, frac_integral_left, frac_integral_right
from .primitives import ClosedForm, GridSamples, Interval, PiecewisePolynomial, PowerSum

__version__ = "0.1.0"
