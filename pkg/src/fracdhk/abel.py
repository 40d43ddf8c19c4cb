"""Abel integral equation ``J_a^n phi = f`` for ``0 < n < 1``."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import RepDistribution, approx_equal, default_tol, raise_order, reduce_fully, reduce_order
from .errors import NotInCm, NotSolvable, OrderTooHigh
from .ops import boundary_limit, frac_derivative, frac_integral_left

RESIDUAL_BOUND = 1e-4


@dataclass
class AbelReport:
    solvable: bool
    n: float
    boundary_value: float
    solution: RepDistribution | None = None
    residual: float | None = None
    detail: str = ""
    margin: float = math.nan

    def to_dict(self) -> dict:
        return {
            "solvable": self.solvable,
            "n": self.n,
            "boundary_value": self.boundary_value,
            "residual": self.residual,
            "detail": self.detail,
            "margin": self.margin,
            "solution_order": None if self.solution is None else self.solution.order,
        }


def _prepare(f: RepDistribution, n: float) -> RepDistribution:
    if not 0 < n < 1:
        raise ValueError("the Abel order must lie in (0, 1)")
    if f.order == 0:
        f = raise_order(f)
    if f.order > 1:
        raise OrderTooHigh("the Abel right-hand side must have order at most 1")
    return f


def abel_check(f: RepDistribution, n: float, tol: float | None = None) -> AbelReport:
    """Solvable iff ``J^(1-n) f`` is a continuous function vanishing at ``a``.

    ``J^(1-n) F`` must be numerically C^1; its derivative at ``a`` is the
    boundary value, declared zero below ``10 tol``.
    """
    f = _prepare(f, n)
    tol = default_tol(f.rep) if tol is None else tol
    phi = frac_integral_left(f, 1.0 - n)
    r = reduce_order(phi, tol)
    if not r.reducible:
        return AbelReport(False, n, math.nan, detail="J^(1-n) f is not continuous: " + r.detail)
    try:
        value = boundary_limit(r.dist.rep, 0, tol)
    except NotInCm as exc:
        return AbelReport(False, n, math.nan, detail=str(exc))
    threshold = 10 * tol
    ok = abs(value) < threshold
    detail = "boundary value vanishes" if ok else "J^(1-n) f does not vanish at a"
    return AbelReport(ok, n, value, detail=detail, margin=threshold - abs(value))


def abel_solve(
    f: RepDistribution, n: float, tol: float | None = None, residual_bound: float = RESIDUAL_BOUND
) -> AbelReport:
    """``phi = D^n f``, reduced as far as possible, with the forward residual attached."""
    f = _prepare(f, n)
    report = abel_check(f, n, tol)
    if not report.solvable:
        raise NotSolvable(f"no solution: {report.detail} (boundary value {report.boundary_value:.10g})", report)
    phi = reduce_fully(frac_derivative(f, n), tol)
    check = approx_equal(frac_integral_left(phi, n), f, tol=residual_bound)
    report.solution = phi
    report.residual = check.distance
    if not check.equal:
        report.solvable = False
        report.detail = f"forward residual {check.distance:.3g} exceeds {residual_bound:g}"
        raise NotSolvable(report.detail, report)
    return report
