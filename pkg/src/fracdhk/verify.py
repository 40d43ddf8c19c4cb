"""Property suites over the catalog, collected into a sorted results table."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass
from typing import Callable

import numpy as np

from .abel import abel_check, abel_solve
from .catalog import FACT_TOL, constant, example52, generators, half_power, monomial, random_piecewise, test_bumps
from .config import RunConfig
from .conv import BVFunction, bv_norm, holder_bound, stieltjes_pair
from .core import RepDistribution, alexiewicz_norm, approx_equal
from .errors import FracDHKError
from .fourier import mollifier_limit, prop1_check, prop2_check
from .ops import frac_integral_left, ftc_check, semigroup_check
from .primitives import PowerSum
from .quad import FracOrder, Kernel, gamma, kernel_norms
from .testfunctions import Bump, bump_battery

SUITES = ("semigroup", "ftc", "bounds", "abel", "fourier")
SEMIGROUP_PAIRS = ((0.3, 0.5), (0.5, 0.5), (0.5, 1.0), (1.5, 0.3))
FTC_ORDERS = (0.3, 0.5, 0.7, 1.0, 1.5)
BOUND_ORDERS = (0.3, 0.5, 0.8, 1.0, 1.5, 2.5)
BOUND_CASES = 200
SUP_TOL = 1e-6
ABEL_TOL = 1e-4
FOURIER_SMOOTH_TOL = 1e-6
FOURIER_STEP_TOL = 1e-4
HEADER = ("suite", "identity", "case", "residual", "tolerance", "pass")


@dataclass(frozen=True)
class ResultRow:
    suite: str
    identity: str
    case: str
    residual: float
    tolerance: float
    passed: bool


Case = Callable[[], list[ResultRow]]


def _row(suite, identity, case, residual, tol, passed=None) -> ResultRow:
    residual = float(residual)
    ok = residual <= tol if passed is None else passed
    return ResultRow(suite, identity, case, residual, float(tol), bool(ok))


def _guard(suite: str, name: str, fn: Case) -> Case:
    # a library error inside one case is a failed row, not a crashed run
    def run():
        try:
            return fn()
        except FracDHKError as exc:
            return [ResultRow(suite, "error", f"{name}: {type(exc).__name__}", math.inf, 0.0, False)]

    return run


# --------------------------------------------------------------------------
# suites


def semigroup_cases(cfg: RunConfig) -> list[tuple[str, Case]]:
    iv = cfg.interval
    battery = bump_battery(iv, cfg.battery)
    out = []
    for entry in generators(cfg.seed, iv=iv):
        for m, n in SEMIGROUP_PAIRS:
            def case(entry=entry, m=m, n=n):
                tol = cfg.tol_for(entry.dist.exact)
                r = semigroup_check(entry.dist, m, n, battery, tol)
                name = f"{entry.name} m={m:g} n={n:g}"
                rows = [
                    _row("semigroup", "J^m J^n = J^(m+n)", name, r["weak"].distance, tol, r["weak"].equal),
                    _row("semigroup", "J^m J^n = J^n J^m", name, r["commute"].distance, tol, r["commute"].equal),
                ]
                if m >= 1 or n >= 1:
                    rows.append(_row("semigroup", "sup |J^m J^n G - J^(m+n) G|", name, r["sup"], SUP_TOL))
                return rows

            out.append((f"{entry.name}:{m}:{n}", case))
    return out


def ftc_cases(cfg: RunConfig) -> list[tuple[str, Case]]:
    iv = cfg.interval
    battery = bump_battery(iv, cfg.battery)
    out = []
    for entry in generators(cfg.seed, iv=iv):
        for n in FTC_ORDERS:
            def case(entry=entry, n=n):
                tol = cfg.tol_for(entry.dist.exact)
                r = ftc_check(entry.dist, n, battery, tol)
                return [_row("ftc", "D^n J^n f = f", f"{entry.name} n={n:g}", r.distance, tol, r.equal)]

            out.append((f"{entry.name}:{n}", case))
    return out


def operator_bound(f: RepDistribution, n: float) -> float:
    """Alexiewicz-norm bound for ``J^n f`` from the kernel's L^1 or BV norm."""
    iv = f.interval
    norms = kernel_norms(Kernel("left", FracOrder.of(n), iv))
    base = alexiewicz_norm(f)
    if n < 1:
        return base * norms.l1 / gamma(n)
    return iv.length * base * norms.bv / gamma(n)


def random_bv(rng: np.random.Generator, lo: float, hi: float) -> BVFunction:
    """Piecewise polynomial with jumps on a random subinterval of ``[lo, hi]``."""
    ends = np.sort(rng.uniform(lo, hi, 2))
    pieces = int(rng.integers(1, 4))
    breaks = np.concatenate([[ends[0]], np.sort(rng.uniform(*ends, pieces - 1)), [ends[1]]])
    coeffs = rng.normal(size=(pieces, int(rng.integers(1, 4))))
    return BVFunction.polynomial_pieces(breaks, coeffs)


def bounds_cases(cfg: RunConfig) -> list[tuple[str, Case]]:
    iv = cfg.interval
    out = []
    base = 10_000 * (cfg.seed + 1)
    for i in range(BOUND_CASES):
        def norm_case(i=i):
            entry = random_piecewise(base + i, iv)
            n = BOUND_ORDERS[i % len(BOUND_ORDERS)]
            lhs = alexiewicz_norm(frac_integral_left(entry.dist, n))
            bound = operator_bound(entry.dist, n)
            return [_row("bounds", "||J^n f||_A <= C ||f||_A", f"{entry.name} n={n:g}",
                         lhs / bound if bound else 0.0, 1.0, lhs <= bound * (1 + 1e-12))]

        def holder_case(i=i):
            entry = random_piecewise(base + BOUND_CASES + i, iv)
            g = random_bv(np.random.default_rng(base + 2 * BOUND_CASES + i), iv.a, iv.b)
            lhs = abs(stieltjes_pair(entry.dist, g))
            bound = holder_bound(entry.dist, g)
            return [_row("bounds", "|<f, g>| <= 2 ||f||_A ||g||_BV", f"{entry.name} pair={i}",
                         lhs / bound if bound else 0.0, 1.0, lhs <= bound * (1 + 1e-12))]

        out.append((f"norm:{i}", norm_case))
        out.append((f"holder:{i}", holder_case))
    return out


def abel_cases(cfg: RunConfig) -> list[tuple[str, Case]]:
    iv = cfg.interval
    battery = bump_battery(iv, cfg.battery)
    inputs = [constant(1.0, iv), monomial(1, iv)]
    if iv.a == 0.0 and iv.b == 1.0:
        inputs.append(example52(12))
    out = []
    for entry in inputs:
        for n in (0.25, 0.5, 0.75):
            def case(entry=entry, n=n):
                rep = abel_solve(frac_integral_left(entry.dist, n), n)
                dist = approx_equal(rep.solution, entry.dist, battery, ABEL_TOL).distance
                return [_row("abel", "solve(J^n g) = g", f"{entry.name} n={n:g}", dist, ABEL_TOL)]

            out.append((f"{entry.name}:{n}", case))

    def counter():
        rep = abel_check(half_power(iv).dist, 0.5)
        gap = abs(rep.boundary_value - math.sqrt(math.pi))
        return [_row("abel", "reject (x-a)^(-1/2)", "half_power n=0.5", gap, ABEL_TOL,
                     (not rep.solvable) and gap <= ABEL_TOL)]

    out.append(("half_power", counter))
    return out


def quadratic_derivative(iv) -> RepDistribution:
    """``D[(x - a)^2 / 2]`` as an order-1 object."""
    return RepDistribution(1, PowerSum.polynomial(iv, [0.0, 0.0, 0.5]))


def fourier_cases(cfg: RunConfig) -> list[tuple[str, Case]]:
    iv = cfg.interval
    inputs = [("quadratic", quadratic_derivative(iv), FOURIER_SMOOTH_TOL)]
    if iv.a == 0.0 and iv.b == 1.0:
        inputs.append(("example52:12", example52(12).dist, FOURIER_STEP_TOL))
    out = []
    for name, f, tol in inputs:
        for n in (0.5, 1.0, 1.5):
            for j, phi in enumerate(test_bumps(iv)):
                def case(name=name, f=f, tol=tol, n=n, j=j, phi=phi):
                    rep = prop1_check(f, n, phi)
                    return [_row("fourier", f"prop1 ({key})", f"{name} n={n:g} bump={j}", gap, tol)
                            for key, gap in sorted(rep.gaps.items())]

                out.append((f"prop1:{name}:{n}:{j}", case))
    psi = Bump(iv, iv.a + 0.3 * iv.length, iv.a + 0.6 * iv.length)
    phi = test_bumps(iv)[0]
    f = quadratic_derivative(iv)
    for n in (0.5, 1.0):
        def case2(n=n):
            rep = prop2_check(f, n, psi, phi)
            return [_row("fourier", f"prop2 ({key})", f"quadratic n={n:g}", gap, FOURIER_SMOOTH_TOL)
                    for key, gap in sorted(rep.gaps.items())]

        out.append((f"prop2:{n}", case2))

    def moll():
        gaps = mollifier_limit(f, 0.5, phi, iv.a + 0.5 * iv.length,
                               tuple(w * iv.length for w in (0.2, 0.1, 0.05)))
        shrinking = all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
        return [_row("fourier", "mollifier limit", "quadratic n=0.5", gaps[-1], gaps[0], shrinking)]

    out.append(("mollifier", moll))
    return out


_BUILDERS = {
    "semigroup": semigroup_cases,
    "ftc": ftc_cases,
    "bounds": bounds_cases,
    "abel": abel_cases,
    "fourier": fourier_cases,
}


def expand(suite: str) -> tuple[str, ...]:
    if suite == "all":
        return SUITES
    if suite not in _BUILDERS:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES + ('all',)}")
    return (suite,)


def fact_rows(cfg: RunConfig) -> list[ResultRow]:
    """Every exact fact of the suite inputs against its oracle."""
    rows = []
    for entry in generators(cfg.seed, iv=cfg.interval):
        for fact in entry.exact_facts:
            ok, err = fact.check()
            rows.append(_row("catalog", "exact fact", f"{entry.name}: {fact.quantity}", err,
                             FACT_TOL * max(1.0, abs(fact.value)), ok))
    return rows


def run_suites(suite: str, cfg: RunConfig) -> list[ResultRow]:
    """Check the catalog facts, then run every case of the named suite(s); rows come back sorted."""
    cases = [lambda: fact_rows(cfg)]
    for name in expand(suite):
        cases.extend(_guard(name, label, fn) for label, fn in _BUILDERS[name](cfg))
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(lambda c: c(), cases))
    else:
        chunks = [c() for c in cases]
    rows = [r for chunk in chunks for r in chunk]
    return sorted(rows, key=lambda r: (r.suite, r.identity, r.case))


def format_table(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for r in rows:
        suite, identity, case, residual, tol, ok = astuple(r)
        writer.writerow([suite, identity, case, f"{residual:.6e}", f"{tol:.3e}", "pass" if ok else "FAIL"])
    return buf.getvalue()
