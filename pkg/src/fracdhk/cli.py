"""``frac-dhk`` command line: integrate, differentiate, abel, verify.

Exit codes: 0 success, 1 verification failures, 2 bad input or config,
3 numerical failure, 4 Abel equation not solvable.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import serialize
from .abel import abel_solve
from .catalog import resolve
from .config import ConfigError, RunConfig, load_config
from .core import RepDistribution, reduce_fully
from .errors import FracDHKError, NotSolvable, QuadratureNonConvergence
from .ops import frac_derivative, frac_integral_left, frac_integral_right
from .plotting import line_plot
from .verify import SUITES, format_table, run_suites

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_UNSOLVABLE = 0, 1, 2, 3, 4
FORMAT_TAG = "frac-dhk v1"


class Abort(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _guarded(fn):
    """Map library exceptions onto the documented exit codes."""

    @functools.wraps(fn)
    def run(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Abort as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.code)
        except QuadratureNonConvergence as exc:
            click.echo(f"quadrature failure: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)
        except (ConfigError, ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except FracDHKError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)

    return run


def config_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="key = value config file (default: $FRAC_DHK_CONFIG)."),
        click.option("--a", type=float, default=None, help="Left end of the interval."),
        click.option("--b", type=float, default=None, help="Right end of the interval."),
        click.option("--resolution", type=int, default=None, help="Output grid points (>= 65)."),
        click.option("--tol-exact", type=float, default=None),
        click.option("--tol-grid", type=float, default=None),
        click.option("--battery", type=int, default=None, help="Bump test functions per comparison."),
        click.option("--output-dir", type=click.Path(), default=None),
        click.option("--seed", type=int, default=None),
        click.option("--jobs", type=int, default=None, help="Worker threads for suites."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _config(config_path, **flags) -> RunConfig:
    return load_config(config_path, **flags)


def _input(entry: str | None, file: str | None, cfg: RunConfig) -> RepDistribution:
    if (entry is None) == (file is None):
        raise Abort(EXIT_INPUT, "give exactly one of --entry or --file")
    if entry is not None:
        return resolve(entry, cfg.interval).dist
    try:
        return serialize.load(file)
    except (OSError, json.JSONDecodeError) as exc:
        raise Abort(EXIT_INPUT, f"cannot read {file}: {exc}") from exc


def _target(path: str | None, cfg: RunConfig) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    return p if p.is_absolute() else Path(cfg.output_dir) / p


def csv_text(d: RepDistribution, n: float, resolution: int) -> str:
    """Header line, column names, then ``x, value, order`` rows on the uniform grid."""
    x = d.interval.grid(resolution)
    y = np.asarray(d.rep(x), dtype=float)
    label = "value" if d.order == 0 else "representative"
    lines = [f"# {FORMAT_TAG}; order={d.order}; n={n:g}", f"x,{label},order"]
    lines += [f"{xi:.17g},{yi:.17g},{d.order}" for xi, yi in zip(x, y)]
    return "\n".join(lines) + "\n"


def _emit(d: RepDistribution, n: float, cfg: RunConfig, output, plot, title: str) -> None:
    reduced = reduce_fully(d, cfg.tol_for(d.exact))
    text = csv_text(reduced, n, cfg.resolution)
    out = _target(output, cfg)
    if out is None:
        click.echo(text, nl=False)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    svg = _target(plot, cfg) if plot else (out.with_suffix(".svg") if out is not None else None)
    if svg is not None and reduced.order == 0:
        x = reduced.interval.grid(cfg.resolution)
        line_plot(x, reduced.rep(x), svg, title=title)
    if svg is not None and reduced.order != 0:
        click.echo(f"result has order {reduced.order}; no point values to plot", err=True)


def _save(d: RepDistribution, save, cfg: RunConfig) -> None:
    if save:
        path = _target(save, cfg)
        path.parent.mkdir(parents=True, exist_ok=True)
        serialize.dump(d, path)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Riemann-Liouville operators on distributions given by (order, primitive) pairs."""


def _operand_options(fn):
    for opt in reversed([
        click.option("--entry", default=None, help="Catalog entry, e.g. monomial:1 or example52:12."),
        click.option("--file", "file", default=None, help="JSON distribution record."),
        click.option("--n", "n", type=float, required=True, help="Operator order."),
        click.option("--output", default=None, help="CSV path (default: standard output)."),
        click.option("--plot", default=None, help="SVG path (default: next to --output)."),
        click.option("--save", default=None, help="Also write the unreduced result as JSON."),
    ]):
        fn = opt(fn)
    return fn


@main.command()
@_operand_options
@click.option("--side", type=click.Choice(["left", "right"]), default="left")
@config_options
@_guarded
def integrate(entry, file, n, output, plot, save, side, config_path, **flags):
    """Fractional integral of order n from the left or right end."""
    cfg = _config(config_path, **flags)
    if not n >= 0:
        raise Abort(EXIT_INPUT, "the order n must be nonnegative")
    d = _input(entry, file, cfg)
    res = frac_integral_left(d, n) if side == "left" else frac_integral_right(d, n)
    _save(res, save, cfg)
    _emit(res, n, cfg, output, plot, f"J^{n:g} ({side})")


@main.command()
@_operand_options
@config_options
@_guarded
def differentiate(entry, file, n, output, plot, save, config_path, **flags):
    """Fractional derivative of order n; irreducible results keep their order."""
    cfg = _config(config_path, **flags)
    if not n >= 0:
        raise Abort(EXIT_INPUT, "the order n must be nonnegative")
    d = _input(entry, file, cfg)
    res = frac_derivative(d, n)
    _save(res, save, cfg)
    _emit(res, n, cfg, output, plot, f"D^{n:g}")


@main.command()
@click.option("--entry", default=None)
@click.option("--file", "file", default=None)
@click.option("--n", "n", type=float, required=True, help="Order in (0, 1).")
@click.option("--report", default="abel_report.json", show_default=True)
@click.option("--solution", default="abel_solution.csv", show_default=True)
@config_options
@_guarded
def abel(entry, file, n, report, solution, config_path, **flags):
    """Solve J^n phi = f; exit 4 with a diagnostic when no solution exists."""
    cfg = _config(config_path, **flags)
    if not 0 < n < 1:
        raise Abort(EXIT_INPUT, "the Abel order must lie in (0, 1)")
    f = _input(entry, file, cfg)
    report_path = _target(report, cfg)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        rep = abel_solve(f, n)
    except NotSolvable as exc:
        if exc.report is not None:
            report_path.write_text(json.dumps(exc.report.to_dict(), indent=2, sort_keys=True) + "\n")
        click.echo(f"not solvable: {exc}", err=True)
        sys.exit(EXIT_UNSOLVABLE)
    report_path.write_text(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n")
    sol = _target(solution, cfg)
    sol.write_text(csv_text(rep.solution, n, cfg.resolution))
    click.echo(f"solved: residual {rep.residual:.3e}, solution order {rep.solution.order}", err=True)


@main.command()
@click.option("--suite", type=click.Choice(SUITES + ("all",)), default="all", show_default=True)
@click.option("--output", default=None, help="Results table path (default: standard output).")
@config_options
@_guarded
def verify(suite, output, config_path, **flags):
    """Run property suites; exit 1 if any case fails."""
    cfg = _config(config_path, **flags)
    rows = run_suites(suite, cfg)
    text = format_table(rows)
    out = _target(output, cfg)
    if out is None:
        click.echo(text, nl=False)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    failed = sum(not r.passed for r in rows)
    click.echo(f"{len(rows) - failed}/{len(rows)} passed", err=True)
    sys.exit(EXIT_FAIL if failed else EXIT_OK)


if __name__ == "__main__":
    main()
