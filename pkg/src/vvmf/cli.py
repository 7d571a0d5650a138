"""Command line entry point: ``vvmf catalog | scan | compute | verify``."""

from __future__ import annotations

import json
import sys
from fractions import Fraction

import click

from . import catalog as cat
from .characters import SOLVER_FAILURE
from .golden import verify as run_verify
from .numeric import default_prec
from .report import write_rows
from .scan import ScanConfig, compute as run_compute, default_jobs, scan as run_scan

EXIT_MISMATCH = 1
EXIT_SOLVER_FAILURE = 2
EXIT_USAGE = 64


class UsageExitGroup(click.Group):
    def main(self, *args, **kwargs):
        try:
            return super().main(*args, standalone_mode=False, **kwargs)
        except click.UsageError as exc:
            exc.show()
            sys.exit(EXIT_USAGE)
        except click.exceptions.Abort:
            sys.exit(EXIT_USAGE)
        except click.exceptions.Exit as exc:
            sys.exit(exc.exit_code)


def _fraction(ctx, param, value):
    if value is None:
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"{value!r} is not a rational number") from None


def _fractions(ctx, param, value):
    if value is None:
        return None
    try:
        return tuple(Fraction(v) for v in value.split(","))
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"{value!r} is not a comma-separated list of rationals") from None


def _family(ctx, param, value):
    if value is None or value == "all":
        return value
    try:
        cat.get(value)
    except KeyError as exc:
        raise click.BadParameter(str(exc)) from None
    return value


def _config(terms, prec_bits, max_den, pair_convention) -> ScanConfig:
    return ScanConfig(terms=terms, prec_bits=prec_bits, max_denominator=max_den,
                      pair_convention=pair_convention)


def _common(f):
    f = click.option("--terms", default=100, show_default=True, type=click.IntRange(2, None),
                     help="q-coefficients computed per component")(f)
    f = click.option("--prec-bits", default=None, type=click.IntRange(64, None),
                     help="working precision (default 256, or VVMF_PREC_BITS)")(f)
    f = click.option("--max-den", default=10**9, show_default=True, type=click.IntRange(1, None),
                     help="denominator bound for gauge ratio reconstruction")(f)
    f = click.option("--pairs", "pair_convention", default="sum", show_default=True,
                     type=click.Choice(["sum", "individual"]),
                     help="report conjugate-pair components as their sum or individually")(f)
    return f


@click.group(cls=UsageExitGroup)
def main():
    """Extremal character vectors for rank-2 and rank-3 modular categories."""


@main.command()
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "json"]))
def catalog(fmt):
    """List the built-in modular data."""
    if fmt == "json":
        click.echo(cat.catalog_json())
        return
    for d in cat.catalog():
        twists = ", ".join(str(t) for t in d.twists)
        click.echo(f"{d.label:16s} {d.name:26s} rank={d.rank} c0={d.base_charge} twists=({twists})")


@main.command()
@click.option("--family", required=True, callback=_family, help="catalog label or 'all'")
@click.option("--cmax", required=True, callback=_fraction, help="largest central charge, e.g. 72 or 97/2")
@_common
@click.option("--format", "fmt", default="md", type=click.Choice(["json", "csv", "md"]))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="output file (default stdout)")
@click.option("--jobs", default=None, type=click.IntRange(1, None), help="worker processes")
@click.option("--strict", is_flag=True, help="exit 2 if any candidate hit a solver failure")
def scan(family, cmax, terms, prec_bits, max_den, pair_convention, fmt, out, jobs, strict):
    """Run every extremal candidate of a family up to CMAX."""
    if cmax <= 0:
        raise click.BadParameter("must be positive", param_hint="--cmax")
    config = _config(terms, prec_bits or default_prec(), max_den, pair_convention)
    rows = run_scan(family, cmax, config, jobs or default_jobs())
    _emit(write_rows(rows, fmt), out)
    if strict and any(r.status == SOLVER_FAILURE for r in rows):
        sys.exit(EXIT_SOLVER_FAILURE)


@main.command()
@click.option("--family", required=True, callback=_family)
@click.option("--c", "c", required=True, callback=_fraction)
@click.option("--h", "h", required=True, callback=_fractions, help="minimal energies, e.g. 17/16,3/2")
@_common
@click.option("--dump-connection", is_flag=True, help="include the residue matrices A and B")
@click.option("--strict", is_flag=True)
def compute(family, c, h, terms, prec_bits, max_den, pair_convention, dump_connection, strict):
    """Full coefficient dump for one candidate (JSON)."""
    config = _config(terms, prec_bits or default_prec(), max_den, pair_convention)
    try:
        row, _ = run_compute(family, c, h, config)
    except (ValueError, cat.InadmissibleCharge) as exc:
        raise click.UsageError(str(exc)) from None
    data = row.to_json(full=True)
    if not dump_connection:
        data.pop("connection", None)
    click.echo(json.dumps(data, indent=2))
    if strict and row.status == SOLVER_FAILURE:
        sys.exit(EXIT_SOLVER_FAILURE)


@main.command()
@click.option("--scope", default="all", type=click.Choice(["rank2", "rank3", "all"]))
@_common
@click.option("--jobs", default=None, type=click.IntRange(1, None))
@click.option("--quiet", is_flag=True, help="only print failures and the summary")
def verify(scope, terms, prec_bits, max_den, pair_convention, jobs, quiet):
    """Recompute the reference tables and report pass/fail per row."""
    if pair_convention != "sum":
        raise click.BadParameter("the tables print conjugate pairs summed", param_hint="--pairs")
    config = _config(terms, prec_bits or default_prec(), max_den, pair_convention)
    report = run_verify(scope, config, jobs or default_jobs())
    for check in report.checks:
        if not quiet or check.status == "fail":
            click.echo(check.line())
    click.echo(report.text().splitlines()[-1])
    if not report.ok:
        sys.exit(EXIT_MISMATCH)


def _emit(text: str, out: str | None):
    if out is None:
        click.echo(text, nl=False)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


if __name__ == "__main__":
    main()
