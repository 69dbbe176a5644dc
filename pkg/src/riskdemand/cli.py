"""Command-line interface.

    riskdemand calibrate  --portfolio P --tariff T
    riskdemand sweep      --portfolio P --tariff T --sector S --period L --quantity Q --start X --stop Y [--steps N]
    riskdemand elasticity --portfolio P --tariff T
    riskdemand scenario   --portfolio P --tariff T --curve C --price F[,F,...] --income F

Every subcommand takes ``--format {delimited,structured}`` and ``--out PATH``
(default: standard output). Exit status: 0 success, 1 input or validation
error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .data_io import FORMATS, parse_load_curve, parse_portfolio, parse_tariff, read_text, write_report, SweepSeries
from .errors import InputError, NumericalError
from .multi_period import elasticity_report
from .scenario import Scenario, apply_scenario, build_baseline, calibration_table, per_unit_profile
from .single_period import Quantity, SinglePeriodModel, linspace, sweep

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load_inputs(args, need_curve=False):
    tariff = parse_tariff(_read(args.tariff), source=args.tariff)
    portfolio = parse_portfolio(_read(args.portfolio), tariff=tariff, source=args.portfolio)
    curve = parse_load_curve(_read(args.curve), source=args.curve) if need_curve else None
    return tariff, portfolio, curve


def _read(path):
    try:
        return read_text(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _multipliers(text, n):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--price expects F or F,F,...; got {text!r}") from None
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise UsageError(f"--price has {len(values)} multipliers for {n} tariff periods")
    return values


def cmd_calibrate(args):
    tariff, portfolio, _ = _load_inputs(args)
    return calibration_table(portfolio.sectors, tariff)


def cmd_sweep(args):
    tariff, portfolio, _ = _load_inputs(args)
    sector = portfolio.sector(args.sector)
    j = tariff.index(args.period)
    if args.steps < 2:
        raise UsageError(f"--steps must be >= 2, got {args.steps}")
    quantity = Quantity(args.quantity)
    if not args.stop > args.start >= 0:
        raise UsageError(f"need 0 <= --start < --stop, got {args.start} .. {args.stop}")
    if quantity is not Quantity.UTILITY and args.start == 0:
        raise UsageError("price sweeps need --start > 0")
    sp = SinglePeriodModel.build(sector.family, sector.coefficients[j], 1.0, tariff.periods[j].price)
    points = sweep(sp, quantity, linspace(args.start, args.stop, args.steps))
    return SweepSeries(quantity, points, sector.name, tariff.periods[j].label)


def cmd_elasticity(args):
    tariff, portfolio, _ = _load_inputs(args)
    return [elasticity_report(per_unit_profile(s, tariff), name=s.name) for s in portfolio.sectors]


def cmd_scenario(args):
    tariff, portfolio, curve = _load_inputs(args, need_curve=True)
    prices = _multipliers(args.price, len(tariff.periods))
    baseline = build_baseline(portfolio.sectors, curve, tariff, ignore_uncovered=args.ignore_uncovered)
    report = apply_scenario(baseline, Scenario(tuple(prices), args.income), compare=True)
    if not report.ok:
        details = "; ".join(f"{name}: {err}" for name, err in report.errors)
        raise NumericalError(f"scenario infeasible for sector(s) {details}")
    return report


def build_parser():
    parser = _Parser(prog="riskdemand", description="Risk-aversion based electricity demand and elasticity tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, curve=False):
        p.add_argument("--portfolio", required=True, help="portfolio JSON (sectors, shares, elasticities)")
        p.add_argument("--tariff", required=True, help="tariff CSV: label,start,end,price")
        if curve:
            p.add_argument("--curve", required=True, help="load curve CSV: hour,mw (24 rows)")
        p.add_argument("--format", choices=FORMATS, default="delimited")
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("calibrate", help="per-sector, per-period risk-aversion and calibration coefficients")
    common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("sweep", help="demand/utility/welfare curve for one sector and period")
    common(p)
    p.add_argument("--sector", required=True)
    p.add_argument("--period", required=True)
    p.add_argument("--quantity", choices=[q.value for q in Quantity], default="demand")
    p.add_argument("--start", type=float, required=True, help="first price (demand for utility sweeps)")
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("elasticity", help="own/cross-price and income elasticity matrices per sector")
    common(p)
    p.set_defaults(func=cmd_elasticity)

    p = sub.add_parser("scenario", help="apply price/income multipliers to a sector portfolio")
    common(p, curve=True)
    p.add_argument("--price", default="1", help="uniform multiplier F or per-period F,F,...")
    p.add_argument("--income", type=float, default=1.0, help="budget multiplier")
    p.add_argument("--ignore-uncovered", action="store_true",
                   help="leave out load in hours no tariff period covers instead of failing")
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = args.func(args)
        text = write_report(result, args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
