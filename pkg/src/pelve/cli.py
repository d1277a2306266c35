"""Command-line front end.

Subcommands
-----------
analytic    VaR, ES_n over a level grid and the equivalent-level multiplier
            for a named distribution family.
empirical   The same estimators from a CSV sample of prices or returns.
simulate    Seeded replicate study of the empirical multiplier.
rolling     Windowed multiplier series over daily returns.

Global flags: --format csv|json, --ctol (bisection tolerance), --reltol
(quadrature tolerance).  Exit codes: 0 success, 1 usage error, 2 data error.

Input CSV is UTF-8 with a mandatory ``date,price`` or ``date,return``
header; dates are ISO-8601 and strictly increasing.  Return values are
parsed as ordinary decimal literals and kept as given — whether they are
raw or percent returns is up to the producer of the file.

Sign convention: estimators are applied to the series as ingested;
``--negate`` flips returns to losses for users who book losses positive.

Infinite multipliers print as the literal ``inf`` in CSV and as ``null``
plus an ``"infinite": true`` flag in JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass
from datetime import date
from typing import Optional

from .distributions import (
    DistributionModel,
    ExcessGPD,
    Exponential,
    GeneralizedPareto,
    Normal,
    Pareto,
    Uniform,
    quantile,
)
from .empirical import OrderedSample, empirical_es_n, empirical_pelve, empirical_var
from .errors import (
    InvalidParameter,
    MalformedCsv,
    NonMonotoneDates,
    NonPositivePrice,
    PelveError,
    SampleTooSmall,
)
from .montecarlo import StudyConfig, export_histogram, run_study
from .pelve_solver import DEFAULT_C_TOL, PelveResult, pelve, pelve_closed
from .risk_measures import DEFAULT_REL_TOL, es_n, es_n_closed

__all__ = [
    "ReturnSeries",
    "RollingConfig",
    "ingest_prices",
    "ingest_returns",
    "rolling_pelve",
    "main",
    "entrypoint",
]

DEFAULT_WINDOW = 100
DEFAULT_EPSILON = 0.05


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReturnSeries:
    dates: tuple
    returns: tuple

    def __len__(self) -> int:
        return len(self.returns)


@dataclass(frozen=True)
class RollingConfig:
    window: int = DEFAULT_WINDOW
    eps: float = DEFAULT_EPSILON
    orders: tuple = (1, 2)
    negate: bool = False

    def __post_init__(self):
        if self.window < 2:
            raise InvalidParameter(f"window must be >= 2, got {self.window}")


def _parse_rows(csv_text: str, value_column: str):
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv("empty input; expected a header row") from None
    if [h.strip().lower() for h in header] != ["date", value_column]:
        raise MalformedCsv(
            f"expected header 'date,{value_column}', got {','.join(header)!r}"
        )
    dates, values = [], []
    prev: Optional[date] = None
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise MalformedCsv(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            d = date.fromisoformat(row[0].strip())
            v = float(row[1])
        except ValueError as exc:
            raise MalformedCsv(f"line {lineno}: {exc}") from None
        if not math.isfinite(v):
            raise MalformedCsv(f"line {lineno}: non-finite value {row[1]!r}")
        if prev is not None and d <= prev:
            raise NonMonotoneDates(
                f"line {lineno}: date {d.isoformat()} not after {prev.isoformat()}"
            )
        prev = d
        dates.append(d.isoformat())
        values.append(v)
    return dates, values


def ingest_prices(csv_text: str) -> ReturnSeries:
    """Parse a ``date,price`` CSV into one-period linear returns
    S_t/S_{t-1} - 1, each dated at t."""
    dates, prices = _parse_rows(csv_text, "price")
    if len(prices) < 2:
        raise MalformedCsv(f"need >= 2 price rows, got {len(prices)}")
    for d, p in zip(dates, prices):
        if p <= 0:
            raise NonPositivePrice(f"{d}: price {p} is not strictly positive")
    returns = tuple(prices[t] / prices[t - 1] - 1.0 for t in range(1, len(prices)))
    return ReturnSeries(tuple(dates[1:]), returns)


def ingest_returns(csv_text: str) -> ReturnSeries:
    """Parse a ``date,return`` CSV; values are taken as given."""
    dates, values = _parse_rows(csv_text, "return")
    if not values:
        raise MalformedCsv("need >= 1 return row")
    return ReturnSeries(tuple(dates), tuple(values))


# ---------------------------------------------------------------------------
# rolling analysis
# ---------------------------------------------------------------------------

def rolling_pelve(series: ReturnSeries, cfg: RollingConfig, c_tol: float = DEFAULT_C_TOL):
    """Empirical multiplier over each trailing window of cfg.window returns,
    one row per (window end date, order):
    (date, order, PelveResult, degenerate_flag)."""
    m = len(series)
    if m < cfg.window:
        raise MalformedCsv(f"series length {m} is shorter than window {cfg.window}")
    sign = -1.0 if cfg.negate else 1.0
    rows = []
    for t in range(cfg.window, m + 1):
        chunk = [sign * r for r in series.returns[t - cfg.window : t]]
        sample = OrderedSample(chunk)
        for order in cfg.orders:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", SampleTooSmall)
                result = empirical_pelve(sample, order, cfg.eps, c_tol)
            degenerate = any(issubclass(w.category, SampleTooSmall) for w in caught)
            rows.append((series.dates[t - 1], order, result, degenerate))
    return rows


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    # repr of a float is the shortest string that round-trips exactly.
    if isinstance(x, float):
        return "inf" if math.isinf(x) else repr(x)
    return str(x)


def _pelve_cell(result: PelveResult) -> str:
    return _fmt(result.value) if result.is_finite else "inf"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _parse_dist(text: str) -> DistributionModel:
    makers = {
        "uniform": (2, lambda a, b: Uniform(a, b)),
        "exp": (1, lambda rate: Exponential(rate)),
        "normal": (2, lambda m, s: Normal(m, s)),
        "pareto": (2, lambda k, a: Pareto(k, a)),
        "gpd": (2, lambda k, b: GeneralizedPareto(k, b)),
        "excessgpd": (4, lambda u, k, b, fu: ExcessGPD(u, k, b, fu)),
    }
    name, _, params = text.partition(":")
    if name not in makers:
        raise argparse.ArgumentTypeError(
            f"unknown distribution {name!r}; expected one of {sorted(makers)}"
        )
    arity, make = makers[name]
    try:
        values = [float(tok) for tok in params.split(",")] if params else []
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric parameter in {text!r}") from None
    if len(values) != arity:
        raise argparse.ArgumentTypeError(
            f"{name} takes {arity} parameters, got {len(values)}"
        )
    try:
        return make(*values)
    except PelveError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _level_grid(eps: float):
    grid = sorted({0.0, 0.5, 0.75, 0.9, 0.95, 0.99, 1.0 - eps})
    return [p for p in grid if 0.0 <= p < 1.0]


def _cmd_analytic(args, out) -> int:
    dist, n, eps = args.dist, args.order, args.epsilon
    rows = [("var", 1.0 - eps, quantile(dist, 1.0 - eps))]
    for p in _level_grid(eps):
        if args.closed_only:
            value = es_n_closed(dist, n, p)
        else:
            value = es_n(dist, n, p, args.reltol).value
        rows.append((f"es_{n}", p, value))
    if args.closed_only:
        result = pelve_closed(dist, n, eps)
    else:
        result = pelve(dist, n, eps, args.ctol, args.reltol)
    if args.format == "json":
        records = [
            {"metric": m, "level": lvl, "value": v} for m, lvl, v in rows
        ]
        records.append(
            {
                "metric": f"pelve_{n}",
                "level": eps,
                "value": result.value,
                "infinite": not result.is_finite,
            }
        )
        json.dump(records, out, indent=2)
        out.write("\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["metric", "level", "value"])
        for m, lvl, v in rows:
            writer.writerow([m, _fmt(lvl), _fmt(v)])
        writer.writerow([f"pelve_{n}", _fmt(eps), _pelve_cell(result)])
    return 0


def _load_series(args) -> ReturnSeries:
    with open(args.input, "r", encoding="utf-8") as fh:
        text = fh.read()
    return ingest_prices(text) if args.kind == "prices" else ingest_returns(text)


def _cmd_empirical(args, out) -> int:
    series = _load_series(args)
    sign = -1.0 if args.negate else 1.0
    sample = OrderedSample([sign * r for r in series.returns])
    n, eps = args.order, args.epsilon
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SampleTooSmall)
        result = empirical_pelve(sample, n, eps, args.ctol)
    degenerate = any(issubclass(w.category, SampleTooSmall) for w in caught)
    var_hat = empirical_var(sample, 1.0 - eps)
    es_hat = empirical_es_n(sample, n, 1.0 - eps)
    if args.format == "json":
        json.dump(
            {
                "m": sample.m,
                "epsilon": eps,
                "order": n,
                "var": var_hat,
                "es": es_hat,
                "pelve": result.value,
                "infinite": not result.is_finite,
                "degenerate": degenerate,
            },
            out,
            indent=2,
        )
        out.write("\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["metric", "value"])
        writer.writerow(["m", sample.m])
        writer.writerow(["var", _fmt(var_hat)])
        writer.writerow([f"es_{n}", _fmt(es_hat)])
        writer.writerow([f"pelve_{n}", _pelve_cell(result)])
        writer.writerow(["degenerate", str(degenerate).lower()])
    return 0


def _cmd_simulate(args, out) -> int:
    cfg = StudyConfig(
        dist=args.dist,
        n=args.order,
        eps=args.epsilon,
        replicates=args.replicates,
        sample_len=args.length,
        seed=args.seed,
        c_tol=args.ctol,
    )
    res = run_study(cfg)
    hist = export_histogram(res, args.bins) if res.finite_count else []
    if args.format == "json":
        json.dump(
            {
                "replicates": cfg.replicates,
                "finite_count": res.finite_count,
                "mean": None if math.isnan(res.mean) else res.mean,
                "stddev": res.stddev,
                "failures": list(res.failures),
                "histogram": [
                    {"low": lo, "high": hi, "count": c} for lo, hi, c in hist
                ],
            },
            out,
            indent=2,
        )
        out.write("\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["metric", "value"])
        writer.writerow(["replicates", cfg.replicates])
        writer.writerow(["finite_count", res.finite_count])
        writer.writerow(["mean", _fmt(res.mean)])
        writer.writerow(["stddev", _fmt(res.stddev)])
        writer.writerow([])
        writer.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, c in hist:
            writer.writerow([_fmt(lo), _fmt(hi), c])
    return 0


def _cmd_rolling(args, out) -> int:
    series = _load_series(args)
    cfg = RollingConfig(
        window=args.window,
        eps=args.epsilon,
        orders=tuple(args.orders),
        negate=args.negate,
    )
    rows = rolling_pelve(series, cfg, args.ctol)
    if args.format == "json":
        records = [
            {
                "date": d,
                "order": order,
                "pelve": result.value,
                "infinite": not result.is_finite,
                "degenerate": degenerate,
            }
            for d, order, result, degenerate in rows
        ]
        json.dump(records, out, indent=2)
        out.write("\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["date", "order", "pelve", "degenerate"])
        for d, order, result, degenerate in rows:
            writer.writerow([d, order, _pelve_cell(result), str(degenerate).lower()])
    return 0


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; this tool reserves 2 for
    # data errors and reports usage problems with status 1 instead.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _epsilon(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1), got {text}")
    return value


def _window(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"window must be >= 2, got {text}")
    return value


def _orders(text: str):
    try:
        parsed = [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order list {text!r}") from None
    if not parsed or any(n < 1 for n in parsed):
        raise argparse.ArgumentTypeError(f"orders must be positive, got {text!r}")
    return parsed


def _build_parser() -> _Parser:
    parser = _Parser(prog="pelve", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--ctol", type=float, default=DEFAULT_C_TOL,
                        help="bisection tolerance on the multiplier")
    parser.add_argument("--reltol", type=float, default=DEFAULT_REL_TOL,
                        help="relative tolerance of the quadrature fallback")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analytic", help="closed-form / quadrature queries")
    p.add_argument("--dist", type=_parse_dist, required=True)
    p.add_argument("--order", type=_positive_int, default=1)
    p.add_argument("--epsilon", type=_epsilon, default=DEFAULT_EPSILON)
    p.add_argument("--closed-only", action="store_true")
    p.set_defaults(fn=_cmd_analytic)

    p = sub.add_parser("empirical", help="estimators from a CSV sample")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=("prices", "returns"), required=True)
    p.add_argument("--order", type=_positive_int, default=1)
    p.add_argument("--epsilon", type=_epsilon, default=DEFAULT_EPSILON)
    p.add_argument("--negate", action="store_true")
    p.set_defaults(fn=_cmd_empirical)

    p = sub.add_parser("simulate", help="seeded replicate study")
    p.add_argument("--dist", type=_parse_dist, required=True)
    p.add_argument("--order", type=_positive_int, default=2)
    p.add_argument("--epsilon", type=_epsilon, default=DEFAULT_EPSILON)
    p.add_argument("--replicates", type=_positive_int, required=True)
    p.add_argument("--length", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=_positive_int, default=30)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("rolling", help="windowed multiplier series")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=("prices", "returns"), required=True)
    p.add_argument("--window", type=_window, default=DEFAULT_WINDOW)
    p.add_argument("--epsilon", type=_epsilon, default=DEFAULT_EPSILON)
    p.add_argument("--orders", type=_orders, default=[1, 2])
    p.add_argument("--negate", action="store_true")
    p.set_defaults(fn=_cmd_rolling)

    return parser


def main(argv=None, out=None, err=None) -> int:
    """Run the CLI; returns the process exit code (0 ok, 1 usage, 2 data)."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=err)
        return 1
    try:
        return args.fn(args, out)
    except (PelveError, OSError) as exc:
        print(f"pelve: {exc}", file=err)
        return 2


def entrypoint() -> None:
    sys.exit(main())
