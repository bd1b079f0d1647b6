"""Command-line interface and file formats.

Two console entry points:

* ``rebalance``: read a portfolio CSV, compute a buy-only plan for a cash
  contribution, and print a table or JSON report.
* ``project-simplex``: project a vector of reals onto the unit simplex.

The CSV grammar is deliberately strict: header ``id,value,target``,
period decimal separator, no thousands separators, ``#`` starts a
comment line.  Strictness keeps files bit-exact and diff-friendly.

Exit codes: 0 on success, 2 on any input error.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .portfolio import Asset, Portfolio, RebalancePlan, rebalance
from .solvers import L1Case, L2Solution, sample_l1_member, simplex_mle

_NUMBER_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")

_HEADER = ("id", "value", "target")


class PortfolioFormatError(ValueError):
    """Malformed portfolio file; message carries a line number."""


def _strict_float(field: str) -> float:
    """float() behind the strict grammar: no nan/inf, no separators."""
    if not _NUMBER_RE.fullmatch(field):
        raise ValueError(f"{field!r} is not a plain decimal number")
    return float(field)


def parse_portfolio(text: str, normalize: bool = False, allow_short: bool = False) -> Portfolio:
    """Parse portfolio CSV text into a :class:`Portfolio`.

    With ``normalize``, the target column is taken as nonnegative weights
    and rescaled to sum to 1; otherwise each target must already lie in
    [0, 1] and the column must sum to 1 within tolerance.
    """
    rows: List[tuple] = []
    header_seen = False
    seen_ids = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if not header_seen:
            if tuple(fields) != _HEADER:
                raise PortfolioFormatError(
                    f"line {lineno}: expected header 'id,value,target', got {line!r}"
                )
            header_seen = True
            continue
        if len(fields) != 3:
            raise PortfolioFormatError(
                f"line {lineno}: expected 3 fields, got {len(fields)}"
            )
        asset_id, value_field, target_field = fields
        if not asset_id:
            raise PortfolioFormatError(f"line {lineno}: empty asset id")
        if asset_id in seen_ids:
            raise PortfolioFormatError(f"line {lineno}: duplicate asset id {asset_id!r}")
        seen_ids.add(asset_id)
        try:
            value = _strict_float(value_field)
        except ValueError as exc:
            raise PortfolioFormatError(f"line {lineno}: value {exc}") from None
        try:
            target = _strict_float(target_field)
        except ValueError as exc:
            raise PortfolioFormatError(f"line {lineno}: target {exc}") from None
        if normalize and target < 0.0:
            raise PortfolioFormatError(
                f"line {lineno}: weight {target!r} must be nonnegative under --normalize"
            )
        rows.append((lineno, asset_id, value, target))
    if not header_seen:
        raise PortfolioFormatError("empty portfolio file: missing header")
    if not rows:
        raise PortfolioFormatError("portfolio file contains no asset rows")
    targets = [r[3] for r in rows]
    if normalize:
        total = math.fsum(targets)
        if total <= 0.0:
            raise PortfolioFormatError("cannot normalize: weights sum to zero")
        targets = [t / total for t in targets]
    assets = []
    for (lineno, asset_id, value, _), target in zip(rows, targets):
        try:
            assets.append(Asset(id=asset_id, value=value, target=target))
        except ValueError as exc:
            raise PortfolioFormatError(f"line {lineno}: {exc}") from exc
    return Portfolio(assets=tuple(assets), allow_short=allow_short)


def serialize_portfolio(portfolio: Portfolio) -> str:
    """Inverse of :func:`parse_portfolio`, 10 significant digits per number.

    parse(serialize(p)) reproduces every value to the emitted precision
    and serialize is a fixed point on the result.
    """
    lines = [",".join(_HEADER)]
    for asset in portfolio.assets:
        if "," in asset.id or "\n" in asset.id or asset.id.startswith("#") or asset.id != asset.id.strip():
            raise ValueError(f"asset id {asset.id!r} cannot be serialized")
        lines.append(f"{asset.id},{asset.value:.10g},{asset.target:.10g}")
    return "\n".join(lines) + "\n"


def _sig10(x: float) -> float:
    return float(f"{float(x):.10g}")


def _money(x: float) -> str:
    if x < 0:
        return f"-${abs(x):,.0f}"
    return f"${x:,.0f}"


def _pct(fraction: float) -> str:
    return f"{fraction * 100.0:.0f}%"


def plan_to_dict(portfolio: Portfolio, plan: RebalancePlan, samples: Optional[List[np.ndarray]] = None) -> dict:
    """Build the JSON document: full precision plus the optimality
    certificate (k*/lambda* for l2, case/alpha or case/slack for l1)."""
    doc: dict = {"norm": plan.norm.value, "budget": _sig10(plan.budget)}
    if isinstance(plan.solution, L2Solution):
        doc["certificate"] = {
            "k_star": plan.solution.active_count,
            "lambda_star": _sig10(plan.solution.threshold),
        }
    else:
        doc["case"] = plan.solution.case.value
        if plan.solution.case is L1Case.DEFICIT:
            doc["alpha"] = _sig10(plan.solution.scale)
        else:
            doc["slack"] = _sig10(plan.solution.slack)
    doc["assets"] = [
        {
            "id": asset.id,
            "value": _sig10(asset.value),
            "target": _sig10(asset.target),
            "naive": _sig10(plan.naive[i]),
            "adjustment": _sig10(plan.adjustments[i]),
            "adjustment_cents": int(plan.rounded_cents[i]),
            "final_allocation": _sig10(plan.final_allocations[i]),
        }
        for i, asset in enumerate(portfolio.assets)
    ]
    if samples is not None:
        doc["samples"] = [[_sig10(v) for v in member] for member in samples]
    return doc


def render_json(portfolio: Portfolio, plan: RebalancePlan, samples: Optional[List[np.ndarray]] = None) -> str:
    return json.dumps(plan_to_dict(portfolio, plan, samples), indent=2) + "\n"


def render_table(portfolio: Portfolio, plan: RebalancePlan, samples: Optional[List[np.ndarray]] = None) -> str:
    """Plain-text report, whole dollars and whole percents; the JSON
    format carries the unrounded numbers."""
    total = portfolio.total
    header = ["asset", "value", "current", "target", "naive", "buy", "final"]
    body = []
    for i, asset in enumerate(portfolio.assets):
        body.append([
            asset.id,
            _money(asset.value),
            _pct(asset.value / total) if total else "n/a",
            _pct(asset.target),
            _money(plan.naive[i]),
            _money(plan.adjustments[i]),
            _pct(plan.final_allocations[i]),
        ])
    body.append([
        "total",
        _money(total),
        _pct(1.0) if total else "n/a",
        _pct(float(np.sum(portfolio.targets))),
        _money(float(np.sum(plan.naive))),
        _money(float(np.sum(plan.adjustments))),
        _pct(float(np.sum(plan.final_allocations))),
    ])
    widths = [max(len(header[c]), *(len(row[c]) for row in body)) for c in range(len(header))]
    lines = []

    def fmt(row):
        cells = [row[0].ljust(widths[0])]
        cells += [row[c].rjust(widths[c]) for c in range(1, len(row))]
        return "  ".join(cells).rstrip()

    lines.append(fmt(header))
    lines.append("  ".join("-" * w for w in widths))
    for row in body[:-1]:
        lines.append(fmt(row))
    lines.append("  ".join("-" * w for w in widths))
    lines.append(fmt(body[-1]))
    if isinstance(plan.solution, L2Solution):
        certificate = f"k* = {plan.solution.active_count}, lambda* = {plan.solution.threshold:.10g}"
    elif plan.solution.case is L1Case.DEFICIT:
        certificate = f"case = deficit, alpha = {plan.solution.scale:.10g}"
    else:
        certificate = f"case = surplus, slack = {plan.solution.slack:.10g}"
    lines.append("")
    lines.append(
        f"contribution {_money(plan.budget)} allocated under {plan.norm.value}; {certificate}"
    )
    if samples:
        lines.append("")
        lines.append(f"sampled l1 members ({len(samples)}):")
        for member in samples:
            lines.append("  " + ", ".join(f"{v:,.2f}" for v in member))
    return "\n".join(lines) + "\n"


def _rebalance_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rebalance",
        description="Allocate a cash contribution across a portfolio without selling.",
    )
    parser.add_argument("--input", required=True, help="portfolio CSV file (id,value,target)")
    parser.add_argument("--contribution", required=True, type=float, help="cash to allocate, > 0")
    parser.add_argument("--norm", choices=["l1", "l2"], default="l2", help="distance norm (default l2)")
    parser.add_argument("--format", choices=["table", "json"], default="table", dest="fmt")
    parser.add_argument("--normalize", action="store_true", help="rescale target weights to sum to 1")
    parser.add_argument("--allow-short", action="store_true", help="permit negative asset values")
    parser.add_argument("--sample", type=int, default=0, metavar="K", help="emit K sampled l1 solutions (requires --norm l1)")
    parser.add_argument("--seed", type=int, default=None, help="seed for --sample")
    return parser


def run_rebalance_command(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _rebalance_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if not math.isfinite(args.contribution) or args.contribution <= 0.0:
            raise ValueError("--contribution must be a positive amount")
        if args.sample < 0:
            raise ValueError("--sample must be nonnegative")
        if args.sample and args.norm != "l1":
            raise ValueError("--sample requires --norm l1 (the l2 solution is unique)")
        text = Path(args.input).read_text(encoding="utf-8")
        portfolio = parse_portfolio(text, normalize=args.normalize, allow_short=args.allow_short)
        plan = rebalance(portfolio, args.contribution, args.norm)
        samples = None
        if args.sample:
            rng = np.random.default_rng(args.seed)
            samples = [sample_l1_member(plan.solution, rng) for _ in range(args.sample)]
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.fmt == "json":
        sys.stdout.write(render_json(portfolio, plan, samples))
    else:
        sys.stdout.write(render_table(portfolio, plan, samples))
    return 0


def _simplex_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="project-simplex",
        description="Euclidean projection of a real vector onto the unit simplex.",
    )
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--values", help="comma-separated reals")
    group.add_argument("--input", help="file with one value per line")
    return parser


def run_project_simplex_command(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _simplex_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.values is not None:
            source = [
                (f"value {pos}", field.strip())
                for pos, field in enumerate(args.values.split(","), start=1)
            ]
        else:
            lines = Path(args.input).read_text(encoding="utf-8").splitlines()
            source = [
                (f"line {lineno}", line.strip())
                for lineno, line in enumerate(lines, start=1)
                if line.strip() and not line.strip().startswith("#")
            ]
        if not source:
            raise ValueError("no values supplied")
        values = []
        for where, field in source:
            try:
                values.append(_strict_float(field))
            except ValueError as exc:
                raise ValueError(f"{where}: {exc}") from None
        projected = simplex_mle(values)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(",".join(f"{v:.10f}" for v in projected) + "\n")
    return 0


def rebalance_main() -> None:
    sys.exit(run_rebalance_command(sys.argv[1:]))


def project_simplex_main() -> None:
    sys.exit(run_project_simplex_command(sys.argv[1:]))
