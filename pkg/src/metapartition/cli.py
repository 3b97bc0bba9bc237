"""Command-line entry point.

    metapartition solve-stopping --config run.json [--format csv|json] [--output PATH]
    metapartition solve-partition --config run.json
    metapartition solve-goal --config run.json --verbose
    metapartition eval-environment --config run.json --seed 7 --samples 100000

Exit status: 0 on success, 2 for configuration errors, 3 for solver errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from typing import Optional

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .environment import value_of_metareasoning
from .errors import MetapartitionError
from .goal import alternate_planning_time, solve_goal_generic, solve_goal_linear
from .models import LinearCost, LinearEfficacy, PartitionedInversePower
from .partition import (
    check_hessian,
    planning_residual,
    solve_partition,
    solve_partition_closed_form,
    solve_partition_fixed_point,
    solve_partition_grid,
)
from .stopping import marginal_gap, solve_stop, solve_stop_generic
from .sweeps import partition_slices, sweep, value_curve

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

COMMANDS = {
    "solve-stopping": "stopping",
    "solve-partition": "partition",
    "solve-goal": "goal",
    "eval-environment": "environment",
}


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------


def _solve_stopping(model, search):
    if model.method == "marginal_search":
        return solve_stop_generic(model.profile, model.cost, model.t_mm, search)
    return solve_stop(model.profile, model.cost, model.t_mm, search)


def _solve_partition(model, search):
    p, cost, eff = model.profile, model.cost, model.efficacy
    method = model.method
    if method == "closed_form":
        if not (isinstance(p, PartitionedInversePower) and isinstance(eff, LinearEfficacy) and isinstance(cost, LinearCost)):
            raise ConfigError("model.method", "closed_form needs a partitioned inverse-power profile with linear efficacy and linear cost")
        return solve_partition_closed_form(p.a, p.b, eff.k_o, eff.l, cost.c, model.t_mm)
    if method == "fixed_point":
        if not isinstance(p, PartitionedInversePower):
            raise ConfigError("model.method", "fixed_point needs a partitioned inverse-power profile")
        return solve_partition_fixed_point(p.a, p.b, eff, cost, model.t_mm, search)
    if method == "grid_2d":
        return solve_partition_grid(p, cost, model.t_mm, search)
    return solve_partition(p, cost, model.t_mm, search)


def _solve_goal(model, search):
    eff = model.goal.efficacy
    if model.method in ("auto", "closed_form") and isinstance(eff, LinearEfficacy) and eff.l > 0:
        return solve_goal_linear(eff.k_o, eff.l, model.goal.f, model.t_mm)
    if model.method == "closed_form":
        raise ConfigError("model.method", "closed_form needs linear efficacy with l > 0")
    return solve_goal_generic(model.goal, search)


def _evaluate_environment(model, seed, samples):
    v = model.valuation
    return value_of_metareasoning(
        model.environment,
        model.a1,
        model.a2,
        method=v["method"],
        seed=v["seed"] if seed is None else seed,
        samples=v["samples"] if samples is None else samples,
        order=v["order"],
        utility=v["utility"],
    )


def _solution_row(sol) -> dict:
    row = {k: v for k, v in asdict(sol).items() if k != "per_instance"}
    return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else v) for k, v in row.items()}


def _diagnostics(task: str, model, sol) -> dict:
    diag: dict = {}
    if task == "stopping":
        if not sol.at_boundary:
            diag["marginal_gap"] = float(marginal_gap(model.profile, model.cost, model.t_mm, sol.t_e_star))
    elif task == "partition":
        h = check_hessian(model.profile, model.cost, model.t_mm, sol.t_m_star, sol.t_e_star)
        diag["gradient"] = [float(x) for x in h.gradient]
        diag["hessian"] = [[float(x) for x in r] for r in h.matrix]
        diag["hessian_eigenvalues"] = [float(x) for x in h.eigenvalues]
        if isinstance(model.profile, PartitionedInversePower) and not sol.at_boundary:
            p = model.profile
            diag["planning_residual"] = float(
                planning_residual(p.a, p.b, model.efficacy, model.cost, model.t_mm, sol.t_m_star)
            )
            diag["coupling_residual"] = sol.t_e_star - p.a * float(model.efficacy.value(sol.t_m_star)) / (
                p.b * float(model.efficacy.derivative(sol.t_m_star))
            )
    elif task == "goal":
        diag["balance_residual"] = sol.foc_residual
        eff = model.goal.efficacy
        if isinstance(eff, LinearEfficacy) and eff.l > 0:
            diag["t_m_star_balance_form"] = sol.t_m_star
            try:
                diag["t_m_star_alternate_form"] = alternate_planning_time(eff.k_o, eff.l, model.goal.f)
            except ValueError:
                diag["t_m_star_alternate_form"] = None
    elif task == "environment":
        diag["samples"] = sol.samples
    return diag


def run(cfg: RunConfig, *, verbose: bool = False, seed=None, samples=None) -> dict:
    """Execute a parsed configuration and return the report dictionary."""
    task, search = cfg.task, cfg.search
    solver = {
        "stopping": lambda m: _solve_stopping(m, search),
        "partition": lambda m: _solve_partition(m, search),
        "goal": lambda m: _solve_goal(m, search),
        "environment": lambda m: _evaluate_environment(m, seed, samples),
    }[task]
    report: dict = {"task": task, "config": cfg.raw}
    if cfg.sweep_models:
        if task == "environment":
            rows = []
            for v, m in cfg.sweep_models:
                val = solver(m)
                rows.append({"value": v, "delta_value": val.value, "standard_error": val.standard_error})
        else:
            by_value = dict(cfg.sweep_models)
            rows = [p.as_dict() for p in sweep(lambda v: solver(by_value[v]), [v for v, _ in cfg.sweep_models])]
            if task == "goal":
                for r in rows:
                    r.pop("u_c_star")
        report["rows"] = rows
        return report

    sol = solver(cfg.model)
    report["solution"] = _solution_row(sol)
    m = cfg.model
    raw = cfg.raw
    if task == "stopping" and "curve" in raw:
        c = raw["curve"]
        hi = c.get("stop", max(4.0 * sol.t_e_star, 1.0))
        grid = np.linspace(c.get("start", 0.0), hi, c.get("points", 201))
        report["curve"] = value_curve(m.profile, m.cost, m.t_mm, grid)
    if task == "partition" and "slices" in raw:
        s = raw["slices"]
        planning, execution = partition_slices(
            m.profile, m.cost, m.t_mm, sol.t_m_star, sol.t_e_star, s.get("points", 101), s.get("span", 2.0)
        )
        report["slices"] = {"planning": planning, "execution": execution}
    if verbose:
        report["diagnostics"] = _diagnostics(task, m, sol)
    return report


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(v)


def _table(report: dict) -> tuple[list[str], list[dict]]:
    if "rows" in report:
        rows = report["rows"]
    elif "curve" in report:
        rows = report["curve"]
    elif "slices" in report:
        rows = [{"slice": "planning", "t": r["t_m"], "u_c": r["u_c"]} for r in report["slices"]["planning"]]
        rows += [{"slice": "execution", "t": r["t_e"], "u_c": r["u_c"]} for r in report["slices"]["execution"]]
    else:
        rows = [report["solution"]]
    header = list(rows[0].keys()) if rows else []
    return header, rows


def _finite(obj):
    """Strict JSON has no infinities; report them as null."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_finite(report), indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        header, rows = _table(report)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r.get(h)) for h in header])
        return buf.getvalue()
    lines = [f"task: {report['task']}"]
    for k, v in report.get("solution", {}).items():
        lines.append(f"  {k}: {_fmt(v)}")
    for k, v in report.get("diagnostics", {}).items():
        lines.append(f"  [diag] {k}: {v if isinstance(v, list) else _fmt(v)}")
    if "rows" in report or "curve" in report or "slices" in report:
        header, rows = _table(report)
        lines.append("  " + "  ".join(header))
        lines.extend("  " + "  ".join(_fmt(r.get(h)) for h in header) for r in rows)
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metapartition", description="Ideal stopping and planning/execution partitions.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="Path to a JSON run configuration.")
        p.add_argument("--output", default=None, help="Output path, or - for standard output.")
        p.add_argument("--format", choices=("csv", "json", "text"), default=None)
        p.add_argument("--verbose", action="store_true", help="Include first-order residuals and diagnostics.")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.task != COMMANDS[args.command]:
            raise ConfigError("task", f"{args.command} runs task {COMMANDS[args.command]!r}, config has {cfg.task!r}")
        if args.samples is not None and args.samples < 2:
            raise ConfigError("--samples", "must be at least 2")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run(cfg, verbose=args.verbose, seed=args.seed, samples=args.samples)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MetapartitionError, FloatingPointError, ZeroDivisionError, OverflowError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    default = "csv" if any(k in report for k in ("rows", "curve", "slices")) else "text"
    fmt = args.format or cfg.output_format or default
    text = render(report, fmt)
    path = args.output or cfg.output_path
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
