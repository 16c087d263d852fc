"""Command-line front end.

Subcommands: ``paper-example``, ``analytic``, ``simulate``, ``oracle`` and
``sweep``.  Every flag can also come from an environment variable named
``GMAMM_<FLAG>`` (e.g. ``GMAMM_SEED``); explicit flags win.  Reports go to
stdout, diagnostics to stderr.  Exit codes: 0 success, 1 a check failed,
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time

import numpy as np

from . import checks as chk
from .analytics import two_security_metrics
from .config import ConfigError, config_to_dict, load_config
from .equilibrium import SolverConfig, solve_equilibrium
from .metrics import MetricsReport
from .model import SecurityParams, two_security_model
from .oracle import CapacityError, exact_metrics
from .report import CSV_METRICS, RunReport, example_lines, price_tree, render_text, sweep_csv
from .simulator import SimulationConfig, apply_point, grid_points, run

ENV_PREFIX = "GMAMM_"
EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


def paper_config(rounds: int = 1_000_000, seed: int = 0, workers: int = 1) -> SimulationConfig:
    params = (SecurityParams(50.0, 1.0, 0.5, 0), SecurityParams(50.0, 1.0, 0.5, 1))
    return SimulationConfig(two_security_model(0.9), params, "base", True, rounds, seed, workers)


# --- metric paths -------------------------------------------------------------

def _equilibria(cfg: SimulationConfig) -> dict:
    solver = SolverConfig(variant=cfg.variant)
    return {
        "with_amm": solve_equilibrium(cfg.params, cfg.model, True, solver),
        "without_amm": solve_equilibrium(cfg.params, cfg.model, False, solver),
    }


def analytic_metrics(cfg: SimulationConfig, eqs: dict | None = None) -> MetricsReport:
    """Closed forms for two securities; exact enumeration otherwise (tagged ``oracle``)."""
    if cfg.mode == "extended":
        eqs = eqs or _equilibria(cfg)
        eq = eqs["with_amm" if cfg.with_amm else "without_amm"]
        pricing = [s.with_gamma(g) for s, g in zip(cfg.params, eq.gamma)]
        if cfg.model.n == 2:
            return two_security_metrics(cfg.model, pricing, cfg.with_amm,
                                        eq.transaction_probability)
        return exact_metrics(cfg.model, cfg.params, "extended", cfg.with_amm,
                             pis=eq.pi, variant=cfg.variant)
    if cfg.model.n == 2:
        return two_security_metrics(cfg.model, cfg.params, cfg.with_amm)
    return exact_metrics(cfg.model, cfg.params, "base", cfg.with_amm)


def oracle_metrics(cfg: SimulationConfig, eqs: dict | None = None) -> MetricsReport:
    pis = None
    if cfg.mode == "extended":
        eqs = eqs or _equilibria(cfg)
        pis = eqs["with_amm" if cfg.with_amm else "without_amm"].pi
    return exact_metrics(cfg.model, cfg.params, cfg.mode, cfg.with_amm,
                         pis=pis, variant=cfg.variant)


def _report(command: str, cfg: SimulationConfig, metrics: list[MetricsReport], eqs=None) -> RunReport:
    rep = RunReport(command, config_to_dict(cfg), metrics)
    for m in metrics:
        rep.checks.extend(chk.proposition_checks(m, cfg.model))
    if eqs:
        rep.equilibria = eqs
        rep.checks.extend(chk.extended_checks(eqs["with_amm"], eqs["without_amm"], cfg.params))
    if cfg.model.n == 2:
        pricing = cfg.params
        if cfg.mode == "extended":
            pricing = [s.with_gamma(g) for s, g in zip(cfg.params, eqs["with_amm"].gamma)]
        rep.price_tree = price_tree(cfg.model, pricing)
    return rep


def cmd_paper_example(cfg: SimulationConfig) -> RunReport:
    analytic = analytic_metrics(cfg)
    oracle = oracle_metrics(cfg)
    metrics = [analytic, oracle]
    if cfg.rounds > 0:
        metrics.append(run(cfg).metrics)
    rep = _report("paper-example", cfg, metrics)
    for m in metrics:
        rep.checks.extend(chk.example_checks(m, 0))
    return rep


def cmd_analytic(cfg):
    eqs = _equilibria(cfg) if cfg.mode == "extended" else None
    return _report("analytic", cfg, [analytic_metrics(cfg, eqs)], eqs)


def cmd_oracle(cfg):
    eqs = _equilibria(cfg) if cfg.mode == "extended" else None
    return _report("oracle", cfg, [oracle_metrics(cfg, eqs)], eqs)


def cmd_simulate(cfg):
    stats = run(cfg)
    eqs = _equilibria(cfg) if cfg.mode == "extended" else None
    metrics = [stats.metrics] if cfg.rounds > 0 else []
    return _report("simulate", cfg, metrics, eqs)


def parse_grid(specs: list[str]) -> dict:
    """``name=v1,v2,...`` or ``name=start:stop:step`` (stop inclusive)."""
    grid = {}
    for spec in specs:
        name, sep, values = spec.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"grid spec {spec!r} must look like name=values")
        name = name.strip()
        try:
            if ":" in values:
                start, stop, step = (float(x) for x in values.split(":"))
                if step <= 0:
                    raise ValueError
                count = int(np.floor((stop - start) / step + 1e-9)) + 1
                vals = [round(start + k * step, 12) for k in range(count)]
            else:
                vals = [float(x) for x in values.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"grid spec {spec!r}: cannot parse values") from None
        grid[name] = vals
    return grid


def cmd_sweep(cfg, grid: dict, path: str, security: int) -> str:
    rows = []
    n = cfg.model.n
    if not 1 <= security <= n:
        raise UsageError(f"--security must lie in 1..{n}")
    for k, point in enumerate(grid_points(grid)):
        try:
            pc = apply_point(cfg, point)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"grid.{next(iter(point))}", str(exc).strip("'\"")) from None
        eqs = _equilibria(pc) if pc.mode == "extended" else None
        if path == "analytic":
            m = analytic_metrics(pc, eqs)
        elif path == "oracle":
            m = oracle_metrics(pc, eqs)
        else:
            m = run(pc, stream=(k,)).metrics
        s = m.securities[security - 1]
        row = {"point": k, "security": security, "path": m.path}
        if pc.mode == "extended":
            eq = eqs["with_amm" if pc.with_amm else "without_amm"]
            gammas = eq.gamma
            for j, sp in enumerate(pc.params):
                row[f"delta{j + 1}"] = sp.delta
        else:
            gammas = [sp.gamma for sp in pc.params]
        for j, g in enumerate(gammas):
            row[f"gamma{j + 1}"] = float(g)
        row["phi"] = pc.model.phi
        for col, attr in CSV_METRICS:
            row[col] = getattr(s, attr)
            if s.se is not None:
                row[f"se_{col}"] = s.se.get(attr)
        rows.append(row)
    return sweep_csv(rows, n, cfg.mode == "extended")


# --- argument handling ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=_env("config"), help="configuration file")
    common.add_argument("--rounds", type=int, default=_env("rounds"), help="simulated rounds")
    common.add_argument("--seed", type=int, default=_env("seed"), help="master seed (u64)")
    common.add_argument("--workers", type=int, default=_env("workers", 1),
                        help="parallel workers (does not change results)")
    common.add_argument("--format", choices=("json", "csv", "text"),
                        default=_env("format", "text"))
    common.add_argument("--variant", choices=("paper", "renormalized"), default=_env("variant"),
                        help="informed-fraction formula of the extended model")

    parser = argparse.ArgumentParser(prog="gmamm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("paper-example", parents=[common], help="reproduce the worked example")
    for name in ("analytic", "simulate", "oracle"):
        sub.add_parser(name, parents=[common], help=f"{name} metrics for a configuration")
    sw = sub.add_parser("sweep", parents=[common], help="CSV sweep over a parameter grid")
    sw.add_argument("--grid", action="append", default=[], metavar="NAME=VALUES",
                    help="grid axis, e.g. phi=0.5:1.0:0.1 or gamma1=0.2,0.5 (repeatable)")
    sw.add_argument("--path", choices=("analytic", "oracle", "simulated"),
                    default=_env("path", "simulated"))
    sw.add_argument("--security", type=int, default=1, help="1-based security to report")
    return parser


def _resolve_config(args) -> SimulationConfig:
    if args.command == "paper-example" and not args.config:
        cfg = paper_config()
    else:
        if not args.config:
            raise UsageError(f"{args.command} needs --config")
        cfg = load_config(args.config)
    changes = {}
    try:
        if args.rounds is not None:
            changes["rounds"] = int(args.rounds)
        if args.seed is not None:
            changes["master_seed"] = int(args.seed)
        changes["workers"] = int(args.workers)
    except ValueError:
        raise UsageError("rounds, seed and workers must be integers") from None
    if args.variant:
        changes["variant"] = args.variant
    try:
        return dataclasses.replace(cfg, **changes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = _resolve_config(args)
        if args.command == "sweep":
            out = cmd_sweep(cfg, parse_grid(args.grid), args.path, args.security)
            sys.stdout.write(out)
            code = EXIT_OK
        else:
            handler = {"paper-example": cmd_paper_example, "analytic": cmd_analytic,
                       "simulate": cmd_simulate, "oracle": cmd_oracle}[args.command]
            rep = handler(cfg)
            if args.format == "json":
                sys.stdout.write(rep.to_json())
            elif args.format == "csv":
                sys.stdout.write(_report_csv(rep))
            else:
                if args.command == "paper-example":
                    sys.stdout.write("\n".join(example_lines(rep)) + "\n\n")
                sys.stdout.write(render_text(rep))
            code = EXIT_OK if rep.passed else EXIT_CHECK
            if not rep.passed:
                for c in rep.checks:
                    if not c.passed:
                        print(f"check failed: {c.path} security {c.security + 1} {c.name}: "
                              f"{c.inequality} margin={c.margin}", file=sys.stderr)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"elapsed {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return code


def _report_csv(rep: RunReport) -> str:
    cfg = rep.config
    n = cfg["model"]["n"]
    extended = cfg["run"]["mode"] == "extended"
    rows = []
    for m in rep.metrics:
        for i, s in enumerate(m.securities):
            row = {"point": 0, "security": i + 1, "path": m.path, "phi": cfg["model"].get("phi")}
            for j, sec in enumerate(cfg["securities"]):
                if "gamma" in sec:
                    row[f"gamma{j + 1}"] = sec["gamma"]
                if extended:
                    row[f"delta{j + 1}"] = sec["delta"]
            if extended:
                label = "with_amm" if cfg["run"]["with_amm"] else "without_amm"
                for j, g in enumerate(rep.equilibria[label].gamma):
                    row[f"gamma{j + 1}"] = g
            for col, attr in CSV_METRICS:
                row[col] = getattr(s, attr)
                if s.se is not None:
                    row[f"se_{col}"] = s.se.get(attr)
            rows.append(row)
    return sweep_csv(rows, n, extended)


if __name__ == "__main__":
    sys.exit(main())
