"""Command-line interface: simulate, sweep, verify, report.

Exit codes: 0 success, 1 numerical failure or missing artifacts, 2 config
schema violation (the message names the offending field).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .errors import ConfigError, NumericalError
from .experiment import (
    CANNED_CONFIGS,
    ExperimentConfig,
    canned_config,
    run_experiment,
    summarize_run,
    sweep,
    verify_static,
)

log = logging.getLogger("kslab")


def _load_config(args) -> ExperimentConfig:
    if args.canned:
        return canned_config(args.canned)
    if args.config:
        return ExperimentConfig.load(args.config)
    raise ConfigError("config: either --config PATH or --canned NAME is required")


def _cmd_simulate(args) -> int:
    config = _load_config(args)
    out = args.output_dir if args.output_dir else None
    art = run_experiment(config, out)
    report = art.report
    log.info("run %s finished: %s", config.name, report.verdict)
    print(f"verdict: {report.verdict}")
    if report.t_blowup is not None:
        print(f"t_blowup: {report.t_blowup:.9g} +- {report.t_blowup_uncertainty:.3g}")
    if report.concentrated_mass is not None:
        print(
            f"concentrated_mass(rho={report.rho_probe:.3g}): "
            f"{report.concentrated_mass:.9g} "
            f"({report.concentrated_mass / (8.0 * math.pi):.4f} x 8pi)"
        )
    print(f"artifacts: {art.run_dir}")
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("values: need at least one sweep value")
    out = args.output_dir or (Path(config.output_dir) / f"{config.name}-sweep")
    rows = sweep(config, args.parameter, values, out, max_workers=args.workers)
    failures = 0
    for r in rows:
        if r.error:
            failures += 1
            print(f"{r.parameter}={r.value:.9g}: FAILED ({r.error})")
        else:
            tb = f" t_blowup={r.t_blowup:.6g}" if r.t_blowup is not None else ""
            print(f"{r.parameter}={r.value:.9g}: {r.verdict}{tb}")
    print(f"aggregate: {Path(out) / 'sweep.csv'}")
    return 1 if failures == len(rows) else 0


def _cmd_verify(args) -> int:
    results = verify_static()
    width = max(len(c.name) for c in results)
    failed = 0
    for c in results:
        status = "PASS" if c.passed else "FAIL"
        failed += 0 if c.passed else 1
        print(f"{c.name:<{width}}  {status}  {c.detail}")
    return 1 if failed else 0


def _cmd_report(args) -> int:
    try:
        summary = summarize_run(args.run_dir)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"verdict: {summary['verdict']}")
    if summary["t_blowup"] is not None:
        print(f"t_blowup: {summary['t_blowup']:.9g}")
    print(f"t_final: {summary['t_final']:.9g}")
    if summary["concentrated_mass"] is not None:
        print(
            f"concentrated mass ~ 8pi check: {summary['concentrated_mass']:.9g} "
            f"({summary['concentrated_mass_over_8pi']:.4f} x 8pi at "
            f"rho={summary['rho_probe']:.3g})"
        )
    print(f"sup-norm trend: {summary['sup_u_trend']} "
          f"({summary['sup_u_initial']:.6g} -> {summary['sup_u_final']:.6g})")
    print(f"mass drift: {summary['mass_drift']:.3e}")
    if summary["residual_min"] is not None:
        print(f"inequality residual extrema: [{summary['residual_min']:.3e}, "
              f"{summary['residual_max']:.3e}]")
    if "annulus_decay_C_hat" in summary:
        print(f"annulus decay constant C_hat: {summary['annulus_decay_C_hat']:.6g} "
              f"(R^2 = {summary['annulus_fit_r_squared']:.4f})")
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kslab",
        description="Numerical laboratory for chemotaxis blowup criteria and "
        "8pi mass concentration.",
    )
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configured simulation")
    p_sim.add_argument("--config", help="path to a YAML/JSON experiment config")
    p_sim.add_argument("--canned", choices=sorted(CANNED_CONFIGS),
                       help="name of a shipped experiment")
    p_sim.add_argument("--output-dir", help="run artifact directory")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sw = sub.add_parser("sweep", help="sweep one config parameter")
    p_sw.add_argument("--config")
    p_sw.add_argument("--canned", choices=sorted(CANNED_CONFIGS))
    p_sw.add_argument("--parameter", required=True,
                      help="dotted config field, e.g. datum.mass")
    p_sw.add_argument("--values", required=True, help="comma-separated values")
    p_sw.add_argument("--workers", type=int, default=None,
                      help="parallel runs (default: one per core)")
    p_sw.add_argument("--output-dir")
    p_sw.set_defaults(func=_cmd_sweep)

    p_ver = sub.add_parser("verify", help="run the static identity/inequality suite")
    p_ver.set_defaults(func=_cmd_verify)

    p_rep = sub.add_parser("report", help="summarize a completed run directory")
    p_rep.add_argument("run_dir")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level))
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
