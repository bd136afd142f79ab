"""Command-line front door.

Subcommands:

* ``run``   — execute a benchmark experiment, write regret/rewards CSVs,
  print a terminal-regret summary table.
* ``sweep`` — discount (gamma) or arm-count sweep, write sweep.csv.
* ``prob``  — exact probability of picking the sub-optimal arm, with an
  optional Monte-Carlo cross-check.
* ``envs``  — list the environment presets.

Data goes to files, summaries to standard output. Errors exit nonzero.
The default output directory can be overridden with $BANDITLAB_OUT.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

from . import __version__
from .config import (
    DEFAULT_POLICIES,
    ExperimentConfig,
    PolicySpec,
    parse_config_file,
)
from .environments import PRESET_NAMES, preset_environment
from .errors import ConfigError, ConvergenceError, PrecisionError, PrecisionWarning
from .harness import run_experiment, sweep_arms, sweep_gamma, write_sweep_csv
from .policies import PRESET_POLICY_PARAMS
from .rng import RngState
from .suboptimal import ProbQuery, beta0_condition_check, mc_prob_suboptimal, prob_suboptimal


def _default_out() -> str:
    return os.environ.get("BANDITLAB_OUT", ".")


def parse_grid(text: str) -> list[float]:
    """Parse ``start:stop:step`` (inclusive) or a comma list of values."""
    text = text.strip()
    if not text:
        raise ConfigError("empty grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid range must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"non-numeric grid range {text!r}") from None
        if step <= 0 or stop < start:
            raise ConfigError(f"grid range needs step > 0 and stop >= start, got {text!r}")
        values = []
        k = 0
        while True:
            value = start + k * step
            if value > stop + 1e-12:
                break
            values.append(round(value, 12))
            k += 1
        return values
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"non-numeric grid {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditlab",
        description="Non-stationary bandit benchmarking laboratory.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark experiment")
    run.add_argument("--config", help="experiment config file")
    run.add_argument("--env", help="environment preset or schedule CSV")
    run.add_argument("--arms", type=int, help="number of arms (presets)")
    run.add_argument("--horizon", type=int, help="timesteps per run")
    run.add_argument("--runs", type=int, help="independent replications")
    run.add_argument("--seed", type=int, help="base seed")
    run.add_argument("--regret-mode", choices=("expected", "realized"))
    run.add_argument("--policies", help="comma list of policy names")
    run.add_argument("--out", help="output directory")
    run.add_argument("--jobs", type=int, help="parallel worker processes")

    sweep = sub.add_parser("sweep", help="parameter sweeps")
    sweep.add_argument("kind", choices=("gamma", "arms"))
    sweep.add_argument("--config", help="experiment config file")
    sweep.add_argument("--grid", required=True,
                       help="start:stop:step or comma list")
    sweep.add_argument("--env", help="environment preset")
    sweep.add_argument("--policies", help="comma list of policy names (arms sweep)")
    sweep.add_argument("--arms", type=int)
    sweep.add_argument("--horizon", type=int)
    sweep.add_argument("--runs", type=int)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--out", help="output directory")
    sweep.add_argument("--jobs", type=int)

    prob = sub.add_parser(
        "prob", help="exact probability of picking the sub-optimal arm"
    )
    prob.add_argument("alpha1", type=float)
    prob.add_argument("beta1", type=float)
    prob.add_argument("alpha2", type=float)
    prob.add_argument("beta2", type=float)
    prob.add_argument("--mc", type=int, metavar="N",
                      help="also print an N-draw Monte-Carlo estimate")
    prob.add_argument("--seed", type=int, default=1)
    prob.add_argument("--json", action="store_true")

    envs = sub.add_parser("envs", help="list environment presets")
    envs.add_argument("--json", action="store_true")
    envs.add_argument("--arms", type=int, default=4)
    return parser


def _experiment_config(args, need_policies: bool) -> ExperimentConfig:
    if getattr(args, "config", None):
        config = parse_config_file(args.config)
    else:
        config = ExperimentConfig(out=_default_out())
    overrides = {}
    for key in ("env", "arms", "horizon", "runs", "seed", "out", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "regret_mode", None) is not None:
        overrides["regret_mode"] = args.regret_mode
    if getattr(args, "policies", None):
        names = [p.strip() for p in args.policies.split(",") if p.strip()]
        if not names:
            raise ConfigError("empty --policies list")
        overrides["policies"] = tuple(PolicySpec(name) for name in names)
    if getattr(args, "jobs", None) is None:
        overrides.setdefault("jobs", os.cpu_count() or 1)
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides)
    if need_policies:
        config = config.with_default_policies()
    return config


def _cmd_run(args) -> int:
    config = _experiment_config(args, need_policies=True)
    curves = run_experiment(config)
    print(f"environment: {config.env} (arms={config.arms}, horizon={config.horizon}, "
          f"runs={config.runs}, seed={config.seed}, mode={config.regret_mode})")
    print(f"{'policy':<12} {'terminal_norm_regret':>20} {'stderr':>12}")
    for label, curve in curves.items():
        print(f"{label:<12} {curve.terminal_norm:>20.6f} "
              f"{curve.terminal_norm_stderr:>12.6f}")
    print(f"wrote {os.path.join(config.out, 'regret.csv')} and "
          f"{os.path.join(config.out, 'rewards.csv')}")
    return 0


def _cmd_sweep(args) -> int:
    config = _experiment_config(args, need_policies=(args.kind == "arms"))
    grid = parse_grid(args.grid)
    if args.kind == "gamma":
        rows = sweep_gamma(config, grid)
    else:
        rows = sweep_arms(config, grid)
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, "sweep.csv")
    write_sweep_csv(path, rows)
    print(f"{'param':>8} {'policy':<12} {'terminal_norm_regret':>20} {'stderr':>12}")
    for param, label, value, stderr in rows:
        print(f"{param:>8} {label:<12} {value:>20.6f} {stderr:>12.6f}")
    print(f"wrote {path}")
    return 0


def _cmd_prob(args) -> int:
    query = ProbQuery(args.alpha1, args.beta1, args.alpha2, args.beta2)
    check = beta0_condition_check(0.0, 0.0, min(args.beta1, args.beta2))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PrecisionWarning)
        exact = prob_suboptimal(query)
        slow = [str(w.message) for w in caught]
    payload = {
        "alpha1": args.alpha1, "beta1": args.beta1,
        "alpha2": args.alpha2, "beta2": args.beta2,
        "prob_suboptimal": exact,
    }
    if not check.ok:
        payload["warning"] = check.message
    if slow:
        payload["precision_warning"] = "; ".join(slow)
    if args.mc:
        mc = mc_prob_suboptimal(query, args.mc, RngState(args.seed))
        payload["mc_estimate"] = mc
        payload["mc_draws"] = args.mc
        payload["abs_difference"] = abs(exact - mc)
    if args.json:
        print(json.dumps(payload, indent=2))
        return 0
    print(f"P(theta_2 > theta_1) = {exact:.12g}")
    if args.mc:
        print(f"monte-carlo ({args.mc} draws) = {payload['mc_estimate']:.12g}")
        print(f"abs difference = {payload['abs_difference']:.3g}")
    for key in ("warning", "precision_warning"):
        if key in payload:
            print(f"warning: {payload[key]}", file=sys.stderr)
    return 0


def _preset_description(name: str, arms: int) -> dict:
    schedule = preset_environment(name, arms)
    info: dict = {
        "name": name,
        "arms": arms,
        "policy_defaults": PRESET_POLICY_PARAMS[name],
    }
    if name in ("fast", "slow"):
        info["kind"] = "sinusoidal"
        info["period"] = schedule.period
        info["offsets"] = list(schedule.offsets)
    else:
        info["kind"] = "abrupt"
        info["cycle"] = schedule.cycle
        info["changes"] = [
            {"arm": arm, "t_in_cycle": when, "value": value}
            for arm, steps in enumerate(schedule.changes)
            for when, value in steps
        ]
    return info


def _cmd_envs(args) -> int:
    presets = [_preset_description(name, args.arms) for name in PRESET_NAMES]
    if args.json:
        print(json.dumps(presets, indent=2))
        return 0
    for info in presets:
        print(f"{info['name']}: {info['kind']}, {info['arms']} arms")
        if info["kind"] == "sinusoidal":
            offsets = ", ".join(f"{p:.4f}" for p in info["offsets"])
            print(f"  period {info['period']}, offsets [{offsets}]")
        else:
            print(f"  cycle {info['cycle']}")
            for change in info["changes"]:
                print(f"  arm {change['arm'] + 1} -> {change['value']} "
                      f"at t = {change['t_in_cycle']} (within cycle)")
        defaults = ", ".join(
            f"{policy}({', '.join(f'{k}={v}' for k, v in params.items())})"
            for policy, params in info["policy_defaults"].items()
        )
        print(f"  defaults: {defaults}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "prob": _cmd_prob,
        "envs": _cmd_envs,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}\nhint: try the Monte-Carlo estimate via --mc",
              file=sys.stderr)
        return 3
    except PrecisionError as exc:
        print(f"error: {exc}\nhint: try the Monte-Carlo estimate via --mc",
              file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
