"""Seeded policy-vs-environment runs, regret aggregation, and sweeps.

Regret is measured against the dynamic oracle: at each step the oracle
collects the highest expected reward available, so a policy's per-step
regret increment is ``mu*(t) - mu_{I_t, t}`` (expected mode, the default)
or ``mu*(t) - X_{I_t, t}`` (realized mode). Both estimate the same
quantity; the expected mode has strictly lower variance.

Reproducibility contract: replication ``i`` draws from the substream
``derive_substream(RngState(seed), i)``, with policy and environment draws
interleaved on that one stream in the fixed order select -> draw ->
binarize. Runs are aggregated in replication order with exact (fsum)
summation, so serial and parallel execution produce byte-identical output
files.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, PolicySpec, build_schedule
from .environments import Schedule
from .errors import ConfigError
from .policies import (
    OraclePolicy,
    Policy,
    PRESET_POLICY_PARAMS,
    exp3ix_params,
    make_policy,
    rexp3_gamma,
)
from .rng import RngState, derive_substream

REGRET_CSV_HEADER = ("policy", "t", "mean_cum_regret", "norm_regret", "stderr", "n_runs")
REWARDS_CSV_HEADER = ("policy", "t", "mean_inst_reward")
SWEEP_CSV_HEADER = ("param", "policy", "terminal_norm_regret", "stderr")

# The discount study runs the Thompson family with the prior expressed as
# one unit of discounted pseudo-evidence per outcome (S = F = 1, zero
# offsets) instead of fixed offsets alpha0 = beta0 = 1. At gamma = 1 the
# two parameterizations coincide with classic TS; away from gamma = 1 the
# eroding prior is what produces the benchmark's characteristic regret
# peak near gamma = 0.95 in the abrupt environment.
GAMMA_SWEEP_PRIOR = {"alpha0": 0.0, "beta0": 0.0, "s0": 1.0, "f0": 1.0}


@dataclass(frozen=True)
class RunTrajectory:
    """Per-step record of one seeded run."""

    arms: np.ndarray      # chosen arm I_t
    expected: np.ndarray  # mu_{I_t, t}
    realized: np.ndarray  # X_{I_t, t} in {0, 1}
    oracle: np.ndarray    # mu*_t

    def __post_init__(self):
        n = len(self.arms)
        if not (len(self.expected) == len(self.realized) == len(self.oracle) == n):
            raise ValueError("trajectory series must share one length")


@dataclass(frozen=True)
class RegretCurve:
    """Cross-replication regret summary, one entry per timestep."""

    mean_cum: np.ndarray
    norm: np.ndarray
    stderr: np.ndarray
    n_runs: int

    @property
    def terminal_norm(self) -> float:
        return float(self.norm[-1])

    @property
    def terminal_norm_stderr(self) -> float:
        return float(self.stderr[-1]) / len(self.norm)


def resolve_policy(spec: PolicySpec, num_arms: int, horizon: int,
                   env_preset: str | None) -> Policy:
    return make_policy(spec.name, num_arms, horizon=horizon,
                       env_preset=env_preset, **spec.params)


def _simulate(policy: Policy, means: np.ndarray, rng: RngState) -> tuple[np.ndarray, np.ndarray]:
    """Drive one run; returns (arms, realized). ``means`` is (K, T)."""
    horizon = means.shape[1]
    arms = np.empty(horizon, dtype=np.int32)
    realized = np.empty(horizon, dtype=np.float64)
    generator = rng.generator
    mu_rows = means.T  # (T, K): row t-1 holds the arm means at step t
    for t in range(horizon):
        arm = policy.select(rng).arm
        r = 1.0 if generator.random() < mu_rows[t, arm] else 0.0
        policy.update(arm, r, rng)
        arms[t] = arm
        realized[t] = r
    return arms, realized


def run_single(schedule: Schedule, spec: PolicySpec, horizon: int,
               rng: RngState, env_preset: str | None = None) -> RunTrajectory:
    """One seeded run of a freshly built policy against the schedule."""
    means = schedule.means_matrix(horizon)
    oracle = means.max(axis=0)
    if spec.name == "oracle":
        policy: Policy = OraclePolicy(means)
    else:
        policy = resolve_policy(spec, schedule.num_arms, horizon, env_preset)
    arms, realized = _simulate(policy, means, rng)
    expected = means[arms, np.arange(horizon)]
    return RunTrajectory(arms=arms, expected=expected, realized=realized, oracle=oracle)


def aggregate(trajectories, mode: str = "expected") -> RegretCurve:
    """Average cumulative regret across replications, with standard errors.

    Summation across replications uses math.fsum (exact), so the result is
    independent of trajectory order.
    """
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("no trajectories to aggregate")
    horizon = len(trajectories[0].arms)
    for tr in trajectories:
        if len(tr.arms) != horizon:
            raise ValueError("trajectories must share one horizon")
    if mode not in ("expected", "realized"):
        raise ValueError(f"unknown regret mode {mode!r}")
    rows = []
    for tr in trajectories:
        picked = tr.expected if mode == "expected" else tr.realized
        rows.append(np.cumsum(tr.oracle - picked))
    cum = np.array(rows)  # (N, T)
    n = cum.shape[0]
    mean = np.empty(horizon)
    stderr = np.empty(horizon)
    columns = cum.T.copy()
    for t in range(horizon):
        column = columns[t].tolist()
        m = math.fsum(column) / n
        mean[t] = m
        if n > 1:
            var = math.fsum((x - m) ** 2 for x in column) / (n - 1)
            stderr[t] = math.sqrt(var / n)
        else:
            stderr[t] = 0.0
    steps = np.arange(1, horizon + 1)
    return RegretCurve(mean_cum=mean, norm=mean / steps, stderr=stderr, n_runs=n)


def _mean_columns(matrix: np.ndarray) -> np.ndarray:
    """Exact per-column means of an (N, T) matrix."""
    n, horizon = matrix.shape
    out = np.empty(horizon)
    columns = matrix.T.copy()
    for t in range(horizon):
        out[t] = math.fsum(columns[t].tolist()) / n
    return out


def _run_block(args) -> list[tuple[np.ndarray, np.ndarray]]:
    """Worker: run a block of replications, returning (arms, realized) pairs."""
    schedule, spec, horizon, seed, env_preset, indices = args
    means = schedule.means_matrix(horizon)
    base = RngState(seed)
    out = []
    for i in indices:
        if spec.name == "oracle":
            policy: Policy = OraclePolicy(means)
        else:
            policy = resolve_policy(spec, schedule.num_arms, horizon, env_preset)
        out.append(_simulate(policy, means, derive_substream(base, i)))
    return out


def run_replications(schedule: Schedule, spec: PolicySpec, horizon: int,
                     runs: int, seed: int, env_preset: str | None = None,
                     jobs: int = 1) -> list[RunTrajectory]:
    """``runs`` independent replications on substreams 0..runs-1.

    With jobs > 1 the replication blocks execute in worker processes;
    results are reassembled in replication order, so the output is
    identical to a serial run.
    """
    means = schedule.means_matrix(horizon)
    oracle = means.max(axis=0)
    time_index = np.arange(horizon)
    if jobs <= 1 or runs == 1:
        blocks = [_run_block((schedule, spec, horizon, seed, env_preset, range(runs)))]
    else:
        jobs = min(jobs, runs)
        chunks = [list(range(runs))[w::jobs] for w in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(
                _run_block,
                [(schedule, spec, horizon, seed, env_preset, chunk) for chunk in chunks],
            ))
        # Stitch the strided chunks back into replication order.
        ordered: list = [None] * runs
        for chunk, block in zip(chunks, results):
            for i, pair in zip(chunk, block):
                ordered[i] = pair
        blocks = [ordered]
    trajectories = []
    for arms, realized in blocks[0]:
        trajectories.append(RunTrajectory(
            arms=arms,
            expected=means[arms, time_index],
            realized=realized,
            oracle=oracle,
        ))
    return trajectories


def run_experiment(config: ExperimentConfig, write_files: bool = True):
    """Run every configured policy; returns {label: RegretCurve}.

    Persists ``regret.csv`` and ``rewards.csv`` under ``config.out`` unless
    ``write_files`` is false. The rewards file carries the per-step mean
    expected reward of each policy plus the oracle envelope.
    """
    config = config.with_default_policies()
    schedule = build_schedule(config)
    horizon = config.horizon
    labels = _unique_labels(config.policies)
    curves: dict[str, RegretCurve] = {}
    inst_rewards: dict[str, np.ndarray] = {}
    for label, spec in zip(labels, config.policies):
        trajectories = run_replications(
            schedule, spec, horizon, config.runs, config.seed,
            env_preset=config.env_preset, jobs=config.jobs,
        )
        curves[label] = aggregate(trajectories, config.regret_mode)
        inst_rewards[label] = _mean_columns(
            np.array([tr.expected for tr in trajectories])
        )
    if write_files:
        os.makedirs(config.out, exist_ok=True)
        oracle = schedule.means_matrix(horizon).max(axis=0)
        write_regret_csv(os.path.join(config.out, "regret.csv"), curves)
        write_rewards_csv(
            os.path.join(config.out, "rewards.csv"), inst_rewards, oracle
        )
    return curves


def _unique_labels(specs) -> list[str]:
    labels = []
    seen: dict[str, int] = {}
    for spec in specs:
        label = spec.display_label()
        count = seen.get(label, 0)
        seen[label] = count + 1
        labels.append(label if count == 0 else f"{label}#{count + 1}")
    return labels


def sweep_gamma(config: ExperimentConfig, grid) -> list[tuple]:
    """Discount sweep: dTS and dOTS at each grid gamma.

    Returns rows (gamma, policy, terminal normalized regret, stderr). Every
    grid point reuses the same substreams, so equal gammas give identical
    columns. The Thompson prior follows the discounted-pseudo-count
    configuration of the gamma study (see GAMMA_SWEEP_PRIOR).
    """
    grid = list(grid)
    if not grid:
        raise ConfigError("gamma grid is empty")
    for g in grid:
        if not 0.0 < g <= 1.0:
            raise ConfigError(f"gamma grid values must lie in (0, 1], got {g}")
    schedule = build_schedule(config)
    rows = []
    for g in grid:
        for name in ("dts", "dots"):
            spec = PolicySpec(name, dict(gamma=g, **GAMMA_SWEEP_PRIOR))
            trajectories = run_replications(
                schedule, spec, config.horizon, config.runs, config.seed,
                env_preset=None, jobs=config.jobs,
            )
            curve = aggregate(trajectories, config.regret_mode)
            rows.append((g, name, curve.terminal_norm, curve.terminal_norm_stderr))
    return rows


def sweep_arms(config: ExperimentConfig, grid) -> list[tuple]:
    """Arm-count sweep over the configured preset environment.

    Policy parameters are resolved once, at the configured arm count and
    preset, and reused unchanged for every K in the grid.
    """
    grid = [int(k) for k in grid]
    if not grid:
        raise ConfigError("arms grid is empty")
    for k in grid:
        if k < 2:
            raise ConfigError(f"arms grid values must be >= 2, got {k}")
    if config.env_preset is None:
        raise ConfigError("sweep arms needs a preset environment (fast/slow/abrupt)")
    config = config.with_default_policies()
    labels = _unique_labels(config.policies)
    pinned_specs = []
    for spec in config.policies:
        params = dict(PRESET_POLICY_PARAMS.get(config.env_preset, {}).get(spec.name, {}))
        params.update(spec.params)
        # Arm-count-dependent derivations are fixed at the configured arm
        # count so the sweep never recalculates them per grid point.
        if spec.name == "rexp3" and "gamma" not in params and "delta" in params:
            params["gamma"] = rexp3_gamma(config.arms, params["delta"])
        if spec.name == "exp3-ix" and "eta" not in params:
            eta, gamma_ix = exp3ix_params(config.arms, config.horizon)
            params["eta"] = eta
            params.setdefault("gamma_ix", gamma_ix)
        pinned_specs.append(PolicySpec(spec.name, params, spec.label))
    rows = []
    for k in grid:
        schedule = build_schedule(ExperimentConfig(
            env=config.env, arms=k, horizon=config.horizon, runs=config.runs,
            seed=config.seed, regret_mode=config.regret_mode,
            policies=config.policies,
        ))
        for label, spec in zip(labels, pinned_specs):
            trajectories = run_replications(
                schedule, spec, config.horizon, config.runs, config.seed,
                env_preset=None, jobs=config.jobs,
            )
            curve = aggregate(trajectories, config.regret_mode)
            rows.append((k, label, curve.terminal_norm, curve.terminal_norm_stderr))
    return rows


def write_regret_csv(path, curves: dict) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REGRET_CSV_HEADER)
        for label, curve in curves.items():
            for t in range(len(curve.mean_cum)):
                writer.writerow((
                    label, t + 1,
                    repr(float(curve.mean_cum[t])),
                    repr(float(curve.norm[t])),
                    repr(float(curve.stderr[t])),
                    curve.n_runs,
                ))


def write_rewards_csv(path, inst_rewards: dict, oracle: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REWARDS_CSV_HEADER)
        for label, series in inst_rewards.items():
            for t, value in enumerate(series, start=1):
                writer.writerow((label, t, repr(float(value))))
        for t, value in enumerate(oracle, start=1):
            writer.writerow(("oracle", t, repr(float(value))))


def write_sweep_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_HEADER)
        for param, label, value, stderr in rows:
            writer.writerow((param, label, repr(float(value)), repr(float(stderr))))
