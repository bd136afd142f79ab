"""Deterministic non-stationary reward schedules for Bernoulli arms.

A schedule is a pure function of (arm, time): it fixes the expected reward
``mu_k(t)`` of every arm at every timestep, which makes the dynamic oracle
``mu*(t) = max_k mu_k(t)`` computable exactly. Arms are indexed from 0 and
time starts at t = 1.

Three schedule families are provided:

* :class:`SinusoidalSchedule` — ``mu_k(t) = (1 + sin(2*pi*t/P + phi_k)) / 2``
  with per-arm phase offsets; the slow (P = 1000) and fast (P = 100) presets
  use offsets equally spaced over [0, 2*pi).
* :class:`AbruptSchedule` — piecewise-constant within a repeating cycle.
  Every arm starts a cycle at 0 and jumps to its plateau value at its change
  point; the 4-arm preset uses plateaus 0.10/0.37/0.63/0.90 at cycle times
  50/100/150/200 with a reset every 250 steps, so the optimal arm switches
  every 50 steps.
* :class:`CustomSchedule` — a dense (K x T) table, ingestible from CSV.

Schedules are immutable after construction and safe to share across runs.
"""
from __future__ import annotations

import csv
import math
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .rng import RngState

PRESET_NAMES = ("fast", "slow", "abrupt")

# 4-arm plateau values from the abrupt benchmark; general K interpolates
# evenly over [0.1, 0.9].
_ABRUPT_4ARM_VALUES = (0.10, 0.37, 0.63, 0.90)
_ABRUPT_CYCLE = 250


class Schedule:
    """Base class: a deterministic map (arm, time) -> expected reward."""

    num_arms: int

    def mean_at(self, arm: int, t: int) -> float:
        """Expected reward of ``arm`` at timestep ``t`` (1-based)."""
        raise NotImplementedError

    def oracle_mean(self, t: int) -> float:
        """Expected reward of the dynamic oracle: max over arms at ``t``."""
        return max(self.mean_at(k, t) for k in range(self.num_arms))

    def draw_reward(self, arm: int, t: int, rng: RngState) -> int:
        """Bernoulli reward draw with success probability ``mean_at(arm, t)``."""
        return 1 if rng.generator.random() < self.mean_at(arm, t) else 0

    def means_matrix(self, horizon: int) -> np.ndarray:
        """Dense (K x horizon) table of expected rewards for t = 1..horizon."""
        out = np.empty((self.num_arms, horizon))
        for k in range(self.num_arms):
            for t in range(1, horizon + 1):
                out[k, t - 1] = self.mean_at(k, t)
        return out

    def _check_arm_time(self, arm: int, t: int) -> None:
        if not 0 <= arm < self.num_arms:
            raise IndexError(f"arm {arm} out of range [0, {self.num_arms})")
        if t < 1:
            raise IndexError(f"time {t} out of range (t starts at 1)")


class SinusoidalSchedule(Schedule):
    """Sinusoidal expected rewards, one phase offset per arm.

    The time argument is reduced modulo the period before the phase is
    computed, so periodicity is exact in floating point.
    """

    def __init__(self, num_arms: int, period: int, offsets: Sequence[float]):
        if num_arms < 1:
            raise ConfigError(f"num_arms must be >= 1, got {num_arms}")
        if period < 1:
            raise ConfigError(f"period must be >= 1, got {period}")
        if len(offsets) != num_arms:
            raise ConfigError(
                f"expected {num_arms} offsets, got {len(offsets)}"
            )
        self.num_arms = int(num_arms)
        self.period = int(period)
        self.offsets = tuple(float(p) for p in offsets)

    def mean_at(self, arm: int, t: int) -> float:
        self._check_arm_time(arm, t)
        phase = 2.0 * math.pi * (t % self.period) / self.period
        return 0.5 * (1.0 + math.sin(phase + self.offsets[arm]))

    @property
    def cycle_length(self) -> int:
        return self.period


class AbruptSchedule(Schedule):
    """Piecewise-constant rewards repeating with a fixed cycle.

    ``changes`` lists (arm, time_within_cycle, value) triples: from that
    cycle time onward the arm's expected reward is ``value`` until either a
    later change for the same arm applies or the cycle wraps (all arms drop
    back to 0 at each cycle boundary).
    """

    def __init__(self, num_arms: int, cycle: int, changes: Sequence[tuple[int, int, float]]):
        if num_arms < 1:
            raise ConfigError(f"num_arms must be >= 1, got {num_arms}")
        if cycle < 1:
            raise ConfigError(f"cycle must be >= 1, got {cycle}")
        self.num_arms = int(num_arms)
        self.cycle = int(cycle)
        per_arm: list[list[tuple[int, float]]] = [[] for _ in range(self.num_arms)]
        for arm, when, value in changes:
            if not 0 <= arm < self.num_arms:
                raise ConfigError(f"change references arm {arm} out of range")
            if not 0 <= when < self.cycle:
                raise ConfigError(
                    f"change time {when} outside cycle [0, {self.cycle})"
                )
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"expected reward {value} outside [0, 1]")
            per_arm[arm].append((int(when), float(value)))
        for steps in per_arm:
            steps.sort()
        self.changes = tuple(tuple(steps) for steps in per_arm)

    def mean_at(self, arm: int, t: int) -> float:
        self._check_arm_time(arm, t)
        u = t % self.cycle
        value = 0.0
        for when, new_value in self.changes[arm]:
            if u >= when:
                value = new_value
        return value

    @property
    def cycle_length(self) -> int:
        return self.cycle


class CustomSchedule(Schedule):
    """Dense table of expected rewards, shape (K, T)."""

    def __init__(self, table):
        table = np.asarray(table, dtype=float)
        if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
            raise ConfigError(f"table must be 2-D (K x T), got shape {table.shape}")
        if np.any(table < 0.0) or np.any(table > 1.0):
            raise ConfigError("all expected rewards must lie in [0, 1]")
        self.table = table
        self.table.setflags(write=False)
        self.num_arms = table.shape[0]
        self.horizon = table.shape[1]

    def mean_at(self, arm: int, t: int) -> float:
        self._check_arm_time(arm, t)
        if t > self.horizon:
            raise IndexError(f"time {t} beyond table horizon {self.horizon}")
        return float(self.table[arm, t - 1])

    @classmethod
    def from_csv(cls, path) -> "CustomSchedule":
        """Load a schedule from CSV with header ``t,arm1,...,armK``.

        Rows must carry strictly increasing, contiguous timesteps starting
        at 1, with all expected rewards in [0, 1].
        """
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ConfigError(f"{path}: empty schedule file") from None
            header = [h.strip() for h in header]
            if len(header) < 2 or header[0] != "t":
                raise ConfigError(
                    f"{path}: header must be 't,arm1,...,armK', got {header}"
                )
            expected = ["arm%d" % (k + 1) for k in range(len(header) - 1)]
            if header[1:] != expected:
                raise ConfigError(
                    f"{path}: arm columns must be {expected}, got {header[1:]}"
                )
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    t = int(row[0])
                    values = [float(v) for v in row[1:]]
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: {exc}") from None
                if len(values) != len(header) - 1:
                    raise ConfigError(
                        f"{path}:{lineno}: expected {len(header) - 1} values"
                    )
                if t != len(rows) + 1:
                    raise ConfigError(
                        f"{path}:{lineno}: timesteps must be contiguous from 1"
                    )
                rows.append(values)
        if not rows:
            raise ConfigError(f"{path}: no data rows")
        return cls(np.array(rows).T)


def make_offsets(num_arms: int) -> tuple[float, ...]:
    """Phase offsets equally spaced over [0, 2*pi)."""
    return tuple(2.0 * math.pi * k / num_arms for k in range(num_arms))


def preset_environment(name: str, num_arms: int = 4) -> Schedule:
    """Construct one of the named benchmark environments.

    ``fast``/``slow`` are sinusoidal with periods 100/1000; ``abrupt`` is the
    staircase cycle described in the module docstring. For ``abrupt`` with
    K != 4 the change points split the cycle into K+1 equal blocks and the
    plateau values are equally spaced over [0.1, 0.9].
    """
    if num_arms < 2:
        raise ConfigError(f"presets need at least 2 arms, got {num_arms}")
    if name == "fast":
        return SinusoidalSchedule(num_arms, 100, make_offsets(num_arms))
    if name == "slow":
        return SinusoidalSchedule(num_arms, 1000, make_offsets(num_arms))
    if name == "abrupt":
        if num_arms == 4:
            values = _ABRUPT_4ARM_VALUES
        else:
            values = tuple(
                0.1 + 0.8 * k / (num_arms - 1) for k in range(num_arms)
            )
        changes = [
            (k, round(_ABRUPT_CYCLE * (k + 1) / (num_arms + 1)), values[k])
            for k in range(num_arms)
        ]
        return AbruptSchedule(num_arms, _ABRUPT_CYCLE, changes)
    raise ConfigError(
        f"unknown environment {name!r}; valid presets: {', '.join(PRESET_NAMES)}"
    )
