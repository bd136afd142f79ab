"""Experiment configuration: dataclasses plus the flat config-file parser.

The file format is line-oriented ``key = value`` pairs with ``#`` comments.
Top-level keys configure the experiment; each ``[policy]`` section starts a
new policy block (sections may repeat):

    env = fast
    arms = 4
    horizon = 5000
    runs = 1000
    seed = 42
    regret_mode = expected
    out = results

    [policy]
    name = dts
    gamma = 0.4

    [policy]
    name = rexp3
    delta = 25
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

from .environments import PRESET_NAMES, CustomSchedule, Schedule, preset_environment
from .errors import ConfigError
from .policies import canonical_policy_name

REGRET_MODES = ("expected", "realized")

_TOP_KEYS = ("env", "arms", "horizon", "runs", "seed", "regret_mode", "out")

DEFAULT_POLICIES = ("ts", "dts", "dots", "dyn-ts", "rexp3")


@dataclass(frozen=True)
class PolicySpec:
    """A named algorithm plus its explicitly configured parameters."""

    name: str
    params: dict = field(default_factory=dict)
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "name", canonical_policy_name(self.name))

    def display_label(self) -> str:
        return self.label if self.label is not None else self.name


@dataclass(frozen=True)
class ExperimentConfig:
    env: str = "fast"
    arms: int = 4
    horizon: int = 5000
    runs: int = 1000
    seed: int = 1
    regret_mode: str = "expected"
    out: str = "."
    jobs: int = 1
    policies: tuple[PolicySpec, ...] = ()

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.arms < 2:
            raise ConfigError(f"arms must be >= 2, got {self.arms}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.regret_mode not in REGRET_MODES:
            raise ConfigError(
                f"regret_mode must be one of {REGRET_MODES}, got {self.regret_mode!r}"
            )

    @property
    def env_preset(self) -> str | None:
        return self.env if self.env in PRESET_NAMES else None

    def with_default_policies(self) -> "ExperimentConfig":
        if self.policies:
            return self
        specs = tuple(PolicySpec(name) for name in DEFAULT_POLICIES)
        return replace(self, policies=specs)


def build_schedule(config: ExperimentConfig) -> Schedule:
    """Construct the configured environment (preset name or CSV path)."""
    if config.env in PRESET_NAMES:
        return preset_environment(config.env, config.arms)
    if os.path.exists(config.env):
        return CustomSchedule.from_csv(config.env)
    raise ConfigError(
        f"env {config.env!r} is neither a preset ({', '.join(PRESET_NAMES)}) "
        "nor a readable CSV schedule file"
    )


def _parse_scalar(value: str):
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def parse_config_text(text: str, origin: str = "<config>") -> ExperimentConfig:
    top: dict = {}
    policy_blocks: list[dict] = []
    current: dict | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[policy]":
                raise ConfigError(
                    f"{origin}:{lineno}: only [policy] sections are allowed, got {line!r}"
                )
            current = {}
            policy_blocks.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not value:
            raise ConfigError(f"{origin}:{lineno}: empty value for {key!r}")
        if current is None:
            if key not in _TOP_KEYS:
                raise ConfigError(
                    f"{origin}:{lineno}: unknown key {key!r}; "
                    f"valid keys: {', '.join(_TOP_KEYS)}"
                )
            top[key] = value
        else:
            current[key] = value

    kwargs: dict = {}
    for key in ("arms", "horizon", "runs", "seed"):
        if key in top:
            try:
                kwargs[key] = int(top[key])
            except ValueError:
                raise ConfigError(f"{origin}: key {key!r} must be an integer") from None
    for key in ("env", "regret_mode", "out"):
        if key in top:
            kwargs[key] = top[key]

    specs = []
    for block in policy_blocks:
        if "name" not in block:
            raise ConfigError(f"{origin}: a [policy] block is missing 'name'")
        name = block.pop("name")
        label = block.pop("label", None)
        params = {key: _parse_scalar(value) for key, value in block.items()}
        specs.append(PolicySpec(name, params, label))
    kwargs["policies"] = tuple(specs)
    return ExperimentConfig(**kwargs)


def parse_config_file(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, origin=str(path))
