"""Arm-selection policies behind one uniform interface.

Eight algorithms are provided. The discounted Thompson family is the focus:

* ``dts`` — discounted Thompson sampling. Per-arm success/failure
  accumulators (S_k, F_k) back a Beta(S_k + alpha0, F_k + beta0) posterior;
  every step multiplies *all* accumulators by a discount ``gamma`` in (0, 1]
  before the played arm absorbs one unit of (binarized) evidence. For an
  unplayed arm the discount leaves the posterior mean S/(S+F) unchanged
  while shrinking S+F, which inflates the posterior variance
  mu*(1-mu)/(S+F+1); that is the mechanism that keeps old arms explorable.
* ``dots`` — the optimistic variant: each posterior sample is clamped from
  below by its posterior mean before the argmax.
* ``ts`` — classic Thompson sampling, i.e. ``dts`` with gamma = 1.

Comparison baselines: ``dyn-ts`` (discounts only the played arm once its
evidence crosses a cap C), ``rexp3`` (EXP3 with periodic weight resets),
``ducb`` / ``sw-ucb`` (UCB over exponentially discounted / sliding-window
statistics), and ``exp3-ix`` (exponential weights with implicit
exploration). Closed-form parameter rules for the baselines live next to
them; environment-specific defaults used by the benchmark presets are in
:data:`PRESET_POLICY_PARAMS`.

States are single-owner: one policy instance per run, never shared.
"""
from __future__ import annotations

import math
from collections import deque
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .rng import SHAPE_FLOOR, RngState, beta_draw, sample_bernoulli

POLICY_NAMES = ("ts", "dts", "dots", "dyn-ts", "rexp3", "ducb", "sw-ucb", "exp3-ix")

# Accepted in experiment configs alongside POLICY_NAMES; built by the
# harness, which owns the true expected-reward table.
BENCHMARK_NAMES = ("oracle",)

_ALIASES = {
    "dynts": "dyn-ts",
    "dyn_ts": "dyn-ts",
    "swucb": "sw-ucb",
    "sw_ucb": "sw-ucb",
    "exp3ix": "exp3-ix",
    "exp3_ix": "exp3-ix",
}


class ArmChoice(NamedTuple):
    """A selected arm plus, for score-based policies, the per-arm scores."""

    arm: int
    scores: tuple[float, ...] | None = None


def binarize_reward(observed: float, rng: RngState) -> int:
    """Reduce a bounded reward in [0, 1] to one Bernoulli bit.

    Exact 0.0 / 1.0 inputs pass through without consuming a random draw.
    """
    if not 0.0 <= observed <= 1.0:
        raise ValueError(f"reward must lie in [0, 1], got {observed}")
    if observed == 0.0:
        return 0
    if observed == 1.0:
        return 1
    return sample_bernoulli(rng, observed)


def _argmax(scores) -> int:
    """Index of the largest score; ties break toward the lowest index."""
    best = 0
    best_score = scores[0]
    for k in range(1, len(scores)):
        if scores[k] > best_score:
            best = k
            best_score = scores[k]
    return best


class Policy:
    """Interface: select an arm, then observe (arm, reward in [0, 1])."""

    name: str
    num_arms: int
    binarizes_rewards = False

    def select(self, rng: RngState) -> ArmChoice:
        raise NotImplementedError

    def update(self, arm: int, reward: float, rng: RngState) -> None:
        raise NotImplementedError


class DiscountedPosterior:
    """Per-arm (S, F) accumulators with prior offsets and a discount.

    Alongside `S` and `F` the posterior keeps the evidence mean S/(S+F) of
    every arm, recomputed only when the arm absorbs evidence. Discounting
    scales S and F together and provably leaves that mean fixed, so storing
    it once keeps the unplayed-arm mean invariant exact in floating point
    instead of accurate to an ulp or two.
    """

    __slots__ = ("num_arms", "gamma", "alpha0", "beta0", "S", "F", "_mean")

    def __init__(self, num_arms, gamma, alpha0=1.0, beta0=1.0, s0=0.0, f0=0.0):
        if num_arms < 1:
            raise ConfigError(f"need at least 1 arm, got {num_arms}")
        if not 0.0 < gamma <= 1.0:
            raise ConfigError(f"gamma must lie in (0, 1], got {gamma}")
        if alpha0 < 0 or beta0 < 0:
            raise ConfigError("prior offsets alpha0, beta0 must be nonnegative")
        if s0 < 0 or f0 < 0:
            raise ConfigError("initial counts s0, f0 must be nonnegative")
        self.num_arms = int(num_arms)
        self.gamma = float(gamma)
        self.alpha0 = float(alpha0)
        self.beta0 = float(beta0)
        self.S = [float(s0)] * self.num_arms
        self.F = [float(f0)] * self.num_arms
        total = s0 + f0
        m0 = s0 / total if total > 0 else 0.0
        self._mean = [m0] * self.num_arms

    def shape(self, arm: int) -> tuple[float, float]:
        """Effective Beta shapes for sampling, clamped at SHAPE_FLOOR."""
        a = self.S[arm] + self.alpha0
        b = self.F[arm] + self.beta0
        return (a if a > SHAPE_FLOOR else SHAPE_FLOOR,
                b if b > SHAPE_FLOOR else SHAPE_FLOOR)

    def evidence_mean(self, arm: int) -> float:
        """Mean S/(S+F) of the accumulated evidence (offsets excluded)."""
        return self._mean[arm]

    def evidence(self, arm: int) -> float:
        return self.S[arm] + self.F[arm]

    def posterior_mean(self, arm: int) -> float:
        """Full-shape mean (S+alpha0) / (S+alpha0+F+beta0)."""
        a, b = self.shape(arm)
        return a / (a + b)

    def apply(self, played: int, r: int) -> None:
        """Discount every arm, then add one unit of evidence to ``played``."""
        g = self.gamma
        S = self.S
        F = self.F
        for k in range(self.num_arms):
            S[k] *= g
            F[k] *= g
        S[played] += r
        F[played] += 1 - r
        total = S[played] + F[played]
        self._mean[played] = S[played] / total


class DiscountedThompson(Policy):
    """dTS / dOTS / classic TS over a :class:`DiscountedPosterior`."""

    binarizes_rewards = True

    def __init__(self, num_arms, gamma=1.0, alpha0=1.0, beta0=1.0,
                 s0=0.0, f0=0.0, optimistic=False, name=None):
        self.posterior = DiscountedPosterior(num_arms, gamma, alpha0, beta0, s0, f0)
        self.num_arms = int(num_arms)
        self.optimistic = bool(optimistic)
        if name is None:
            name = "dots" if optimistic else ("ts" if gamma == 1.0 else "dts")
        self.name = name

    def select(self, rng: RngState) -> ArmChoice:
        post = self.posterior
        gen = rng.generator
        scores = []
        if self.optimistic:
            for k in range(self.num_arms):
                a, b = post.shape(k)
                theta = beta_draw(gen, a, b)
                mean = a / (a + b)
                scores.append(theta if theta > mean else mean)
        else:
            for k in range(self.num_arms):
                a, b = post.shape(k)
                scores.append(beta_draw(gen, a, b))
        return ArmChoice(_argmax(scores), tuple(scores))

    def update(self, arm: int, reward: float, rng: RngState) -> None:
        self.posterior.apply(arm, binarize_reward(reward, rng))


class DynamicThompson(Policy):
    """Thompson sampling that discounts only the arm it plays.

    Evidence accumulates normally until alpha_k + beta_k reaches the cap C;
    past that point the played arm's updated parameters are scaled by
    C/(C+1), which pins alpha_k + beta_k at C. Unplayed arms never change.
    """

    binarizes_rewards = True
    name = "dyn-ts"

    def __init__(self, num_arms, C, alpha_init=1.0, beta_init=1.0):
        if num_arms < 1:
            raise ConfigError(f"need at least 1 arm, got {num_arms}")
        if not C > 0:
            raise ConfigError(f"threshold C must be positive, got {C}")
        self.num_arms = int(num_arms)
        self.C = float(C)
        self.alpha = [float(alpha_init)] * self.num_arms
        self.beta = [float(beta_init)] * self.num_arms

    def select(self, rng: RngState) -> ArmChoice:
        gen = rng.generator
        scores = [beta_draw(gen, self.alpha[k], self.beta[k])
                  for k in range(self.num_arms)]
        return ArmChoice(_argmax(scores), tuple(scores))

    def update(self, arm: int, reward: float, rng: RngState) -> None:
        r = binarize_reward(reward, rng)
        C = self.C
        if self.alpha[arm] + self.beta[arm] < C:
            self.alpha[arm] += r
            self.beta[arm] += 1 - r
        else:
            scale = C / (C + 1.0)
            self.alpha[arm] = (self.alpha[arm] + r) * scale
            self.beta[arm] = (self.beta[arm] + 1 - r) * scale


def rexp3_gamma(num_arms: int, delta: int) -> float:
    """Egalitarianism factor min{1, sqrt(K ln K / ((e-1) * delta))}."""
    if num_arms < 2:
        raise ConfigError(f"need at least 2 arms, got {num_arms}")
    if delta < 1:
        raise ConfigError(f"delta must be >= 1, got {delta}")
    return min(1.0, math.sqrt(num_arms * math.log(num_arms)
                              / ((math.e - 1.0) * delta)))


class Rexp3(Policy):
    """EXP3 with uniform mixing, restarted every ``delta`` steps."""

    name = "rexp3"

    def __init__(self, num_arms, delta, gamma_r=None):
        if num_arms < 1:
            raise ConfigError(f"need at least 1 arm, got {num_arms}")
        if delta < 1:
            raise ConfigError(f"batch length delta must be >= 1, got {delta}")
        if gamma_r is None:
            gamma_r = rexp3_gamma(num_arms, delta)
        if not 0.0 <= gamma_r <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {gamma_r}")
        self.num_arms = int(num_arms)
        self.delta = int(delta)
        self.gamma_r = float(gamma_r)
        self.weights = [1.0] * self.num_arms
        self.steps_done = 0
        self._probs = [1.0 / num_arms] * self.num_arms

    def selection_probabilities(self) -> list[float]:
        if self.steps_done % self.delta == 0:
            self.weights = [1.0] * self.num_arms
        total = math.fsum(self.weights)
        g = self.gamma_r
        k = self.num_arms
        return [(1.0 - g) * w / total + g / k for w in self.weights]

    def select(self, rng: RngState) -> ArmChoice:
        probs = self.selection_probabilities()
        self._probs = probs
        u = rng.generator.random()
        acc = 0.0
        arm = self.num_arms - 1
        for k, p in enumerate(probs):
            acc += p
            if u < acc:
                arm = k
                break
        return ArmChoice(arm, None)

    def update(self, arm: int, reward: float, rng: RngState) -> None:
        estimate = reward / self._probs[arm]
        self.weights[arm] *= math.exp(self.gamma_r * estimate / self.num_arms)
        # Renormalize every step so weights stay finite over long batches.
        top = max(self.weights)
        self.weights = [w / top for w in self.weights]
        self.steps_done += 1


def ducb_gamma(bound: float, upsilon: int, horizon: int) -> float:
    """Discount 1 - (4B)^-1 * sqrt(upsilon / T) for discounted UCB."""
    if not bound > 0:
        raise ConfigError(f"reward bound B must be positive, got {bound}")
    if not 1 <= upsilon <= horizon:
        raise ConfigError(
            f"need 1 <= upsilon <= horizon, got upsilon={upsilon} T={horizon}"
        )
    return 1.0 - math.sqrt(upsilon / horizon) / (4.0 * bound)


class DiscountedUcb(Policy):
    """UCB over exponentially discounted reward sums and play counts.

    Index: R_k/N_k + 2B sqrt(xi * ln n / N_k) with n = sum_k N_k. Arms with
    no discounted history are played first, in index order.
    """

    name = "ducb"

    def __init__(self, num_arms, gamma_d, xi=0.5, bound=1.0):
        if num_arms < 1:
            raise ConfigError(f"need at least 1 arm, got {num_arms}")
        if not 0.0 < gamma_d <= 1.0:
            raise ConfigError(f"discount must lie in (0, 1], got {gamma_d}")
        if xi < 0 or bound <= 0:
            raise ConfigError("need xi >= 0 and bound > 0")
        self.num_arms = int(num_arms)
        self.gamma_d = float(gamma_d)
        self.xi = float(xi)
        self.bound = float(bound)
        self.rewards = [0.0] * self.num_arms
        self.counts = [0.0] * self.num_arms

    def select(self, rng: RngState) -> ArmChoice:
        for k in range(self.num_arms):
            if self.counts[k] == 0.0:
                return ArmChoice(k, None)
        n = math.fsum(self.counts)
        log_n = max(math.log(n), 0.0)
        pad = 2.0 * self.bound * math.sqrt(self.xi * log_n)
        scores = [self.rewards[k] / self.counts[k] + pad / math.sqrt(self.counts[k])
                  for k in range(self.num_arms)]
        return ArmChoice(_argmax(scores), tuple(scores))

    def update(self, arm: int, reward: float, rng: RngState) -> None:
        g = self.gamma_d
        for k in range(self.num_arms):
            self.rewards[k] *= g
            self.counts[k] *= g
        self.rewards[arm] += reward
        self.counts[arm] += 1.0


def swucb_tau(bound: float, horizon: int, upsilon: int) -> int:
    """Window length round(2B * sqrt(T ln T / upsilon)), half away from zero."""
    if not bound > 0:
        raise ConfigError(f"reward bound B must be positive, got {bound}")
    if upsilon < 1:
        raise ConfigError(f"upsilon must be >= 1, got {upsilon}")
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    tau = 2.0 * bound * math.sqrt(horizon * math.log(horizon) / upsilon)
    return max(1, math.floor(tau + 0.5))


class SlidingWindowUcb(Policy):
    """UCB computed over only the last ``tau`` plays.

    Same index as :class:`DiscountedUcb` with windowed sums and counts;
    n is the number of plays currently inside the window. Arms absent from
    the window are played first, in index order.
    """

    name = "sw-ucb"

    def __init__(self, num_arms, tau, xi=0.5, bound=1.0):
        if num_arms < 1:
            raise ConfigError(f"need at least 1 arm, got {num_arms}")
        if tau < 1:
            raise ConfigError(f"window tau must be >= 1, got {tau}")
        if xi < 0 or bound <= 0:
            raise ConfigError("need xi >= 0 and bound > 0")
        self.num_arms = int(num_arms)
        self.tau = int(tau)
        self.xi = float(xi)
        self.bound = float(bound)
        self.window: deque[tuple[int, float]] = deque()
        self.rewards = [0.0] * self.num_arms
        self.counts = [0] * self.num_arms

    def select(self, rng: RngState) -> ArmChoice:
        for k in range(self.num_arms):
            if self.counts[k] == 0:
                return ArmChoice(k, None)
        n = len(self.window)
        log_n = max(math.log(n), 0.0)
        pad = 2.0 * self.bound * math.sqrt(self.xi * log_n)
        scores = [self.rewards[k] / self.counts[k] + pad / math.sqrt(self.counts[k])
                  for k in range(self.num_arms)]
        return ArmChoice(_argmax(scores), tuple(scores))

    def update(self, arm: int, reward: float, rng: RngState) -> None:
        self.window.append((arm, reward))
        self.rewards[arm] += reward
        self.counts[arm] += 1
        if len(self.window) > self.tau:
            old_arm, old_reward = self.window.popleft()
            self.rewards[old_arm] -= old_reward
            self.counts[old_arm] -= 1
            if self.counts[old_arm] == 0:
                self.rewards[old_arm] = 0.0


def exp3ix_params(num_arms: int, horizon: int) -> tuple[float, float]:
    """Learning rate eta = sqrt(2 ln K / (K T)) and gamma_ix = eta / 2."""
    if num_arms < 2:
        raise ConfigError(f"need at least 2 arms, got {num_arms}")
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    eta = math.sqrt(2.0 * math.log(num_arms) / (num_arms * horizon))
    return eta, eta / 2.0


class Exp3Ix(Policy):
    """Exponential weights with implicit exploration.

    Losses ell = 1 - reward are estimated as ell / (p_k + gamma_ix) for the
    played arm only. Weights are kept as exp(-eta * (L_k - min L)), which
    renormalizes the cumulative losses and cannot underflow.
    """

    name = "exp3-ix"

    def __init__(self, num_arms, eta, gamma_ix):
        if num_arms < 1:
            raise ConfigError(f"need at least 1 arm, got {num_arms}")
        if not eta > 0:
            raise ConfigError(f"learning rate eta must be positive, got {eta}")
        if gamma_ix < 0:
            raise ConfigError(f"gamma_ix must be nonnegative, got {gamma_ix}")
        self.num_arms = int(num_arms)
        self.eta = float(eta)
        self.gamma_ix = float(gamma_ix)
        self.losses = [0.0] * self.num_arms
        self._probs = [1.0 / num_arms] * self.num_arms

    def selection_probabilities(self) -> list[float]:
        low = min(self.losses)
        weights = [math.exp(-self.eta * (l - low)) for l in self.losses]
        total = math.fsum(weights)
        return [w / total for w in weights]

    def select(self, rng: RngState) -> ArmChoice:
        probs = self.selection_probabilities()
        self._probs = probs
        u = rng.generator.random()
        acc = 0.0
        arm = self.num_arms - 1
        for k, p in enumerate(probs):
            acc += p
            if u < acc:
                arm = k
                break
        return ArmChoice(arm, None)

    def update(self, arm: int, reward: float, rng: RngState) -> None:
        loss = 1.0 - reward
        self.losses[arm] += loss / (self._probs[arm] + self.gamma_ix)


class OraclePolicy(Policy):
    """Benchmark pseudo-policy that plays argmax_k mu_k(t) at every step.

    Needs the true expected-reward table, so it is constructed by the
    harness rather than by :func:`make_policy`.
    """

    name = "oracle"

    def __init__(self, means: np.ndarray):
        self.means = np.asarray(means, dtype=float)
        self.num_arms = self.means.shape[0]
        self._t = 0

    def select(self, rng: RngState) -> ArmChoice:
        column = self.means[:, self._t]
        return ArmChoice(_argmax(column), tuple(column))

    def update(self, arm: int, reward: float, rng: RngState) -> None:
        self._t += 1


# Benchmark parameter tables, one row per environment preset. REXP3's
# abrupt gamma and EXP3-IX's fast eta are the published table values, which
# do not match their own formulas; the table values are shipped as preset
# defaults and the formulas apply everywhere else.
PRESET_POLICY_PARAMS = {
    "fast": {
        "dts": {"gamma": 0.40},
        "dots": {"gamma": 0.40},
        "dyn-ts": {"C": 25},
        "rexp3": {"delta": 25, "gamma": 0.3593},
        "ducb": {"gamma": 0.9500, "xi": 0.5, "B": 1.0},
        "sw-ucb": {"tau": 24, "xi": 0.5, "B": 1.0},
        "exp3-ix": {"eta": 0.0263},
    },
    "slow": {
        "dts": {"gamma": 0.75},
        "dots": {"gamma": 0.75},
        "dyn-ts": {"C": 250},
        "rexp3": {"delta": 250, "gamma": 0.1136},
        "ducb": {"gamma": 0.9842, "xi": 0.5, "B": 1.0},
        "sw-ucb": {"tau": 89, "xi": 0.5, "B": 1.0},
        "exp3-ix": {"eta": 0.01665},
    },
    "abrupt": {
        "dts": {"gamma": 0.60},
        "dots": {"gamma": 0.60},
        "dyn-ts": {"C": 25},
        "rexp3": {"delta": 25, "gamma": 0.5000},
        "ducb": {"gamma": 0.9646, "xi": 0.5, "B": 1.0},
        "sw-ucb": {"tau": 37, "xi": 0.5, "B": 1.0},
        "exp3-ix": {"eta": 0.0263},
    },
}

_KNOWN_PARAMS = {
    "ts": {"alpha0", "beta0", "s0", "f0"},
    "dts": {"gamma", "alpha0", "beta0", "s0", "f0"},
    "dots": {"gamma", "alpha0", "beta0", "s0", "f0"},
    "dyn-ts": {"C"},
    "rexp3": {"delta", "gamma"},
    "ducb": {"gamma", "xi", "B", "upsilon"},
    "sw-ucb": {"tau", "xi", "B", "upsilon"},
    "exp3-ix": {"eta", "gamma_ix"},
}


def canonical_policy_name(name: str) -> str:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in POLICY_NAMES and key not in BENCHMARK_NAMES:
        raise ConfigError(
            f"unknown policy {name!r}; valid names: "
            f"{', '.join(POLICY_NAMES + BENCHMARK_NAMES)}"
        )
    return key


def make_policy(name: str, num_arms: int, horizon: int | None = None,
                env_preset: str | None = None, **params) -> Policy:
    """Build an initialized policy state from a named spec.

    Parameters omitted from ``params`` fall back to the environment preset
    row (when ``env_preset`` names one) and then to the closed-form rules,
    which need ``horizon`` and, for the UCB variants, ``upsilon``.
    """
    key = canonical_policy_name(name)
    if key in BENCHMARK_NAMES:
        raise ConfigError(
            f"benchmark policy {key!r} needs the environment's reward table; "
            "it is constructed by the harness, not make_policy"
        )
    unknown = set(params) - _KNOWN_PARAMS[key]
    if unknown:
        raise ConfigError(
            f"policy {key!r} does not accept parameter(s) {sorted(unknown)}"
        )
    merged = dict(PRESET_POLICY_PARAMS.get(env_preset, {}).get(key, {}))
    merged.update(params)

    if key in ("ts", "dts", "dots"):
        gamma = 1.0 if key == "ts" else merged.get("gamma")
        if gamma is None:
            raise ConfigError(f"policy {key!r} needs a discount 'gamma'")
        return DiscountedThompson(
            num_arms, gamma=gamma,
            alpha0=merged.get("alpha0", 1.0), beta0=merged.get("beta0", 1.0),
            s0=merged.get("s0", 0.0), f0=merged.get("f0", 0.0),
            optimistic=(key == "dots"), name=key,
        )
    if key == "dyn-ts":
        if "C" not in merged:
            raise ConfigError("policy 'dyn-ts' needs a threshold 'C'")
        return DynamicThompson(num_arms, merged["C"])
    if key == "rexp3":
        if "delta" not in merged:
            raise ConfigError("policy 'rexp3' needs a batch length 'delta'")
        return Rexp3(num_arms, merged["delta"], merged.get("gamma"))
    if key == "ducb":
        bound = merged.get("B", 1.0)
        gamma_d = merged.get("gamma")
        if gamma_d is None:
            if "upsilon" not in merged or horizon is None:
                raise ConfigError(
                    "policy 'ducb' needs 'gamma', or 'upsilon' plus a horizon"
                )
            gamma_d = ducb_gamma(bound, merged["upsilon"], horizon)
        return DiscountedUcb(num_arms, gamma_d, merged.get("xi", 0.5), bound)
    if key == "sw-ucb":
        bound = merged.get("B", 1.0)
        tau = merged.get("tau")
        if tau is None:
            if "upsilon" not in merged or horizon is None:
                raise ConfigError(
                    "policy 'sw-ucb' needs 'tau', or 'upsilon' plus a horizon"
                )
            tau = swucb_tau(bound, horizon, merged["upsilon"])
        return SlidingWindowUcb(num_arms, tau, merged.get("xi", 0.5), bound)
    if key == "exp3-ix":
        eta = merged.get("eta")
        gamma_ix = merged.get("gamma_ix")
        if eta is None:
            if horizon is None:
                raise ConfigError("policy 'exp3-ix' needs 'eta' or a horizon")
            eta, derived_ix = exp3ix_params(num_arms, horizon)
            if gamma_ix is None:
                gamma_ix = derived_ix
        if gamma_ix is None:
            gamma_ix = eta / 2.0
        return Exp3Ix(num_arms, eta, gamma_ix)
    raise AssertionError(f"unhandled policy {key!r}")
