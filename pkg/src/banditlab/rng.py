"""Deterministic random number generation and Beta/Gamma sampling primitives.

Every stochastic component of the package draws from an :class:`RngState`.
A state is constructed from a 64-bit seed and can be split into independent
substreams (one per replication) with :func:`derive_substream`; identical
seeds reproduce identical draw sequences across processes and platforms.

The generator is pinned here, in one place: a counter-based Philox bit
generator keyed through ``numpy.random.SeedSequence``, which provides the
documented stream-splitting used for parallel replications.

Beta draws use the gamma-ratio construction ``G1 / (G1 + G2)`` so that
non-integer, sub-unit shape parameters produced by posterior discounting are
sampled from the exact distribution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from numpy.random import Generator, Philox, SeedSequence

# Discounting can drive effective Beta shapes arbitrarily close to zero when
# the prior offsets are zero; shapes are clamped here before sampling.
SHAPE_FLOOR = 1e-12


class RngState:
    """A single-owner random stream.

    One stream per run; never share a stream between concurrent runs. Use
    :func:`derive_substream` to hand independent streams to parallel workers.
    """

    __slots__ = ("seed", "spawn_key", "generator")

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        if not 0 <= int(seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.spawn_key = tuple(int(i) for i in spawn_key)
        self.generator = Generator(
            Philox(SeedSequence(entropy=self.seed, spawn_key=self.spawn_key))
        )

    def clone(self) -> "RngState":
        """Fresh stream with the same identity, rewound to the start."""
        return RngState(self.seed, self.spawn_key)

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, spawn_key={self.spawn_key})"


def derive_substream(base: RngState, run_index: int) -> RngState:
    """Independent stream deterministically derived from (base, run_index).

    Derivation appends ``run_index`` to the base stream's spawn key, so
    nested derivation is well defined and distinct indices give disjoint
    streams.
    """
    if run_index < 0:
        raise ValueError(f"run_index must be nonnegative, got {run_index}")
    return RngState(base.seed, base.spawn_key + (int(run_index),))


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a Beta distribution; both strictly positive."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")


def sample_bernoulli(rng: RngState, p: float) -> int:
    """Return 1 with probability ``p``, else 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return 1 if rng.generator.random() < p else 0


def sample_gamma(rng: RngState, shape: float) -> float:
    """Draw from a unit-scale Gamma(shape) distribution.

    Valid for any shape > 0; shapes below 1 are handled by the standard
    boosting transform inside the rejection sampler.
    """
    if not shape > 0:
        raise ValueError(f"gamma shape must be positive, got {shape}")
    return float(rng.generator.standard_gamma(shape))


def beta_draw(generator: Generator, alpha: float, beta: float) -> float:
    """Sampling kernel shared by :func:`sample_beta` and the policies.

    Two sequential gamma draws, then the ratio. Callers are responsible for
    clamping shapes at ``SHAPE_FLOOR``; the shapes must be positive.
    """
    g1 = generator.standard_gamma(alpha)
    g2 = generator.standard_gamma(beta)
    total = g1 + g2
    if total > 0.0:
        return g1 / total
    # Both gamma draws underflowed to zero (shapes near the clamp floor).
    # Beta(eps*a, eps*b) converges to Bernoulli(a/(a+b)) as eps -> 0; draw
    # that limit, nudged inside the open interval (0, 1).
    if generator.random() < alpha / (alpha + beta):
        return 1.0 - 1e-16
    return 1e-300


def sample_beta(rng: RngState, params: BetaParams) -> float:
    """Draw from Beta(alpha, beta) via the gamma-ratio construction."""
    return beta_draw(rng.generator, params.alpha, params.beta)


def beta_mean(params: BetaParams) -> float:
    """Posterior mean alpha / (alpha + beta)."""
    return params.alpha / (params.alpha + params.beta)


def beta_variance(params: BetaParams) -> float:
    """Posterior variance, computed as mu*(1-mu) / (alpha + beta + 1)."""
    mu = params.alpha / (params.alpha + params.beta)
    return mu * (1.0 - mu) / (params.alpha + params.beta + 1.0)
