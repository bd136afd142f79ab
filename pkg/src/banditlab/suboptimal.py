"""Exact probability that Thompson-style sampling picks the worse arm.

For a two-armed bandit with independent posteriors theta_1 ~ Beta(a1, b1)
(the optimal arm) and theta_2 ~ Beta(a2, b2), the probability of picking
the sub-optimal arm is

    P(theta_2 > theta_1)
        = B(a1+a2, b2) / (B(a1, b1) B(a2, b2)) * (1/a1)
          * 3F2(a1, a1+a2, 1-b1; 1+a1, a1+a2+b2; 1),

obtained by integrating the density of the ratio omega = theta_1/theta_2
over (0, 1]:

    p(omega) = B(a1+a2, b2) / (B(a1, b1) B(a2, b2))
               * omega^(a1-1) * 2F1(a1+a2, 1-b1; a1+a2+b2; omega).

Shapes need not be integers, which is exactly what posterior discounting
produces. The 3F2 convergence margin works out to b1 + b2, always
positive; the sharper prior condition beta0 > (1 - F1 - F2) / 2 from the
z = 1 requirement of the 2F1 form is surfaced by
:func:`beta0_condition_check` as a warning predicate, not an error.

Numerics: for b1 > 1 the upper parameter 1-b1 is negative, and the direct
series cancels catastrophically once its early terms dwarf the sum (the
relative error of an alternating sum scales with max|term| / |sum|). The
probability is therefore evaluated through Thomae's two-term relation,

    3F2(a1, a1+a2, 1-b1; 1+a1, a1+a2+b2; 1)
      = [G(1+a1) G(a1+a2+b2) G(b1+b2)] / [G(a1) G(a1+a2+b1+b2) G(1+b2)]
        * 3F2(1, a2+b2, b1+b2; a1+a2+b1+b2, 1+b2; 1),

whose right-hand series has all-positive parameters (hence all-positive
terms) and convergence margin a1. Everything composes in log space, so no
cancellation or overflow occurs anywhere. The ratio density applies the
analogous Euler transformation of 2F1 when b1 > 1.

:func:`mc_prob_suboptimal` is an independent Monte-Carlo oracle for the
closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import PrecisionError
from .hypergeom import (
    DEFAULT_CONTROL,
    SeriesControl,
    hyp2f1,
    hyp3f2_at_1,
    log_beta,
    log_gamma,
)
from .rng import RngState

# Slack allowed when clamping a computed probability onto [0, 1]; larger
# excursions indicate the series lost too much precision.
CLAMP_SLACK = 1e-9


@dataclass(frozen=True)
class ProbQuery:
    """Beta shapes of the optimal arm (alpha1, beta1) and the sub-optimal
    arm (alpha2, beta2); all strictly positive."""

    alpha1: float
    beta1: float
    alpha2: float
    beta2: float

    def __post_init__(self):
        for name in ("alpha1", "beta1", "alpha2", "beta2"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    def swapped(self) -> "ProbQuery":
        return ProbQuery(self.alpha2, self.beta2, self.alpha1, self.beta1)


def _log_prefactor(q: ProbQuery) -> float:
    return (log_beta(q.alpha1 + q.alpha2, q.beta2)
            - log_beta(q.alpha1, q.beta1)
            - log_beta(q.alpha2, q.beta2))


def _log_hyp3f2(q: ProbQuery, ctl: SeriesControl) -> float:
    """ln 3F2(a1, a1+a2, 1-b1; 1+a1, a1+a2+b2; 1) via the Thomae relation.

    The transformed series has positive terms only, so its log is always
    defined and carries no cancellation error.
    """
    a1, b1, a2, b2 = q.alpha1, q.beta1, q.alpha2, q.beta2
    log_pref = (log_gamma(1.0 + a1) + log_gamma(a1 + a2 + b2) + log_gamma(b1 + b2)
                - log_gamma(a1) - log_gamma(a1 + a2 + b1 + b2) - log_gamma(1.0 + b2))
    series = hyp3f2_at_1(
        1.0, a2 + b2, b1 + b2,
        a1 + a2 + b1 + b2, 1.0 + b2,
        ctl,
    )
    return log_pref + math.log(series)


def prob_suboptimal(q: ProbQuery, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P(theta_2 > theta_1) for the query's posteriors, in [0, 1]."""
    log_pref = _log_prefactor(q) - math.log(q.alpha1)
    p = math.exp(log_pref + _log_hyp3f2(q, ctl))
    if p < -CLAMP_SLACK or p > 1.0 + CLAMP_SLACK:
        raise PrecisionError(
            f"computed probability {p} strays from [0, 1] beyond the "
            f"{CLAMP_SLACK} slack; the series lost precision"
        )
    return min(1.0, max(0.0, p))


def mc_prob_suboptimal(q: ProbQuery, n: int, rng: RngState) -> float:
    """Fraction of n paired posterior draws with theta_2 > theta_1.

    Vectorized gamma-ratio sampling in fixed-size chunks; the estimator's
    standard error is sqrt(p (1-p) / n).
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    gen = rng.generator
    hits = 0
    remaining = n
    chunk = 1 << 19
    while remaining > 0:
        m = min(chunk, remaining)
        g1 = gen.standard_gamma(q.alpha1, size=m)
        h1 = gen.standard_gamma(q.beta1, size=m)
        g2 = gen.standard_gamma(q.alpha2, size=m)
        h2 = gen.standard_gamma(q.beta2, size=m)
        theta1 = g1 / (g1 + h1)
        theta2 = g2 / (g2 + h2)
        hits += int((theta2 > theta1).sum())
        remaining -= m
    return hits / n


def ratio_density(omega: float, q: ProbQuery,
                  ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Density of omega = theta_1 / theta_2 on (0, 1].

    At omega = 1 the underlying 2F1 requires beta1 + beta2 > 1.
    """
    if not 0.0 < omega <= 1.0:
        raise ValueError(f"omega must lie in (0, 1], got {omega}")
    a = q.alpha1 + q.alpha2
    b = 1.0 - q.beta1
    c = q.alpha1 + q.alpha2 + q.beta2
    if b < 0.0 and omega < 1.0:
        # Euler transformation: all-positive parameters, no cancellation.
        gauss = math.pow(1.0 - omega, c - a - b) * hyp2f1(c - a, c - b, c, omega, ctl)
    else:
        gauss = hyp2f1(a, b, c, omega, ctl)
    log_pow = (q.alpha1 - 1.0) * math.log(omega)
    return math.exp(_log_prefactor(q) + log_pow) * gauss


class Beta0Check(NamedTuple):
    ok: bool
    message: str


def beta0_condition_check(f1: float, f2: float, beta0: float) -> Beta0Check:
    """Whether beta0 > (1 - (F1 + F2)) / 2, the prior condition under which
    the closed forms hold; at F1 = F2 = 0 it reduces to beta0 > 1/2."""
    threshold = (1.0 - (f1 + f2)) / 2.0
    if beta0 > threshold:
        return Beta0Check(True, "")
    return Beta0Check(
        False,
        f"beta0 = {beta0} does not satisfy beta0 > (1 - (F1+F2))/2 = "
        f"{threshold}; the closed-form probability may not apply "
        "(worst case requires beta0 > 1/2)",
    )
