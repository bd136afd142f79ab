"""Series evaluation of the Gauss and generalized hypergeometric functions.

Both series are summed by term recursion,

    term_{k+1} = term_k * prod_i (a_i + k) / (prod_j (b_j + k) * (k + 1)) * z,

with terms accumulated for exact (fsum) final summation. Negative upper
parameters flip term signs for an initial segment and, when a_i is a
non-positive integer, terminate the series exactly.

At the argument boundary the terms decay only polynomially, like
k^-(1+m) with margin m = sum(b) - sum(a) (for 3F2 at z = 1), so truncation
at a small-term threshold leaves a tail far above tolerance when m is
small. The summation therefore adds an explicit power-law tail estimate
(midpoint-rule integral of C x^-s (1 + c1/x), with s and c1 known from the
parameters) and accepts only once doubling the term count leaves the
corrected total stable. The Gauss series at z = 1 with positive margin is
instead evaluated by its closed Gamma-ratio form.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import ConvergenceError, PrecisionError, PrecisionWarning

# Below this convergence margin the z = 1 series is summed anyway but a
# PrecisionWarning advises cross-checking with the Monte-Carlo oracle.
SLOW_CONVERGENCE_MARGIN = 0.05


@dataclass(frozen=True)
class SeriesControl:
    """Accuracy knobs for series summation."""

    rel_tol: float = 1e-12
    max_terms: int = 2_000_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_CONTROL = SeriesControl()


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise ValueError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def log_beta(a: float, b: float) -> float:
    """ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b)."""
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def pochhammer(q: float, n: int) -> float:
    """Rising factorial (q)_n = q (q+1) ... (q+n-1).

    Accumulated in sign/log-magnitude form, which stays defined for
    negative q (where the Gamma-ratio form has poles) and returns an exact
    zero as soon as a factor vanishes.
    """
    if n < 0:
        raise ValueError(f"pochhammer order must be nonnegative, got {n}")
    sign = 1.0
    log_mag = 0.0
    for k in range(n):
        factor = q + k
        if factor == 0.0:
            return 0.0
        if factor < 0.0:
            sign = -sign
            factor = -factor
        log_mag += math.log(factor)
    return sign * math.exp(log_mag)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _signed_log_gamma(x: float) -> tuple[float, float]:
    """(sign, ln |Gamma(x)|) for non-integer or positive x."""
    if x > 0:
        return 1.0, math.lgamma(x)
    if _is_nonpositive_integer(x):
        raise ValueError(f"Gamma pole at {x}")
    sign = 1.0 if math.sin(math.pi * x) > 0 else -1.0
    return sign, math.lgamma(x)


def _gauss_sum_at_one(a: float, b: float, c: float) -> float:
    """2F1(a, b; c; 1) = G(c) G(c-a-b) / (G(c-a) G(c-b)), valid c-a-b > 0."""
    sign = 1.0
    log_mag = 0.0
    for x, direction in ((c, 1), (c - a - b, 1), (c - a, -1), (c - b, -1)):
        s, lg = _signed_log_gamma(x)
        sign *= s
        log_mag += direction * lg
    return sign * math.exp(log_mag)


def hyp2f1(a: float, b: float, c: float, z: float,
           ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Gauss hypergeometric series sum_k (a)_k (b)_k / (c)_k * z^k / k!.

    Defined for |z| < 1, and at z = 1 when c - a - b > 0 (evaluated by the
    closed Gamma-ratio form there). c must not be a non-positive integer.
    """
    if _is_nonpositive_integer(c):
        raise ConvergenceError(f"lower parameter c={c} is a non-positive integer")
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        return _terminating_series((a, b), (c,), z)
    if z == 1.0:
        if not c - a - b > 0:
            raise ConvergenceError(
                f"2F1 at z=1 needs c-a-b > 0, got {c - a - b}"
            )
        return _gauss_sum_at_one(a, b, c)
    if not abs(z) < 1.0:
        raise ConvergenceError(f"2F1 series needs |z| < 1 or z = 1, got z={z}")

    terms = [1.0]
    term = 1.0
    small_streak = 0
    running = 1.0
    for k in range(ctl.max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        if term == 0.0:
            return math.fsum(terms)
        if not math.isfinite(term):
            raise PrecisionError("2F1 term overflowed")
        terms.append(term)
        running += term
        if abs(term) < ctl.rel_tol * abs(running):
            small_streak += 1
            if small_streak >= 3:
                total = math.fsum(terms)
                # Geometric bound on the remaining tail.
                ratio = abs(z) * abs((a + k + 1) * (b + k + 1)) / abs((c + k + 1) * (k + 2.0))
                if ratio < 1.0:
                    total += term * ratio / (1.0 - ratio)
                return total
        else:
            small_streak = 0
    raise PrecisionError(
        f"2F1 series did not converge within {ctl.max_terms} terms"
    )


def _terminating_series(uppers: tuple[float, ...], lowers: tuple[float, ...],
                        z: float) -> float:
    """Exact finite sum when some upper parameter is a non-positive integer."""
    n_terms = min(int(-u) for u in uppers if _is_nonpositive_integer(u))
    terms = [1.0]
    term = 1.0
    for k in range(n_terms):
        num = 1.0
        for u in uppers:
            num *= u + k
        den = k + 1.0
        for l in lowers:
            den *= l + k
        term *= num / den * z
        terms.append(term)
    return math.fsum(terms)


def hyp3f2_at_1(a1: float, a2: float, a3: float, b1: float, b2: float,
                ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Generalized hypergeometric 3F2(a1, a2, a3; b1, b2; 1).

    Requires margin m = b1+b2-a1-a2-a3 > 0. Terms decay like k^-(1+m); the
    summed prefix is completed with a power-law tail estimate and the
    result is accepted once doubling the prefix leaves it stable to the
    requested relative tolerance.
    """
    for b in (b1, b2):
        if _is_nonpositive_integer(b):
            raise ConvergenceError(
                f"lower parameter {b} is a non-positive integer"
            )
    margin = (b1 + b2) - (a1 + a2 + a3)
    uppers = (a1, a2, a3)
    if any(_is_nonpositive_integer(a) for a in uppers):
        return _terminating_series(uppers, (b1, b2), 1.0)
    if margin <= 0:
        raise ConvergenceError(
            f"3F2 at z=1 needs sum(b) - sum(a) > 0, got {margin}"
        )
    if margin < SLOW_CONVERGENCE_MARGIN:
        warnings.warn(
            f"3F2 convergence margin {margin:.3g} is below "
            f"{SLOW_CONVERGENCE_MARGIN}; the series converges very slowly "
            "and the Monte-Carlo oracle may be more reliable",
            PrecisionWarning,
            stacklevel=2,
        )

    # Asymptotics of the term sequence: term_k ~ C k^-s (1 + c1/k + c2/k^2)
    # with s = 1 + margin; c1 and c2 follow from expanding the term ratio
    # in 1/k against the model. The tail is then an Euler-Maclaurin sum of
    # the model starting at the first omitted index, accurate to
    # O(k^-(margin+3)), which is what lets small margins converge inside
    # the term budget.
    s = 1.0 + margin
    sum_a2 = a1 * a1 + a2 * a2 + a3 * a3
    sum_b2 = b1 * b1 + b2 * b2
    sum_a3 = a1**3 + a2**3 + a3**3
    sum_b3 = b1**3 + b2**3
    p2 = -(sum_a2 - sum_b2 - 1.0) / 2.0
    p3 = (sum_a3 - sum_b3 - 1.0) / 3.0
    c1 = 0.5 * s - p2
    c2 = (c1 + c1 * c1 - s / 3.0 - p3) / 2.0

    def tail_estimate(k: float, last_term: float) -> float:
        v = k + 1.0
        scale = last_term * math.pow(k, s) / (1.0 + c1 / k + c2 / (k * k))
        v_m = math.pow(v, -margin)
        v_s = v_m / v
        v_s1 = v_s / v
        return scale * (
            v_m / margin
            + 0.5 * v_s
            + s * v_s1 / 12.0
            + c1 * (v_s / s + 0.5 * v_s1)
            + c2 * v_s1 / (s + 1.0)
        )

    # Sign flips stop once every (a_i + k) is positive.
    k_asym = max(10.0, 8.0 - min(a1, a2, a3), 8.0 - min(b1, b2))

    terms = [1.0]
    term = 1.0
    running = 1.0
    small_streak = 0
    checkpoint = 256
    prev_total = None
    for k in range(ctl.max_terms):
        term *= (a1 + k) * (a2 + k) * (a3 + k) / ((b1 + k) * (b2 + k) * (k + 1.0))
        if term == 0.0:
            return math.fsum(terms)
        if not math.isfinite(term):
            raise PrecisionError("3F2 term overflowed")
        terms.append(term)
        running += term
        n = k + 1
        if abs(term) < ctl.rel_tol * abs(running):
            small_streak += 1
            if small_streak >= 3 and n > k_asym:
                return math.fsum(terms) + tail_estimate(n, term)
        else:
            small_streak = 0
        if n >= checkpoint and n > k_asym:
            total = math.fsum(terms) + tail_estimate(n, term)
            if prev_total is not None and abs(total - prev_total) <= (
                ctl.rel_tol * max(abs(total), 1e-300)
            ):
                return total
            prev_total = total
            checkpoint *= 2
    raise PrecisionError(
        f"3F2 series did not converge within {ctl.max_terms} terms "
        f"(margin {margin:.3g})"
    )
