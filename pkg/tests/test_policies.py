"""Tests for the Thompson-family policies and the policy factory."""

import math

import pytest

from banditlab.errors import ConfigError
from banditlab.policies import (
    DiscountedPosterior,
    DiscountedThompson,
    DynamicThompson,
    OraclePolicy,
    binarize_reward,
    make_policy,
)
from banditlab.rng import BetaParams, RngState, beta_variance, sample_beta, sample_bernoulli


class TestBinarize:
    def test_endpoints_pass_through_without_draws(self):
        rng = RngState(1)
        before = rng.generator.bit_generator.state["state"]["counter"].copy()
        assert binarize_reward(1.0, rng) == 1
        assert binarize_reward(0.0, rng) == 0
        after = rng.generator.bit_generator.state["state"]["counter"].copy()
        assert (before == after).all()

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            binarize_reward(1.2, RngState(1))

    def test_fractional_mean(self):
        rng = RngState(2)
        n = 100_000
        mean = sum(binarize_reward(0.37, rng) for _ in range(n)) / n
        assert abs(mean - 0.37) < 0.005


class TestDiscountedPosterior:
    def test_played_arm_update_arithmetic(self):
        post = DiscountedPosterior(2, gamma=0.5)
        post.S[0], post.F[0] = 4.0, 2.0
        post.apply(0, 1)
        assert (post.S[0], post.F[0]) == (3.0, 1.0)

    def test_unplayed_arm_discounts_and_keeps_mean(self):
        post = DiscountedPosterior(2, gamma=0.5)
        post.S[1], post.F[1] = 4.0, 2.0
        post._mean[1] = 4.0 / 6.0
        before = post.evidence_mean(1)
        post.apply(0, 1)
        assert (post.S[1], post.F[1]) == (2.0, 1.0)
        assert post.evidence_mean(1) == before

    def test_gamma_one_reduces_to_plain_counts(self):
        post = DiscountedPosterior(2, gamma=1.0)
        for r in (1, 0, 1, 1):
            post.apply(0, r)
        assert (post.S[0], post.F[0]) == (3.0, 1.0)
        assert (post.S[1], post.F[1]) == (0.0, 0.0)

    def test_gamma_domain(self):
        with pytest.raises(ConfigError):
            DiscountedPosterior(2, gamma=0.0)
        with pytest.raises(ConfigError):
            DiscountedPosterior(2, gamma=1.2)
        with pytest.raises(ConfigError):
            DiscountedPosterior(2, gamma=0.5, alpha0=-1)

    def test_shapes_clamped_when_offsets_zero(self):
        post = DiscountedPosterior(2, gamma=0.5, alpha0=0.0, beta0=0.0)
        a, b = post.shape(0)
        assert a == 1e-12 and b == 1e-12

    def test_evidence_bound_never_exceeded(self):
        # geometric series bound: S + F <= 1/(1-gamma)
        rng = RngState(5)
        for gamma in (0.4, 0.75, 0.99):
            bound = 1.0 / (1.0 - gamma)
            post = DiscountedPosterior(2, gamma=gamma)
            for _ in range(20_000):
                arm = sample_bernoulli(rng, 0.5)
                post.apply(arm, sample_bernoulli(rng, 0.7))
                assert post.evidence(0) <= bound
                assert post.evidence(1) <= bound

    def test_mean_invariance_exact_along_random_runs(self):
        rng = RngState(6)
        for gamma in (0.4, 0.75, 0.99):
            post = DiscountedPosterior(3, gamma=gamma)
            for _ in range(3000)            :
                arm = int(rng.generator.random() * 3)
                snapshot = [post.evidence_mean(k) for k in range(3)]
                post.apply(arm, sample_bernoulli(rng, 0.6))
                for k in range(3):
                    if k != arm:
                        assert post.evidence_mean(k) == snapshot[k]

    def test_variance_strictly_grows_for_interior_unplayed_arms(self):
        rng = RngState(7)
        post = DiscountedPosterior(2, gamma=0.75)
        post.apply(1, 1)
        post.apply(1, 0)
        # strictness requires the evidence to stay above float epsilon;
        # deep in underflow 1 + n == 1 and the variance sits still
        for _ in range(100):
            m = post.evidence_mean(1)
            var_before = m * (1 - m) / (post.evidence(1) + 1.0)
            post.apply(0, sample_bernoulli(rng, 0.5))
            var_after = m * (1 - m) / (post.evidence(1) + 1.0)
            if post.evidence(1) + 1.0 > 1.0:
                assert var_after > var_before
            else:
                assert var_after >= var_before


class TestDiscountedThompson:
    def test_extreme_separation_prefers_loaded_arm(self):
        policy = DiscountedThompson(2, gamma=0.9)
        policy.posterior.S[0] = 1e6
        policy.posterior.F[1] = 1e6
        rng = RngState(8)
        wins = sum(policy.select(rng).arm == 0 for _ in range(10_000))
        assert wins / 10_000 > 0.999

    def test_symmetric_state_balanced(self):
        policy = DiscountedThompson(2, gamma=0.9)
        rng = RngState(9)
        freq = sum(policy.select(rng).arm == 0 for _ in range(10_000)) / 10_000
        assert abs(freq - 0.5) < 0.015

    def test_selection_is_argmax_of_scores(self):
        policy = DiscountedThompson(4, gamma=0.5)
        rng = RngState(10)
        for _ in range(200):
            choice = policy.select(rng)
            assert choice.scores[choice.arm] == max(choice.scores)

    def test_ts_recovery_small(self):
        # gamma = 1 with unit offsets must replay a directly coded
        # Beta-Bernoulli Thompson sampler on the same stream.
        policy = make_policy("dts", 3, gamma=1.0, alpha0=1.0, beta0=1.0)
        rng_policy = RngState(11)
        rng_ref = RngState(11)
        alpha = [1.0] * 3
        beta = [1.0] * 3
        mus = (0.2, 0.5, 0.8)
        for _ in range(2000):
            arm = policy.select(rng_policy).arm
            ref_scores = [sample_beta(rng_ref, BetaParams(alpha[k], beta[k]))
                          for k in range(3)]
            ref_arm = max(range(3), key=lambda k: ref_scores[k])
            assert arm == ref_arm
            r = sample_bernoulli(rng_policy, mus[arm])
            r_ref = sample_bernoulli(rng_ref, mus[ref_arm])
            assert r == r_ref
            policy.update(arm, float(r), rng_policy)
            alpha[ref_arm] += r_ref
            beta[ref_arm] += 1 - r_ref

    def test_dots_scores_clamped_at_posterior_mean(self):
        policy = DiscountedThompson(3, gamma=0.6, optimistic=True)
        rng = RngState(12)
        policy.update(1, 1.0, rng)
        policy.update(2, 0.0, rng)
        for _ in range(500):
            choice = policy.select(rng)
            for k in range(3):
                assert choice.scores[k] >= policy.posterior.posterior_mean(k)

    def test_dots_prefers_high_variance_on_equal_means(self):
        # equal posterior means, arm 0 far more diffuse: only upward
        # deviations survive the clamp, so arm 0 should win more argmaxes
        policy = DiscountedThompson(2, gamma=1.0, optimistic=True)
        policy.posterior.S[1] = 50.0
        policy.posterior.F[1] = 50.0
        rng = RngState(13)
        freq = sum(policy.select(rng).arm == 0 for _ in range(10_000)) / 10_000
        assert freq > 0.5

    def test_dots_matches_dts_on_degenerate_posterior(self):
        # dominant arm with overwhelming successes: the clamp almost never
        # binds, so dOTS and dTS pick the same way
        def build(optimistic):
            policy = DiscountedThompson(2, gamma=1.0, optimistic=optimistic)
            policy.posterior.S[0] = 1e6
            return policy

        n = 10_000
        freq_dots = sum(build(True).select(RngState(14 + i)).arm == 0 for i in range(n)) / n
        freq_dts = sum(build(False).select(RngState(14 + i)).arm == 0 for i in range(n)) / n
        assert abs(freq_dots - freq_dts) < 0.005

    def test_discounted_prior_configuration(self):
        policy = make_policy("dts", 2, gamma=0.5, alpha0=0.0, beta0=0.0, s0=1.0, f0=1.0)
        post = policy.posterior
        assert post.shape(0) == (1.0, 1.0)
        policy.update(0, 1.0, RngState(15))
        assert post.shape(0) == (1.5, 0.5)
        assert post.shape(1) == (0.5, 0.5)


class TestDynamicThompson:
    def test_below_threshold_plain_increment(self):
        policy = DynamicThompson(2, C=25)
        policy.alpha[0], policy.beta[0] = 6.0, 4.0
        policy.update(0, 1.0, RngState(16))
        assert (policy.alpha[0], policy.beta[0]) == (7.0, 4.0)

    def test_capped_update_fixed_point(self):
        policy = DynamicThompson(2, C=25)
        policy.alpha[0], policy.beta[0] = 20.0, 5.0
        policy.update(0, 1.0, RngState(17))
        assert policy.alpha[0] + policy.beta[0] == pytest.approx(25.0, rel=1e-12)
        assert policy.alpha[0] == pytest.approx(21.0 * 25 / 26, rel=1e-12)

    def test_unplayed_arm_bit_identical(self):
        policy = DynamicThompson(2, C=25)
        policy.alpha[1], policy.beta[1] = 3.5, 2.5
        policy.update(0, 1.0, RngState(18))
        assert (policy.alpha[1], policy.beta[1]) == (3.5, 2.5)

    def test_cap_keeps_evidence_at_c(self):
        policy = DynamicThompson(2, C=25)
        rng = RngState(19)
        for _ in range(500):
            policy.update(0, float(sample_bernoulli(rng, 0.6)), rng)
        assert policy.alpha[0] + policy.beta[0] <= 26.0


class TestOraclePolicy:
    def test_plays_argmax_of_true_means(self):
        means = [[0.1, 0.9, 0.1], [0.8, 0.2, 0.3]]
        import numpy as np

        policy = OraclePolicy(np.array(means))
        rng = RngState(20)
        picks = []
        for _ in range(3):
            arm = policy.select(rng).arm
            picks.append(arm)
            policy.update(arm, 1.0, rng)
        assert picks == [1, 0, 1]


class TestMakePolicy:
    def test_valid_names_and_defaults(self):
        policy = make_policy("dTS", 4, gamma=0.75)
        assert policy.name == "dts"
        assert policy.posterior.alpha0 == 1.0
        assert policy.posterior.beta0 == 1.0
        assert policy.posterior.S == [0.0] * 4

    def test_ts_is_gamma_one(self):
        policy = make_policy("ts", 4)
        assert policy.posterior.gamma == 1.0

    def test_gamma_zero_rejected(self):
        with pytest.raises(ConfigError):
            make_policy("dts", 4, gamma=0.0)

    def test_unknown_name_lists_valid(self):
        with pytest.raises(ConfigError) as err:
            make_policy("ucb1", 4)
        assert "dts" in str(err.value)

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ConfigError):
            make_policy("dts", 4, gamma=0.5, tau=3)

    def test_aliases(self):
        assert make_policy("dyn_ts", 4, C=25).name == "dyn-ts"
        assert make_policy("exp3ix", 4, horizon=100).name == "exp3-ix"

    def test_preset_parameters_applied(self):
        policy = make_policy("dts", 4, env_preset="abrupt")
        assert policy.posterior.gamma == 0.60
        policy = make_policy("rexp3", 4, env_preset="abrupt")
        assert policy.gamma_r == 0.5000
        policy = make_policy("sw-ucb", 4, env_preset="slow")
        assert policy.tau == 89

    def test_explicit_overrides_beat_presets(self):
        policy = make_policy("dts", 4, env_preset="abrupt", gamma=0.9)
        assert policy.posterior.gamma == 0.9

    def test_oracle_not_constructible_here(self):
        with pytest.raises(ConfigError):
            make_policy("oracle", 4)
