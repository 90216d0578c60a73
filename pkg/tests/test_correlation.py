import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import gammaln

from sidecomp.correlation import (
    INF,
    CombinatorialGuardError,
    expected_inverse_fisher_trace,
    f_t_exact,
    joint_density,
    kernel_prior_integral,
    marginal_test,
    mean_square_distance,
    sample_pair,
    sample_theta2,
)
from sidecomp.source_models import (
    ParamVector,
    SourceClass,
    inverse_fisher_trace,
    jeffreys_density,
    jeffreys_sample,
)

BIN = SourceClass.memoryless(2)


def binary(p):
    return ParamVector(BIN, [p, 1 - p])


def f_t_bruteforce(p1, p2, t):
    """Kernel summed over every latent string, independent of the library's count route.

    ``f^t = sum_z mu_1(z) mu_2(z) / P_J(z)`` with the Jeffreys predictive
    ``P_J(z) = B(t - j + 1/2, j + 1/2) / B(1/2, 1/2)`` for a string with ``j`` ones.
    """
    total = 0.0
    for z in itertools.product((0, 1), repeat=t):
        j = sum(z)
        log_pred = (gammaln(t - j + 0.5) + gammaln(j + 0.5) - gammaln(t + 1.0)
                    - 2 * gammaln(0.5))
        mu1 = p1 ** (t - j) * (1 - p1) ** j
        mu2 = p2 ** (t - j) * (1 - p2) ** j
        total += mu1 * mu2 / math.exp(log_pred)
    return total


class TestSampling:
    def test_infinite_t_is_identity(self):
        rng = np.random.default_rng(0)
        pair = sample_pair(SourceClass.markov1(3), INF, rng)
        assert pair.theta2 == pair.theta1
        assert pair.theta2.rows.tobytes() == pair.theta1.rows.tobytes()

    def test_zero_t_is_fresh_draw(self):
        # With t=0 the posterior is the prior, so theta2 is the next Jeffreys draw.
        theta1 = binary(0.9)
        a, _ = sample_theta2(theta1, 0, np.random.default_rng(3))
        b, _ = sample_theta2(binary(0.1), 0, np.random.default_rng(3))
        assert a == b

    def test_seed_reproducible(self):
        cls = SourceClass.markov1(2)
        seq1 = [sample_pair(cls, 16, np.random.default_rng(11)) for _ in range(3)]
        seq2 = [sample_pair(cls, 16, np.random.default_rng(11)) for _ in range(3)]
        for a, b in zip(seq1, seq2):
            assert a.theta1 == b.theta1 and a.theta2 == b.theta2
            np.testing.assert_array_equal(a.z, b.z)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 5), st.sampled_from([0, 1, 7, 64, INF]), st.integers(0, 2**31))
    def test_pair_invariants(self, k, t, seed):
        pair = sample_pair(SourceClass.memoryless(k), t, np.random.default_rng(seed))
        assert np.all(pair.theta2.rows > 0)
        np.testing.assert_allclose(pair.theta2.rows.sum(axis=1), 1.0, atol=1e-12)

    def test_negative_t_rejected(self):
        with pytest.raises(ValueError):
            sample_theta2(binary(0.5), -1, np.random.default_rng(0))


class TestKernel:
    def test_t0_is_one(self):
        assert f_t_exact(binary(0.3), binary(0.9), 0) == 1.0

    @pytest.mark.parametrize("t", [1, 2, 3, 5])
    @pytest.mark.parametrize("p1,p2", [(0.2, 0.7), (0.5, 0.5), (0.95, 0.05)])
    def test_matches_string_enumeration(self, t, p1, p2):
        assert f_t_exact(binary(p1), binary(p2), t) == pytest.approx(f_t_bruteforce(p1, p2, t),
                                                                     rel=1e-10)

    @pytest.mark.parametrize("t", [1, 2, 4, 6])
    def test_integrates_to_one(self, t):
        for p2 in (0.5, 0.15, 0.97):
            value, err = kernel_prior_integral(binary(p2), t)
            assert value == pytest.approx(1.0, abs=1e-6)

    def test_independent_quadrature_t6(self):
        def integrand(p):
            return f_t_exact(binary(p), binary(0.3), 6) * jeffreys_density(binary(p))
        val, _ = integrate.quad(integrand, 0, 1, limit=200, epsabs=1e-10)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_matched_pair_beats_mismatched(self):
        assert f_t_exact(binary(0.5), binary(0.5), 8) > f_t_exact(binary(0.9), binary(0.1), 8)

    def test_ternary_integrates_to_one(self):
        from sidecomp.quadrature import arcsine_rule

        # Integrate over theta1 on the 2-simplex by stick-breaking: the first
        # coordinate is Beta(1/2, 1), the second given the first is arcsine.
        cls = SourceClass.memoryless(3)
        theta2 = ParamVector(cls, [0.2, 0.5, 0.3])
        u, wu = np.polynomial.legendre.leggauss(80)
        s = (u + 1) / 2
        a = s**2  # a ~ Beta(1/2, 1) under s uniform
        p, wp = arcsine_rule(80)
        total = 0.0
        for ai, wi in zip(a, wu / 2):
            for pj, wj in zip(p, wp):
                theta1 = ParamVector(cls, [ai, (1 - ai) * pj, (1 - ai) * (1 - pj)])
                total += wi * wj * f_t_exact(theta1, theta2, 4)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_guard(self):
        with pytest.raises(CombinatorialGuardError):
            f_t_exact(binary(0.5), binary(0.5), 21)

    def test_joint_density_t0(self):
        a, b = binary(0.3), binary(0.8)
        assert joint_density(a, b, 0) == pytest.approx(jeffreys_density(a) * jeffreys_density(b))


class TestMoments:
    def test_msd_infinite(self):
        assert mean_square_distance(BIN, INF, 1000, np.random.default_rng(0)).mean == 0.0

    def test_expected_trace_closed_form(self):
        rng = np.random.default_rng(1)
        draws = [inverse_fisher_trace(jeffreys_sample(SourceClass.memoryless(3), rng))
                 for _ in range(20000)]
        assert np.mean(draws) == pytest.approx(expected_inverse_fisher_trace(SourceClass.memoryless(3)),
                                               rel=0.02)
        assert expected_inverse_fisher_trace(BIN) == pytest.approx(0.125)

    def test_covariance_remark(self):
        est = mean_square_distance(BIN, 4096, 10**4, np.random.default_rng(2))
        target = 2 / 4096 * expected_inverse_fisher_trace(BIN)
        assert est.mean == pytest.approx(target, rel=0.2)

    def test_msd_decreasing(self):
        rng = np.random.default_rng(3)
        vals = [mean_square_distance(BIN, t, 5000, rng) for t in (4, 32, 256)]
        for a, b in zip(vals, vals[1:]):
            assert b.mean < a.mean + 2 * math.hypot(a.stderr, b.stderr)

    def test_msd_needs_trials(self):
        with pytest.raises(ValueError):
            mean_square_distance(BIN, 4, 10, np.random.default_rng(0))


class TestMarginal:
    @pytest.mark.parametrize("k,t", [(2, 0), (2, 64), (3, 1024)])
    def test_marginal_is_jeffreys(self, k, t):
        rep = marginal_test(SourceClass.memoryless(k), t, 10**4, np.random.default_rng(10 + t))
        assert rep.passed

    def test_markov_marginal(self):
        rep = marginal_test(SourceClass.markov1(2), 16, 4000, np.random.default_rng(5))
        assert rep.passed

    def test_detects_wrong_law(self):
        # A biased sampler (theta1 centred at 1/2) must fail the same test.
        from scipy import stats

        rng = np.random.default_rng(6)
        bad = rng.beta(2, 2, size=10**4)
        assert stats.kstest(bad, stats.beta(0.5, 0.5).cdf).pvalue < 0.01

    @pytest.mark.parametrize("t", [2, 64])
    def test_markov_marginal_ternary(self, t):
        rep = marginal_test(SourceClass.markov1(3), t, 4000, np.random.default_rng(7 + t))
        assert rep.passed
