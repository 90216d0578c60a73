"""Acceptance criteria, one test per criterion, each at its stated tolerance and runtime budget.

``pytest tests/test_acceptance.py`` prints a PASS/FAIL line per criterion in
the terminal summary (see ``conftest.py``).
"""

import math

import numpy as np
import pytest

from sidecomp import codec, correlation, mi_oracle, netcomp, redundancy
from sidecomp.redundancy import INF, RedundancyQuery, Strategy
from sidecomp.source_models import (
    PRINTED_MARKOV256_DIMENSION,
    ParamVector,
    SourceClass,
    jeffreys_sample,
    log_fisher_integral,
    sample_string,
)

BIN = SourceClass.memoryless(2)
LOG2PI = math.log2(math.pi)


class Failures(list):
    def check(self, ok, message):
        if not ok:
            self.append(message)

    def raise_if_any(self):
        assert not self, "\n".join(self)


@pytest.mark.criterion(1, "network golden number G_BH = 2.142857 on the sample graph, g=5")
def test_criterion_1_network(budget):
    with budget(1.0):
        rep = netcomp.gain_bh(netcomp.fig5_network(), "S", "C", 5.0)
    assert rep.gain_bh == pytest.approx(2.142857, abs=1e-6)


@pytest.mark.criterion(2, "memory threshold m_delta = 8.94e6 characters within 1%")
def test_criterion_2_memory_threshold(budget):
    with budget(1.0):
        m_delta = redundancy.memory_threshold(1, PRINTED_MARKOV256_DIMENSION, 0.5, 0.01)
    assert abs(m_delta - 8.94e6) / 8.94e6 <= 0.01


@pytest.mark.slow
@pytest.mark.criterion(3, "correlation-model property suite")
def test_criterion_3_correlation_model(budget):
    fails = Failures()
    rng = np.random.default_rng(20240603)
    with budget(120.0):
        for _ in range(200):
            a, b = jeffreys_sample(BIN, rng), jeffreys_sample(BIN, rng)
            fails.check(correlation.f_t_exact(a, b, 0) == 1.0, "f^0 != 1")
        for t in (1, 2, 4, 6):
            for p in (0.5, 0.03, 0.31, 0.88):
                value, _ = correlation.kernel_prior_integral(ParamVector(BIN, [p, 1 - p]), t)
                fails.check(abs(value - 1) <= 1e-6, f"int f^{t} w = {value!r} at theta2={p}")
        for t in (0, 64, 1024):
            fit = correlation.marginal_test(BIN, t, 10**4, rng)
            fails.check(fit.passed, f"marginal goodness of fit fails at t={t}: p={fit.pvalue:.4g}")
        ts = (2**6, 2**8, 2**10, 2**12)
        msd = [correlation.mean_square_distance(BIN, t, 10**4, rng) for t in ts]
        for (t0, lo), (t1, hi) in zip(zip(ts, msd), zip(ts[1:], msd[1:])):
            margin = 2 * math.hypot(lo.stderr, hi.stderr)
            fails.check(lo.mean - hi.mean > margin,
                        f"E||theta2-theta1||^2 not decreasing by 2 stderr from t={t0} to t={t1}")
        target = 2 * correlation.expected_inverse_fisher_trace(BIN)
        scaled = ts[-1] * msd[-1].mean
        fails.check(abs(scaled - target) / target <= 0.25,
                    f"t E||.||^2 = {scaled:.4g} vs 2 E tr I^-1 = {target:.4g}")
    fails.raise_if_any()


@pytest.mark.slow
@pytest.mark.criterion(4, "MI oracle against the effective-length formula plus the MI identity")
def test_criterion_4_mi_oracle(budget):
    fails = Failures()
    with budget(300.0):
        rel = []
        for n, m in ((256, 1024), (512, 2048)):
            exact = mi_oracle.mi_conditional(n, m, INF).value_bits
            approx = 0.5 * math.log2(1 + n / m)
            rel.append(abs(exact - approx) / approx)
        fails.check(rel[0] <= 0.25, f"relative error {rel[0]:.4f} at (256, 1024)")
        fails.check(rel[1] < rel[0], f"relative error did not shrink: {rel}")
        for n, m, t in ((64, 64, INF), (64, 64, 16), (128, 512, 300)):
            rep = mi_oracle.mi_gap_identity_check(n, m, t)
            fails.check(abs(rep.residual) <= 1e-4, f"identity residual {rep.residual:.3g} at {n, m, t}")
    fails.raise_if_any()


@pytest.mark.slow
@pytest.mark.criterion(5, "codec property suite")
def test_criterion_5_codec(budget):
    fails = Failures()
    rng = np.random.default_rng(5)
    with budget(300.0):
        classes = [SourceClass.memoryless(2), SourceClass.memoryless(3), SourceClass.memoryless(5),
                   SourceClass.markov1(2), SourceClass.markov1(3)]
        failures = 0
        for i in range(10**4):
            cls = classes[i % len(classes)]
            theta = jeffreys_sample(cls, rng)
            x = sample_string(theta, int(rng.integers(0, 48)), rng)
            if i % 2:
                theta2, _ = correlation.sample_theta2(theta, [0, 8, INF][i % 3], rng)
                y = sample_string(theta2, int(rng.integers(0, 96)), rng)
                run = codec.encode(x, Strategy.UCOMP_ED, cls, y=y, t=[0, 8, INF][i % 3])
                out = codec.decode(run.bitstream, y=y, t=[0, 8, INF][i % 3])
            else:
                run = codec.encode(x, Strategy.UCOMP, cls)
                out = codec.decode(run.bitstream)
            failures += not np.array_equal(out, x)
        fails.check(failures == 0, f"{failures} lossy round trips out of 10^4")

        n = 4096
        ucomp = codec.measure_redundancy(BIN, n, Strategy.UCOMP, trials=500, seed=51)
        formula = redundancy.maximin_redundancy(n, 1, LOG2PI)
        ratio = ucomp.mean_redundancy_bits / formula
        fails.check(0.7 <= ratio <= 1.4, f"Ucomp redundancy ratio {ratio:.3f} outside [0.7, 1.4]")

        indep = codec.measure_redundancy(BIN, n, Strategy.UCOMP_ED, m=4 * n, t=0, trials=500,
                                         seed=51)
        diff = abs(indep.mean_redundancy_bits - ucomp.mean_redundancy_bits)
        fails.check(diff <= 2 * math.hypot(indep.stderr, ucomp.stderr),
                    f"UcompED at t=0 differs from Ucomp by {diff:.3f} bits")

        reds = [codec.measure_redundancy(BIN, n, Strategy.UCOMP_ED, m=f * n, t=INF, trials=200,
                                         seed=52) for f in (1, 4, 16)]
        for lo, hi in zip(reds, reds[1:]):
            margin = 2 * math.hypot(lo.stderr, hi.stderr)
            fails.check(hi.mean_redundancy_bits <= lo.mean_redundancy_bits + margin,
                        f"redundancy rose from m={lo.m} to m={hi.m}")
    fails.raise_if_any()


@pytest.mark.criterion(6, "gain-law property suite")
def test_criterion_6_gain_laws(budget):
    fails = Failures()
    rng = np.random.default_rng(6)
    with budget(30.0):
        def length(size):
            v = 10 ** rng.uniform(0, 8, size)
            v[rng.random(size) < 0.1] = 0.0
            v[rng.random(size) < 0.1] = INF
            return v

        size = 10**4
        ns = 10 ** rng.uniform(0, 8, size)
        ms, ts = length(size), length(size)
        ds = rng.integers(1, 70000, size)
        log_cs = rng.uniform(-5, 60, size)
        rates = rng.uniform(0.01, 8, size)
        below = 0
        for n, m, t, d, lc, h in zip(ns, ms, ts, ds, log_cs, rates):
            q = RedundancyQuery(float(n), float(m), float(t), int(d), float(lc), float(h * n))
            below += redundancy.gain(q) < 1.0
        fails.check(below == 0, f"gain < 1 at {below} grid points")

        for n, m, d in ((1024, 10**6, 1), (2**20, 2**24, 62580), (7.0, 3.0, 5)):
            q = RedundancyQuery(n, m, 0.0, d, 3.0, 0.8 * n)
            fails.check(redundancy.gain(q) == 1.0, f"gain != 1 at t=0 for n={n}")

        for m, t, d, log_c, h in ((2**16, 2**12, 1, LOG2PI, 0.5), (2**20, INF, 62580, 1.2e6, 0.5),
                                  (2**10, 2**10, 8, -3.0, 2.0), (INF, 2**14, 3, 4.0, 1.0)):
            c_bound = (d / 2 + max(0.0, log_c) / 10) / h
            for e in range(10, 26):
                n = 2.0**e
                g = redundancy.gain(RedundancyQuery(n, m, t, d, log_c, h * n))
                fails.check(g - 1 <= c_bound * math.log2(n) / n,
                            f"gain(n)-1 = {g - 1:.3g} above C log n / n at n=2^{e}, d={d}")

        grid = 0
        for delta in (0.001, 0.01, 0.1, 0.5, 0.9):
            for d in (1, 4, 255, 62580):
                for h in (0.05, 0.5, 1.0, 8.0):
                    for n in (2.0**10, 2.0**15, 2.0**20, 2.0**25):
                        m_delta = redundancy.memory_threshold(n, d, h * n, delta)
                        q = RedundancyQuery(n, m_delta, INF, d, 10.0, h * n)
                        g_hat = redundancy.gain_limit(n, d, 10.0, h * n)
                        grid += 1
                        fails.check(redundancy.gain(q) >= (1 - delta) * g_hat,
                                    f"m_delta guarantee fails at delta={delta}, d={d}, h={h}, n={n}")
        assert grid == 320
    fails.raise_if_any()


@pytest.mark.criterion(7, "formula-based gain limit ~2.3 and prefix-free vs one-to-one rates")
def test_criterion_7_curve_substitutes(budget):
    fails = Failures()
    with budget(1.0):
        markov = SourceClass.markov1(256)
        log_c = log_fisher_integral(markov)
        d = PRINTED_MARKOV256_DIMENSION
        n = 512 * 1024
        g_hat = redundancy.gain_limit(n, d, log_c, 0.5 * n)
        fails.check(abs(g_hat - 2.35) / 2.35 <= 0.10, f"gain limit {g_hat:.4f} not within 10% of 2.35")
        fails.check(round(g_hat, 1) == 2.3, f"gain limit {g_hat:.4f} does not evaluate to 2.3")
        n = 32 * 1024
        pf = redundancy.normalized_rate(n, redundancy.maximin_redundancy(n, d, log_c))
        o2o = redundancy.normalized_rate(n, redundancy.one_to_one_lower_bound(n, d, log_c))
        fails.check(abs(pf - o2o) / pf < 0.01, f"rates differ by {abs(pf - o2o) / pf:.4%}")
    fails.raise_if_any()
