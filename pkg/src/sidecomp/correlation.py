"""Hyperparameter-``t`` correlation between two parameter vectors.

``theta1`` is drawn from the Jeffreys prior, a latent string ``z`` of length
``t`` is drawn from ``mu_theta1``, and ``theta2`` is drawn from the posterior
given ``z``. With the per-row Dirichlet(1/2) prior that posterior is
Dirichlet(counts(z) + 1/2), so sampling is exact. A Markov latent chain
starts from a uniformly drawn state rather than from the stationary law of
``theta1``; otherwise the initial-state factor would break conjugacy. ``t = math.inf`` means
``theta2 = theta1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import gammaln, logsumexp

from .quadrature import integrate_jeffreys_binary
from .source_models import (
    ParamVector,
    SourceClass,
    SourceKind,
    jeffreys_density,
    jeffreys_sample,
    sample_string,
    symbol_counts,
    transition_counts,
)

INF = math.inf
#: Largest ``k**t`` that :func:`f_t_exact` will enumerate.
ENUMERATION_LIMIT = 10**6
#: Significance level of :func:`marginal_test`.
MARGINAL_ALPHA = 0.01


class CombinatorialGuardError(ValueError):
    pass


def _check_t(t) -> None:
    if t != INF and (t < 0 or int(t) != t):
        raise ValueError(f"t must be a nonnegative integer or inf, got {t}")


@dataclass(frozen=True)
class CorrelatedPair:
    theta1: ParamVector
    theta2: ParamVector
    t: float
    z: np.ndarray | None


def _latent_counts(z: np.ndarray, source_class: SourceClass) -> np.ndarray:
    if source_class.kind is SourceKind.MEMORYLESS:
        return symbol_counts(z, source_class.k)[None, :]
    # The latent chain starts from a uniform state, so its likelihood in
    # theta is the transition product alone and the posterior is conjugate.
    return transition_counts(z, source_class.k)


def sample_theta2(theta1: ParamVector, t, rng: np.random.Generator):
    """Draw ``(theta2, z)`` given ``theta1``; ``z`` is None when ``t`` is inf."""
    _check_t(t)
    if t == INF:
        return theta1, None
    z = sample_string(theta1, int(t), rng, initial="uniform")
    alpha = _latent_counts(z, theta1.source_class) + 0.5
    g = rng.standard_gamma(alpha)
    g = np.maximum(g, np.finfo(np.float64).tiny)
    rows = g / g.sum(axis=1, keepdims=True)
    return ParamVector(theta1.source_class, rows), z


def sample_pair(source_class: SourceClass, t, rng: np.random.Generator) -> CorrelatedPair:
    theta1 = jeffreys_sample(source_class, rng)
    theta2, z = sample_theta2(theta1, t, rng)
    return CorrelatedPair(theta1, theta2, t, z)


def _sample_free_batch(source_class: SourceClass, t, trials: int, rng):
    """Free coordinates of ``trials`` pairs, shape ``(trials, d)`` each.

    Memoryless draws are vectorized through multinomial counts, which have
    the same law as counting a sampled latent string.
    """
    k = source_class.k
    if source_class.kind is SourceKind.MEMORYLESS:
        theta1 = rng.dirichlet(np.full(k, 0.5), size=trials)
        if t == INF:
            theta2 = theta1
        else:
            # Dirichlet(1/2) may return exact-zero coordinates that sum to
            # slightly below one after rounding.
            p = theta1 / theta1.sum(axis=1, keepdims=True)
            counts = rng.multinomial(int(t), p) if t > 0 else np.zeros((trials, k))
            g = rng.standard_gamma(counts + 0.5)
            theta2 = g / g.sum(axis=1, keepdims=True)
        return theta1[:, :-1], theta2[:, :-1]
    first, second = [], []
    for _ in range(trials):
        pair = sample_pair(source_class, t, rng)
        first.append(pair.theta1.free_coordinates())
        second.append(pair.theta2.free_coordinates())
    return np.array(first), np.array(second)


@dataclass(frozen=True)
class MSDEstimate:
    t: float
    trials: int
    mean: float
    stderr: float


def mean_square_distance(source_class: SourceClass, t, trials: int,
                         rng: np.random.Generator) -> MSDEstimate:
    """Monte Carlo ``E ||theta2 - theta1||^2`` over the free coordinates."""
    _check_t(t)
    if t == INF:
        return MSDEstimate(t, trials, 0.0, 0.0)
    if trials < 1000:
        raise ValueError("mean_square_distance needs at least 1000 trials")
    a, b = _sample_free_batch(source_class, t, trials, rng)
    sq = np.sum((b - a) ** 2, axis=1)
    return MSDEstimate(t, trials, float(sq.mean()), float(sq.std(ddof=1) / math.sqrt(trials)))


def expected_inverse_fisher_trace(source_class: SourceClass) -> float:
    """``E[tr I^-1(theta)]`` under the Jeffreys prior (memoryless only).

    Each free coordinate is Beta(1/2, (k-1)/2), so
    ``E[theta_i (1 - theta_i)] = 1/k - 0.75 / ((k/2)(k/2 + 1))``.
    """
    if source_class.kind is not SourceKind.MEMORYLESS:
        raise ValueError("closed form available for memoryless sources only")
    k = source_class.k
    half = k / 2.0
    return (k - 1) * (1.0 / k - 0.75 / (half * (half + 1.0)))


@dataclass(frozen=True)
class GoodnessOfFit:
    t: float
    trials: int
    statistic: float
    pvalue: float

    @property
    def passed(self) -> bool:
        return self.pvalue > MARGINAL_ALPHA


def marginal_test(source_class: SourceClass, t, trials: int,
                  rng: np.random.Generator) -> GoodnessOfFit:
    """Kolmogorov-Smirnov test of every free coordinate of ``theta2``.

    Under Jeffreys each coordinate is Beta(1/2, (k-1)/2). The reported
    p-value is Bonferroni-corrected over the ``d`` coordinates and the
    statistic is the largest KS distance.
    """
    _check_t(t)
    if trials < 1000:
        raise ValueError("marginal_test needs at least 1000 trials")
    _, second = _sample_free_batch(source_class, t, trials, rng)
    k = source_class.k
    ref = stats.beta(0.5, (k - 1) / 2.0)
    stat, pmin = 0.0, 1.0
    for j in range(second.shape[1]):
        res = stats.kstest(second[:, j], ref.cdf)
        stat = max(stat, float(res.statistic))
        pmin = min(pmin, float(res.pvalue))
    return GoodnessOfFit(t, trials, stat, min(1.0, pmin * second.shape[1]))


def _enumerated_counts(k: int, t: int) -> np.ndarray:
    """Symbol counts of every string in ``range(k)**t``, shape ``(k**t, k)``."""
    idx = np.arange(k**t, dtype=np.int64)
    counts = np.zeros((idx.size, k), dtype=np.int64)
    for _ in range(t):
        digit = idx % k
        idx //= k
        for s in range(k):
            counts[:, s] += digit == s
    return counts


def f_t_exact(theta1: ParamVector, theta2: ParamVector, t) -> float:
    """Coupling kernel ``f^t`` by enumerating all ``k**t`` latent strings.

    The denominator is the Jeffreys-mixture probability of each string, the
    Dirichlet-multinomial ``B(counts + 1/2) / B(1/2, ..., 1/2)``.
    """
    _check_t(t)
    if theta1.source_class != theta2.source_class:
        raise ValueError("parameter vectors must share a source class")
    if theta1.source_class.kind is not SourceKind.MEMORYLESS:
        raise ValueError("exact f^t is only available for memoryless sources")
    if t == 0:
        return 1.0
    k = theta1.k
    if t == INF or k ** int(t) > ENUMERATION_LIMIT:
        raise CombinatorialGuardError(
            f"k**t exceeds {ENUMERATION_LIMIT}; estimate by Monte Carlo instead")
    t = int(t)
    counts = _enumerated_counts(k, t)
    log_mix = (np.sum(gammaln(counts + 0.5), axis=1) - gammaln(t + k / 2.0)
               - k * gammaln(0.5) + gammaln(k / 2.0))
    log_num = counts @ (np.log(theta1.probs) + np.log(theta2.probs))
    return float(np.exp(logsumexp(log_num - log_mix)))


def joint_density(theta1: ParamVector, theta2: ParamVector, t) -> float:
    """``p^t(theta1, theta2) = w(theta1) w(theta2) f^t(theta1, theta2)``."""
    return jeffreys_density(theta1) * jeffreys_density(theta2) * f_t_exact(theta1, theta2, t)


def kernel_prior_integral(theta2: ParamVector, t, tol: float = 1e-8) -> tuple[float, float]:
    """``int f^t(theta1, theta2) w(theta1) dtheta1`` for ``k = 2`` by quadrature."""
    if theta2.source_class != SourceClass.memoryless(2):
        raise ValueError("quadrature is implemented for binary memoryless sources")
    cls = theta2.source_class

    def integrand(p):
        return np.array([f_t_exact(ParamVector(cls, [q, 1.0 - q]), theta2, t) for q in p])

    return integrate_jeffreys_binary(integrand, tol=tol)
