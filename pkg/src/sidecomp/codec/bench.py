"""Empirical redundancy of the codec over Jeffreys-prior draws."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..correlation import sample_theta2
from ..redundancy import RedundancyQuery, Strategy, maximin_redundancy, side_info_redundancy
from ..source_models import (
    SourceClass,
    entropy,
    jeffreys_sample,
    log2_probability,
    log_fisher_integral,
    sample_string,
)
from .core import encode

INF = math.inf
MIN_TRIALS = 30


@dataclass(frozen=True)
class RedundancyMeasurement:
    strategy: str
    k: int
    n: int
    m: float
    t: float
    trials: int
    mean_length: float
    mean_entropy: float
    mean_redundancy_bits: float
    stderr: float
    mean_ideal_redundancy_bits: float
    approximate: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _trial(source_class: SourceClass, n: int, strategy: Strategy, m: int, t,
           seed: np.random.SeedSequence) -> tuple[int, float, float, float]:
    # Separate streams keep (theta1, x) identical across strategies for a
    # given seed, so strategies are compared on common random numbers.
    source_seed, side_seed = seed.spawn(2)
    src = np.random.default_rng(source_seed)
    theta1 = jeffreys_sample(source_class, src)
    x = sample_string(theta1, n, src)
    y = None
    if strategy is Strategy.UCOMP_ED:
        side = np.random.default_rng(side_seed)
        theta2, _ = sample_theta2(theta1, t, side)
        y = sample_string(theta2, m, side)
    run = encode(x, strategy, source_class, y=y, t=t)
    self_info = -log2_probability(theta1, x)
    return run.length_bits, run.ideal_bits, self_info, entropy(theta1, n).entropy_n


def _trial_star(args):
    return _trial(*args)


def measure_redundancy(source_class: SourceClass, n: int, strategy, m: int = 0, t=INF,
                       trials: int = 100, seed=0, workers: int = 1) -> RedundancyMeasurement:
    """Average ``l(x) - H^n(theta)`` over ``theta ~ Jeffreys``, ``x ~ mu_theta``.

    Each trial's redundancy is taken as ``l(x) + log2 mu_theta(x)``, which
    has the same expectation as ``l(x) - H^n(theta)`` but far less variance.
    UcompED trials draw ``theta2`` through the correlation model and
    ``y ~ mu_theta2`` of length ``m``. Results do not depend on ``workers``.
    """
    strategy = Strategy(strategy)
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials")
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    jobs = [(source_class, n, strategy, m, t, child) for child in root.spawn(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_star, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        results = [_trial_star(job) for job in jobs]
    arr = np.array(results, dtype=np.float64)
    lengths, ideal, self_info, ent = arr.T
    red = lengths - self_info
    approximate = strategy is Strategy.UCOMP_ED and t not in (0, INF) and m > 0
    return RedundancyMeasurement(
        strategy=strategy.value, k=source_class.k, n=n, m=m, t=t, trials=trials,
        mean_length=float(lengths.mean()), mean_entropy=float(ent.mean()),
        mean_redundancy_bits=float(red.mean()),
        stderr=float(red.std(ddof=1) / math.sqrt(trials)),
        mean_ideal_redundancy_bits=float((ideal - self_info).mean()),
        approximate=approximate)


def formula_redundancy(source_class: SourceClass, n: int, strategy, m=0, t=INF) -> float:
    """Closed-form counterpart of :func:`measure_redundancy` (clamped at zero only)."""
    d = source_class.dimension
    log_c = log_fisher_integral(source_class)
    if Strategy(strategy) is not Strategy.UCOMP_ED:
        return maximin_redundancy(n, d, log_c)
    q = RedundancyQuery(n=n, m=m, t=t, d=d, log_c=log_c, entropy_n=0.0)
    return side_info_redundancy(q)
