"""Closed-form redundancy, gain and memory-size calculators.

Lengths ``n``, ``m``, ``t`` count source characters and accept ``math.inf``.
Redundancies are in bits. Asymptotic remainder terms (``o(1)``, ``O(1)``,
``O(1/sqrt(n))``) are dropped, so at small ``n`` the formulas can leave the
range ``[0, n log2 k - H^n]``; by default they are clamped into it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

from .source_models import SourceClass, log_fisher_integral

INF = math.inf
LOG2E = 1.0 / math.log(2.0)
TWO_PI_E = 2.0 * math.pi * math.e


class Strategy(str, enum.Enum):
    """Where the side-information string is available."""

    UCOMP = "Ucomp"
    UCOMP_E = "UcompE"
    UCOMP_D = "UcompD"
    UCOMP_ED = "UcompED"


class NoSideInformation(ValueError):
    """Raised when the effective side-information length is zero."""


def _clamp(value: float, ceiling: float) -> tuple[float, bool]:
    if value < 0.0:
        return 0.0, True
    if value > ceiling:
        return ceiling, True
    return value, False


def maximin_redundancy(n, d, log_c, clamp: bool = True, ceiling: float = INF) -> float:
    """``(d/2) log2(n / (2 pi e)) + log_c``, optionally clamped to ``[0, ceiling]``."""
    return _maximin(n, d, log_c, clamp, ceiling)[0]


def _maximin(n, d, log_c, clamp, ceiling):
    if n < 1:
        raise ValueError("n must be >= 1")
    raw = 0.5 * d * math.log2(n / TWO_PI_E) + log_c
    return _clamp(raw, ceiling) if clamp else (raw, False)


def m_star(m, t) -> float:
    """Effective side-information length, ``1/m* = 1/m + 2/t``."""
    if m < 0 or t < 0:
        raise ValueError("m and t must be nonnegative")
    if m == 0 or t == 0:
        return 0.0
    inv = (0.0 if m == INF else 1.0 / m) + (0.0 if t == INF else 2.0 / t)
    return INF if inv == 0.0 else 1.0 / inv


def r_hat(n, m, t, d) -> float:
    """``(d/2) log2(1 + n / m*(m, t))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ms = m_star(m, t)
    if ms == 0.0:
        raise NoSideInformation("m*(m, t) = 0: no side information; use the maximin redundancy")
    if ms == INF:
        return 0.0
    return 0.5 * d * math.log2(1.0 + n / ms)


def binary_entropy(eps: float) -> float:
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    if eps in (0.0, 1.0):
        return 0.0
    return -(eps * math.log2(eps) + (1.0 - eps) * math.log2(1.0 - eps))


@dataclass(frozen=True)
class RedundancyQuery:
    n: float
    m: float
    t: float
    d: int
    log_c: float
    entropy_n: float
    k: int | None = None
    clamp: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m < 0 or self.t < 0:
            raise ValueError("m and t must be nonnegative")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.entropy_n < 0:
            raise ValueError("entropy_n must be nonnegative")
        if self.k is not None and self.entropy_n > self.n * math.log2(self.k) * (1 + 1e-12):
            raise ValueError("entropy_n exceeds n log2 k")

    @property
    def ceiling(self) -> float:
        """Largest meaningful redundancy: ``n log2 k - H^n``."""
        if self.k is None:
            return INF
        return max(0.0, self.n * math.log2(self.k) - self.entropy_n)

    @classmethod
    def for_source(cls, source_class: SourceClass, n, entropy_rate, m=INF, t=INF,
                   d_override: int | None = None, clamp: bool = True) -> "RedundancyQuery":
        """Build a query from a source class; ``d_override`` replaces ``d`` only."""
        d = source_class.dimension if d_override is None else d_override
        return cls(n=n, m=m, t=t, d=d, log_c=log_fisher_integral(source_class),
                   entropy_n=entropy_rate * n, k=source_class.k, clamp=clamp)


def _query_maximin(q: RedundancyQuery):
    return _maximin(q.n, q.d, q.log_c, q.clamp, q.ceiling)


def side_info_redundancy(q: RedundancyQuery) -> float:
    """Redundancy with side information at both ends.

    Equals the maximin redundancy when ``min(m, t) = 0`` and otherwise the
    effective-length formula, never exceeding the maximin value.
    """
    maximin, _ = _query_maximin(q)
    if min(q.m, q.t) == 0:
        return maximin
    return min(r_hat(q.n, q.m, q.t, q.d), maximin)


def gain(q: RedundancyQuery) -> float:
    """Ratio of expected code lengths without and with side information."""
    if q.entropy_n <= 0:
        raise ValueError("gain is undefined for a zero-entropy source")
    maximin, _ = _query_maximin(q)
    return (q.entropy_n + maximin) / (q.entropy_n + side_info_redundancy(q))


def gain_limit(n, d, log_c, entropy_n, clamp: bool = True, ceiling: float = INF) -> float:
    """Gain with unlimited effective side information, ``1 + R/H``."""
    if entropy_n <= 0:
        raise ValueError("gain is undefined for a zero-entropy source")
    return 1.0 + maximin_redundancy(n, d, log_c, clamp, ceiling) / entropy_n


def memory_threshold(n, d, entropy_n, delta) -> float:
    """Side-information length that secures a ``(1 - delta)`` share of the gain limit."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if entropy_n <= 0:
        raise ValueError("entropy_n must be positive")
    return (1.0 - delta) / delta * (n / entropy_n) * (d / 2.0) * LOG2E


@dataclass(frozen=True)
class AlmostLosslessBound:
    raw: float
    floored: float


def almost_lossless_lower_bound(maximin_bits, entropy_n, eps) -> AlmostLosslessBound:
    """``(1 - eps) R - h_b(eps) - eps H^n`` for codes with error probability ``eps``."""
    raw = (1.0 - eps) * maximin_bits - binary_entropy(eps) - eps * entropy_n
    return AlmostLosslessBound(raw, max(0.0, raw))


def one_to_one_lower_bound(n, d, log_c) -> float:
    """Converse for one-to-one codes: ``((d-2)/2) log2(n/(2 pi e)) - log2(2 pi e^2) + log_c``.

    Unclamped; may be negative.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 2:
        raise ValueError("the one-to-one bound needs d >= 2")
    return 0.5 * (d - 2) * math.log2(n / TWO_PI_E) - math.log2(2.0 * math.pi * math.e**2) + log_c


def normalized_rate(entropy_n, redundancy_bits) -> float:
    """Expected code length relative to the entropy, ``(H^n + R) / H^n``."""
    return (entropy_n + redundancy_bits) / entropy_n


def strategy_gain(strategy: Strategy, q: RedundancyQuery) -> float:
    """Side-information gain attainable by strictly lossless codes under ``strategy``.

    Only when both ends hold the side information does it shorten codes.
    """
    if Strategy(strategy) is Strategy.UCOMP_ED:
        return gain(q)
    return 1.0


@dataclass(frozen=True)
class RedundancyReport:
    maximin_bits: float
    m_star: float
    r_hat_bits: float | None
    side_info_redundancy_bits: float
    gain: float | None
    gain_limit: float | None
    clamped: bool

    def to_dict(self) -> dict:
        return asdict(self)


def report(q: RedundancyQuery) -> RedundancyReport:
    maximin, clamped = _query_maximin(q)
    ms = m_star(q.m, q.t)
    rh = None if ms == 0.0 else r_hat(q.n, q.m, q.t, q.d)
    side = side_info_redundancy(q)
    if rh is not None and rh > maximin:
        clamped = True
    g = gain(q) if q.entropy_n > 0 else None
    gl = 1.0 + maximin / q.entropy_n if q.entropy_n > 0 else None
    return RedundancyReport(maximin, ms, rh, side, g, gl, clamped)
