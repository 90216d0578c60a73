"""Jeffreys-mixture sequential predictor (add-1/2 counts per context).

The product of its predictive probabilities over a string equals the
Dirichlet(1/2) mixture probability of that string. Side information enters
as extra pseudo-counts added to the initial 1/2.
"""

from __future__ import annotations

import math

import numpy as np

from ..source_models import SourceClass, SourceKind, symbol_counts, transition_counts
from .arithmetic import FREQ_TOTAL


def quantize(counts: list[float]) -> list[int]:
    """Cumulative integer frequencies summing to ``FREQ_TOTAL``.

    Largest-remainder rounding of ``counts / sum(counts)``; every symbol keeps
    a frequency of at least one. Pure float/int arithmetic, so the table is
    reproducible bit for bit.
    """
    total = math.fsum(counts)
    scaled = [c * FREQ_TOTAL / total for c in counts]
    freqs = [max(1, int(s)) for s in scaled]
    diff = FREQ_TOTAL - sum(freqs)
    if diff:
        rems = [s - math.floor(s) for s in scaled]
        if diff > 0:
            order = sorted(range(len(counts)), key=lambda i: (-rems[i], i))
            for i in order[:diff]:
                freqs[i] += 1
        else:
            order = sorted(range(len(counts)), key=lambda i: (rems[i], i))
            while diff < 0:
                for i in order:
                    if freqs[i] > 1:
                        freqs[i] -= 1
                        diff += 1
                        if diff == 0:
                            break
    cum = [0]
    acc = 0
    for f in freqs:
        acc += f
        cum.append(acc)
    return cum


def side_information_counts(source_class: SourceClass, y) -> np.ndarray:
    """Per-context symbol counts of ``y``, shape ``(n_contexts, k)``.

    Markov sources get ``k`` transition contexts plus a start context that
    receives no side-information counts.
    """
    k = source_class.k
    if source_class.kind is SourceKind.MEMORYLESS:
        return symbol_counts(y, k)[None, :]
    return np.vstack([transition_counts(y, k), np.zeros((1, k))])


class SequentialPredictor:
    def __init__(self, source_class: SourceClass, extra_counts=None):
        self.source_class = source_class
        k = source_class.k
        n_ctx = 1 if source_class.kind is SourceKind.MEMORYLESS else k + 1
        base = np.full((n_ctx, k), 0.5)
        if extra_counts is not None:
            extra = np.asarray(extra_counts, dtype=np.float64)
            if extra.shape != base.shape or np.any(extra < 0):
                raise ValueError(f"extra counts must be nonnegative with shape {base.shape}")
            base = base + extra
        self.initial_counts = base
        self.counts = [list(map(float, row)) for row in base]
        self._cum: list[list[int] | None] = [None] * n_ctx

    def context(self, prev: int | None) -> int:
        if self.source_class.kind is SourceKind.MEMORYLESS:
            return 0
        return self.source_class.k if prev is None else prev

    def cumulative(self, ctx: int) -> list[int]:
        cum = self._cum[ctx]
        if cum is None:
            cum = self._cum[ctx] = quantize(self.counts[ctx])
        return cum

    def probabilities(self, ctx: int) -> list[float]:
        row = self.counts[ctx]
        total = math.fsum(row)
        return [c / total for c in row]

    def update(self, ctx: int, symbol: int) -> None:
        self.counts[ctx][symbol] += 1.0
        self._cum[ctx] = None
