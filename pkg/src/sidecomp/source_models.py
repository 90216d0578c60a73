"""Parametric finite-alphabet sources: memoryless and first-order Markov.

Strings are represented as 1-D integer numpy arrays with symbols in
``range(k)``. All information quantities are reported in bits.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

LOG2E = 1.0 / math.log(2.0)

#: Row-sum tolerance for a valid parameter vector.
ROW_SUM_TOL = 1e-12
#: Probability floor applied by :func:`mle` before renormalizing.
MLE_FLOOR = 1e-12
#: Dimension printed for the k=256 first-order Markov example; the true
#: product 256*255 is 65280. Kept so the published 8.9 MB figure reproduces.
PRINTED_MARKOV256_DIMENSION = 62580


class SourceKind(str, enum.Enum):
    MEMORYLESS = "memoryless"
    MARKOV1 = "markov1"


class NonErgodicError(ValueError):
    """Transition matrix without a unique stationary distribution."""


@dataclass(frozen=True)
class SourceClass:
    kind: SourceKind
    k: int

    def __post_init__(self):
        object.__setattr__(self, "kind", SourceKind(self.kind))
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f"alphabet size must be an integer >= 2, got {self.k}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def n_rows(self) -> int:
        return 1 if self.kind is SourceKind.MEMORYLESS else self.k

    @property
    def dimension(self) -> int:
        return dimension(self)

    @classmethod
    def memoryless(cls, k: int) -> "SourceClass":
        return cls(SourceKind.MEMORYLESS, k)

    @classmethod
    def markov1(cls, k: int) -> "SourceClass":
        return cls(SourceKind.MARKOV1, k)


def dimension(source_class: SourceClass) -> int:
    """Number of free parameters: ``k-1`` or ``k(k-1)``."""
    return source_class.n_rows * (source_class.k - 1)


class ParamVector:
    """Immutable parameter vector of a source.

    ``rows`` is always 2-D: shape ``(1, k)`` for a memoryless source and
    ``(k, k)`` (row-stochastic) for a first-order Markov source. Every entry
    must be strictly positive.
    """

    __slots__ = ("source_class", "rows")

    def __init__(self, source_class: SourceClass, rows):
        arr = np.array(rows, dtype=np.float64, copy=True)
        if arr.ndim == 1:
            arr = arr[None, :]
        k = source_class.k
        if arr.shape != (source_class.n_rows, k):
            raise ValueError(
                f"expected rows of shape {(source_class.n_rows, k)}, got {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise ValueError("parameter entries must be finite and strictly positive")
        sums = arr.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            raise ValueError(f"rows must sum to 1 within {ROW_SUM_TOL}, got {sums}")
        arr.setflags(write=False)
        object.__setattr__(self, "source_class", source_class)
        object.__setattr__(self, "rows", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ParamVector is immutable")

    def __repr__(self):
        return f"ParamVector({self.source_class.kind.value}, k={self.source_class.k}, rows={self.rows.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, ParamVector):
            return NotImplemented
        return self.source_class == other.source_class and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash((self.source_class, self.rows.tobytes()))

    @property
    def k(self) -> int:
        return self.source_class.k

    @property
    def probs(self) -> np.ndarray:
        """The single row of a memoryless source."""
        if self.source_class.kind is not SourceKind.MEMORYLESS:
            raise AttributeError("probs is only defined for memoryless sources")
        return self.rows[0]

    def free_coordinates(self) -> np.ndarray:
        """The ``d`` free parameters: every row without its last entry."""
        return self.rows[:, :-1].ravel()

    def to_dict(self) -> dict:
        return {"kind": self.source_class.kind.value, "k": self.k,
                "rows": self.rows.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "ParamVector":
        return cls(SourceClass(obj["kind"], obj["k"]), obj["rows"])

    @classmethod
    def from_json(cls, text: str) -> "ParamVector":
        return cls.from_dict(json.loads(text))


def _renormalize_positive(arr: np.ndarray, floor: float) -> np.ndarray:
    arr = np.maximum(arr, floor)
    return arr / arr.sum(axis=-1, keepdims=True)


def _entropy_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=np.float64)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def stationary_distribution(matrix) -> np.ndarray:
    """Unique stationary distribution of a row-stochastic matrix.

    Raises :class:`NonErgodicError` when the eigenvalue 1 is not simple.
    """
    P = np.asarray(matrix, dtype=np.float64)
    k = P.shape[0]
    eigvals = np.linalg.eigvals(P)
    if np.count_nonzero(np.abs(eigvals - 1.0) < 1e-9) != 1:
        raise NonErgodicError("transition matrix has no unique stationary distribution")
    A = np.vstack([P.T - np.eye(k), np.ones((1, k))])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


@dataclass(frozen=True)
class EntropyReport:
    entropy_rate: float
    entropy_n: float


def entropy(theta: ParamVector, n: int) -> EntropyReport:
    """Entropy rate and block entropy ``H^n`` of a length-``n`` string.

    Markov sources start from their stationary distribution, giving
    ``H^n = H(pi) + (n - 1) * rate``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if theta.source_class.kind is SourceKind.MEMORYLESS:
        rate = _entropy_bits(theta.probs)
        return EntropyReport(rate, n * rate)
    pi = stationary_distribution(theta.rows)
    rate = float(sum(pi[i] * _entropy_bits(theta.rows[i]) for i in range(theta.k)))
    return EntropyReport(rate, _entropy_bits(pi) + (n - 1) * rate)


def log2_probability(theta: ParamVector, x) -> float:
    """``log2 mu_theta(x)``; Markov strings start from the stationary law."""
    x = np.asarray(x, dtype=np.intp)
    if x.size == 0:
        return 0.0
    logp = np.log2(theta.rows)
    if theta.source_class.kind is SourceKind.MEMORYLESS:
        return float(np.sum(logp[0, x]))
    pi = stationary_distribution(theta.rows)
    return float(math.log2(pi[x[0]]) + np.sum(logp[x[:-1], x[1:]]))


def sample_string(theta: ParamVector, n: int, rng: np.random.Generator,
                  initial: str = "stationary") -> np.ndarray:
    """Draw ``x ~ mu_theta^n``.

    A Markov chain starts from its stationary law, or from a uniformly drawn
    state when ``initial="uniform"``. Memoryless sources ignore ``initial``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if initial not in ("stationary", "uniform"):
        raise ValueError(f"unknown initial law {initial!r}")
    if n == 0:
        return np.zeros(0, dtype=np.intp)
    k = theta.k
    u = rng.random(n)
    cum = np.cumsum(theta.rows, axis=1)
    if theta.source_class.kind is SourceKind.MEMORYLESS:
        return np.minimum(np.searchsorted(cum[0], u, side="right"), k - 1).astype(np.intp)
    out = np.empty(n, dtype=np.intp)
    if initial == "uniform":
        s = min(int(u[0] * k), k - 1)
    else:
        pi_cum = np.cumsum(stationary_distribution(theta.rows))
        s = min(int(np.searchsorted(pi_cum, u[0], side="right")), k - 1)
    out[0] = s
    rows = [row for row in cum]
    for i in range(1, n):
        s = min(int(np.searchsorted(rows[s], u[i], side="right")), k - 1)
        out[i] = s
    return out


def symbols_from_text(text: str, alphabet: str) -> np.ndarray:
    """Map characters of ``text`` to their index in ``alphabet``."""
    index = {ch: i for i, ch in enumerate(alphabet)}
    try:
        return np.array([index[ch] for ch in text], dtype=np.intp)
    except KeyError as exc:
        raise ValueError(f"character {exc.args[0]!r} not in alphabet") from None


def _check_symbols(x: np.ndarray, k: int) -> None:
    if x.size and (x.min() < 0 or x.max() >= k):
        raise ValueError(f"symbols must lie in range({k})")


def symbol_counts(x, k: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.intp)
    _check_symbols(x, k)
    return np.bincount(x, minlength=k).astype(np.float64)


def transition_counts(x, k: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.intp)
    _check_symbols(x, k)
    if x.size < 2:
        return np.zeros((k, k))
    return np.bincount(x[:-1] * k + x[1:], minlength=k * k).reshape(k, k).astype(np.float64)


def mle(x, source_class: SourceClass) -> ParamVector:
    """Maximum-likelihood parameters from empirical (transition) counts.

    Unvisited Markov rows become uniform; zero entries are floored at
    ``MLE_FLOOR`` and the row renormalized so the result stays ergodic.
    """
    x = np.asarray(x, dtype=np.intp)
    k = source_class.k
    if x.size == 0:
        raise ValueError("cannot estimate parameters from an empty string")
    if source_class.kind is SourceKind.MEMORYLESS:
        row = symbol_counts(x, k) / x.size
        return ParamVector(source_class, _renormalize_positive(row[None, :], MLE_FLOOR))
    if x.size < 2:
        raise ValueError("a Markov estimate needs at least two symbols")
    counts = transition_counts(x, k)
    totals = counts.sum(axis=1, keepdims=True)
    rows = np.where(totals > 0, counts / np.where(totals > 0, totals, 1.0), 1.0 / k)
    return ParamVector(source_class, _renormalize_positive(rows, MLE_FLOOR))


def jeffreys_sample(source_class: SourceClass, rng: np.random.Generator) -> ParamVector:
    """Draw from the Jeffreys prior: Dirichlet(1/2) per row."""
    k = source_class.k
    rows = rng.dirichlet(np.full(k, 0.5), size=source_class.n_rows)
    # Dirichlet(1/2) can underflow to exact zeros for large k.
    rows = _renormalize_positive(rows, np.finfo(np.float64).tiny)
    return ParamVector(source_class, rows)


def jeffreys_log_density(theta: ParamVector) -> float:
    """Natural-log Jeffreys density w.r.t. Lebesgue measure on free coordinates."""
    k = theta.k
    log_norm = gammaln(k / 2.0) - k * gammaln(0.5)
    return float(theta.source_class.n_rows * log_norm - 0.5 * np.sum(np.log(theta.rows)))


def jeffreys_density(theta: ParamVector) -> float:
    return math.exp(jeffreys_log_density(theta))


def log_fisher_integral(source_class: SourceClass) -> float:
    """``log2 int |I(phi)|^(1/2) dphi`` in bits.

    Memoryless: ``log2(Gamma(1/2)^k / Gamma(k/2))``. Markov: ``k`` times the
    per-row constant, i.e. the stationary weighting of the exact Markov
    Fisher determinant is ignored.
    """
    k = source_class.k
    per_row = (k * gammaln(0.5) - gammaln(k / 2.0)) * LOG2E
    return float(source_class.n_rows * per_row)


def inverse_fisher_trace(theta: ParamVector) -> float:
    """Trace of the inverse Fisher information in the free coordinates.

    For one categorical row, ``I^-1 = diag(theta) - theta theta^T`` restricted
    to the first ``k-1`` coordinates. Markov rows are scaled by ``1/pi_i``.
    """
    free = theta.rows[:, :-1]
    per_row = np.sum(free * (1.0 - free), axis=1)
    if theta.source_class.kind is SourceKind.MEMORYLESS:
        return float(per_row[0])
    pi = stationary_distribution(theta.rows)
    return float(np.sum(per_row / pi))
