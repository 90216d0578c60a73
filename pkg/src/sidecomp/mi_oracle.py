"""Exact mutual-information oracle for binary memoryless sources.

With a Beta(1/2, 1/2) prior every quantity reduces to sums over symbol
counts: ``a`` ones in ``x^n``, ``b`` in ``y^m`` and ``c`` in the latent
``z^t``. Sequence probabilities are Beta-function ratios, so the sums are
exact up to floating point. Sums over ``c`` are evaluated as scaled matrix
products; entries that underflow carry negligible probability, and the
sum-to-one defect of every conditional law is folded into the reported error
estimate.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import betaln, digamma, gammaln

from .quadrature import arcsine_rule

INF = math.inf
LN2 = math.log(2.0)
MAX_N_UNCONDITIONAL = 4096
MAX_CONDITIONAL = 2048
_QUAD_ORDER = 512


@dataclass(frozen=True)
class MIResult:
    value_bits: float
    quadrature_error_estimate: float
    k: int
    n: int
    m: int
    t: float

    def to_dict(self) -> dict:
        return asdict(self)


def _log_binom(n: int, a: np.ndarray) -> np.ndarray:
    return gammaln(n + 1.0) - gammaln(a + 1.0) - gammaln(n - a + 1.0)


def _log_seq(a, n, alpha=0.5, beta=0.5):
    """Natural-log probability of one length-``n`` string with ``a`` ones."""
    return betaln(a + alpha, n - a + beta) - betaln(alpha, beta)


def expected_binary_entropy(alpha, beta):
    """``E[h_b(theta)]`` in bits for ``theta ~ Beta(alpha, beta)`` (closed form)."""
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    s = alpha + beta
    psi_s = digamma(s + 1.0)
    nats = -(alpha / s) * (digamma(alpha + 1.0) - psi_s) - (beta / s) * (digamma(beta + 1.0) - psi_s)
    return nats / LN2


def _jeffreys_binary_entropy_quadrature(order: int = _QUAD_ORDER) -> float:
    p, w = arcsine_rule(order)
    hb = -(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p))
    return float(np.dot(w, hb))


def _marginal_entropy(n: int) -> float:
    """``H(X^n)`` in bits under the Jeffreys mixture."""
    if n == 0:
        return 0.0
    a = np.arange(n + 1, dtype=np.float64)
    lp = _log_seq(a, n)
    return float(-np.sum(np.exp(_log_binom(n, a) + lp) * lp) / LN2)


def _check(n, m, t):
    for name, v in (("n", n), ("m", m)):
        if v < 0 or v > MAX_CONDITIONAL or int(v) != v:
            raise ValueError(f"{name} must be an integer in [0, {MAX_CONDITIONAL}]")
    if t != INF and (t < 0 or t > MAX_CONDITIONAL or int(t) != t):
        raise ValueError(f"t must be inf or an integer in [0, {MAX_CONDITIONAL}]")


def mi_unconditional(n: int) -> MIResult:
    """``I(X^n; theta)`` for a binary source under the Jeffreys prior."""
    if n < 0 or n > MAX_N_UNCONDITIONAL or int(n) != n:
        raise ValueError(f"n must be an integer in [0, {MAX_N_UNCONDITIONAL}]")
    n = int(n)
    ehb = float(expected_binary_entropy(0.5, 0.5))
    value = _marginal_entropy(n) - n * ehb
    err = n * abs(ehb - _jeffreys_binary_entropy_quadrature())
    return MIResult(max(value, 0.0), err, 2, n, 0, 0)


def _scaled_logmatmul(log_left: np.ndarray, log_right: np.ndarray) -> np.ndarray:
    """``log(exp(L) @ exp(R))`` with per-row / per-column rescaling."""
    lmax = log_left.max(axis=1, keepdims=True)
    rmax = log_right.max(axis=0, keepdims=True)
    prod = np.exp(log_left - lmax) @ np.exp(log_right - rmax)
    with np.errstate(divide="ignore"):
        return np.log(prod) + lmax + rmax


def _entropy_terms(log_p: np.ndarray, log_mult: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row ``-sum mult * p * log2 p`` and ``sum mult * p``."""
    mass = np.exp(log_mult + log_p)
    finite = np.isfinite(log_p)
    ent = -np.sum(np.where(finite, mass * np.where(finite, log_p, 0.0), 0.0), axis=-1) / LN2
    return ent, mass.sum(axis=-1)


def _posterior_over_latent(m: int, t: int) -> np.ndarray:
    """Normalized ``p(c | b)``, shape ``(m+1, t+1)``."""
    b = np.arange(m + 1, dtype=np.float64)[:, None]
    c = np.arange(t + 1, dtype=np.float64)[None, :]
    # p(c) p(y_b | c) is proportional to C(t, c) B(b + c + 1/2, m - b + t - c + 1/2)
    logw = _log_binom(t, c) + betaln(b + c + 0.5, m - b + t - c + 0.5)
    logw -= logw.max(axis=1, keepdims=True)
    w = np.exp(logw)
    return w / w.sum(axis=1, keepdims=True)


def mi_conditional(n: int, m: int, t=INF) -> MIResult:
    """``I(X^n; theta1 | Y^m)`` under the correlation model, exactly.

    Computed as ``sum_b P(b) [H(X | y_b) - n E[h_b(theta1) | y_b]]`` with the
    posterior of ``theta1`` given ``y`` a Beta mixture over latent counts.
    The joint law of ``(theta1, theta2)`` is symmetric, so the latent string
    is attached to the ``y`` side here without changing any value.
    """
    _check(n, m, t)
    n, m = int(n), int(m)
    if n == 0:
        return MIResult(0.0, 0.0, 2, 0, m, t)
    a = np.arange(n + 1, dtype=np.float64)[None, :]
    b = np.arange(m + 1, dtype=np.float64)
    log_mult_x = _log_binom(n, a)
    log_py = _log_binom(m, b) + _log_seq(b, m)
    py = np.exp(log_py)
    if t == INF:
        bb = b[:, None]
        log_px_given_y = betaln(a + bb + 0.5, n - a + m - bb + 0.5) - betaln(bb + 0.5, m - bb + 0.5)
        cond_hb = expected_binary_entropy(b + 0.5, m - b + 0.5)
    else:
        t = int(t)
        q = _posterior_over_latent(m, t)
        c = np.arange(t + 1, dtype=np.float64)[:, None]
        log_px_given_c = betaln(a + c + 0.5, n - a + t - c + 0.5) - betaln(c + 0.5, t - c + 0.5)
        with np.errstate(divide="ignore"):
            log_px_given_y = _scaled_logmatmul(np.log(q), log_px_given_c)
        cond_hb = q @ expected_binary_entropy(c[:, 0] + 0.5, t - c[:, 0] + 0.5)
    h_x_given_y, mass = _entropy_terms(log_px_given_y, log_mult_x)
    value = float(np.dot(py, h_x_given_y - n * cond_hb))
    err = float(np.dot(py, np.abs(mass - 1.0))) * n + abs(py.sum() - 1.0) * n
    return MIResult(max(value, 0.0), float(err), 2, n, m, t)


def mi_side_information(n: int, m: int, t=INF) -> MIResult:
    """``I(X^n; Y^m) = H(X) + H(Y) - H(X, Y)`` from the joint count law."""
    _check(n, m, t)
    n, m = int(n), int(m)
    if n == 0 or m == 0 or t == 0:
        return MIResult(0.0, 0.0, 2, n, m, t)
    a = np.arange(n + 1, dtype=np.float64)[:, None]
    b = np.arange(m + 1, dtype=np.float64)[None, :]
    log_mult = _log_binom(n, a) + _log_binom(m, b)
    if t == INF:
        log_pxy = _log_seq(a + b, n + m)
    else:
        t = int(t)
        c = np.arange(t + 1, dtype=np.float64)
        log_pc = _log_binom(t, c) + _log_seq(c, t)
        cc = c[None, :]
        log_x_given_c = betaln(a + cc + 0.5, n - a + t - cc + 0.5) - betaln(cc + 0.5, t - cc + 0.5)
        log_y_given_c = (betaln(b.T + cc + 0.5, m - b.T + t - cc + 0.5)
                         - betaln(cc + 0.5, t - cc + 0.5))
        log_pxy = _scaled_logmatmul(log_x_given_c + log_pc[None, :], log_y_given_c.T)
    h_xy, mass = _entropy_terms(log_pxy.ravel(), log_mult.ravel())
    value = _marginal_entropy(n) + _marginal_entropy(m) - float(h_xy)
    err = abs(float(mass) - 1.0) * (n + m)
    return MIResult(max(value, 0.0), float(err), 2, n, m, t)


@dataclass(frozen=True)
class IdentityReport:
    n: int
    m: int
    t: float
    i_x_theta: float
    i_x_theta_given_y: float
    i_x_y: float
    residual: float
    tolerance: float

    @property
    def holds(self) -> bool:
        return abs(self.residual) <= self.tolerance

    def to_dict(self) -> dict:
        out = asdict(self)
        out["holds"] = self.holds
        return out


def mi_gap_identity_check(n: int, m: int, t=INF, tolerance: float = 1e-4) -> IdentityReport:
    """Check ``I(X; theta) - I(X; theta | Y) = I(X; Y)`` from three separate computations."""
    unc = mi_unconditional(n).value_bits
    cond = mi_conditional(n, m, t).value_bits
    side = mi_side_information(n, m, t).value_bits
    return IdentityReport(int(n), int(m), t, unc, cond, side, unc - cond - side, tolerance)
