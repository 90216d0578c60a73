"""Memory-assisted encoder and decoder.

``Ucomp`` codes ``x`` with a plain add-1/2 predictor. ``UcompED`` starts the
predictor from ``1/2 + (m*(m, t) / m) * counts(y)``: the side information
counts at its effective length. For ``t = inf`` that is exactly the
Jeffreys-mixture posterior predictive given ``y``; for finite ``t`` it is an
approximation. ``UcompE`` and ``UcompD`` cannot shorten strictly lossless
codes, so they code exactly like ``Ucomp`` (the header still records which
strategy was requested).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..redundancy import Strategy, m_star
from ..source_models import SourceClass, SourceKind, symbol_counts, transition_counts
from .arithmetic import ArithmeticDecoder, ArithmeticEncoder, DecodeError
from .container import Header, pack, side_info_checksum, symbols_crc32, unpack
from .predictor import SequentialPredictor, side_information_counts

INF = math.inf
LN2 = math.log(2.0)


class SideInfoMismatch(DecodeError):
    """The decoder's side information does not match the encoder's."""


@dataclass(frozen=True)
class CodecRun:
    strategy: Strategy
    source_class: SourceClass
    x: np.ndarray
    y: np.ndarray | None
    t: float
    bitstream: bytes
    length_bits: int
    ideal_bits: float

    @property
    def payload(self) -> bytes:
        return unpack(self.bitstream)[1]


def side_info_weight(m, t) -> float:
    """Discount ``m*(m, t) / m`` applied to each side-information count."""
    if m == 0:
        return 0.0
    return m_star(m, t) / m


def _as_symbols(x, k: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.intp)
    if x.ndim != 1:
        raise ValueError("strings must be one-dimensional")
    if x.size and (x.min() < 0 or x.max() >= k):
        raise ValueError(f"string uses symbols outside the declared alphabet range({k})")
    return x


def _extra_counts(strategy: Strategy, source_class: SourceClass, y, t):
    if strategy is not Strategy.UCOMP_ED:
        return None
    if y is None:
        raise ValueError("UcompED needs the side-information string y")
    weight = side_info_weight(len(y), t)
    return weight * side_information_counts(source_class, y)


def mixture_code_length(x, source_class: SourceClass, extra_counts=None) -> float:
    """Ideal code length ``-log2 P(x)`` under the add-1/2 (plus extras) mixture.

    Closed form: a product over contexts of ``B(alpha + counts) / B(alpha)``.
    """
    x = _as_symbols(x, source_class.k)
    alpha = SequentialPredictor(source_class, extra_counts).initial_counts
    k = source_class.k
    if source_class.kind is SourceKind.MEMORYLESS:
        counts = symbol_counts(x, k)[None, :]
    else:
        start = np.zeros((1, k))
        if x.size:
            start[0, x[0]] = 1.0
        counts = np.vstack([transition_counts(x, k), start])

    def log_beta(a):
        return np.sum(gammaln(a), axis=1) - gammaln(np.sum(a, axis=1))

    return float(-np.sum(log_beta(alpha + counts) - log_beta(alpha)) / LN2)


def encode(x, strategy, source_class: SourceClass, y=None, t=INF,
           checksum: bool = False, integrity: bool = True) -> CodecRun:
    """Arithmetic-code ``x`` with the strategy's sequential predictor.

    ``checksum`` stores a digest of ``y`` so a decoder holding different side
    information fails fast. ``integrity`` appends a CRC-32 of ``x``; without
    it a corrupted stream can decode to a different valid string.
    ``length_bits`` counts the arithmetic payload only.
    """
    strategy = Strategy(strategy)
    x = _as_symbols(x, source_class.k)
    if y is not None:
        y = _as_symbols(y, source_class.k)
    extra = _extra_counts(strategy, source_class, y, t)
    predictor = SequentialPredictor(source_class, extra)
    enc = ArithmeticEncoder()
    prev = None
    for s in x.tolist():
        ctx = predictor.context(prev)
        enc.encode(predictor.cumulative(ctx), s)
        predictor.update(ctx, s)
        prev = s
    if x.size:
        payload = enc.finish()
        length = enc.n_bits
    else:
        payload, length = b"", 0
    digest = side_info_checksum(y) if checksum and y is not None else None
    crc = symbols_crc32(x) if integrity else None
    header = Header(source_class, int(x.size), strategy, digest, crc)
    return CodecRun(strategy, source_class, x, y, t, pack(header, payload), length,
                    mixture_code_length(x, source_class, extra))


def decode(bitstream: bytes, n: int | None = None, strategy=None, y=None, t=INF,
           source_class: SourceClass | None = None) -> np.ndarray:
    """Invert :func:`encode`.

    Optional ``n``, ``strategy`` and ``source_class`` are checked against the
    header. The decoder re-encodes what it decodes and requires the result to
    equal the payload exactly, so truncated or altered streams raise
    :class:`DecodeError` instead of returning a wrong string.
    """
    header, payload = unpack(bitstream)
    if n is not None and n != header.n:
        raise DecodeError(f"header says n={header.n}, expected {n}")
    if strategy is not None and Strategy(strategy) is not header.strategy:
        raise DecodeError(f"header says strategy {header.strategy.value}")
    if source_class is not None and source_class != header.source_class:
        raise DecodeError("header source class differs from the expected one")
    cls = header.source_class
    if y is not None:
        y = _as_symbols(y, cls.k)
    if header.checksum is not None and header.strategy is Strategy.UCOMP_ED:
        if y is None or side_info_checksum(y) != header.checksum:
            raise SideInfoMismatch("side-information checksum mismatch")
    try:
        extra = _extra_counts(header.strategy, cls, y, t)
    except ValueError as exc:
        raise DecodeError(str(exc)) from None
    if header.n == 0:
        if payload:
            raise DecodeError("trailing payload after an empty string")
        if header.crc32 is not None and header.crc32 != symbols_crc32([]):
            raise DecodeError("CRC-32 mismatch")
        return np.zeros(0, dtype=np.intp)
    predictor = SequentialPredictor(cls, extra)
    dec = ArithmeticDecoder(payload)
    check = ArithmeticEncoder()
    out = np.empty(header.n, dtype=np.intp)
    prev = None
    for i in range(header.n):
        ctx = predictor.context(prev)
        cum = predictor.cumulative(ctx)
        s = dec.decode(cum)
        check.encode(cum, s)
        predictor.update(ctx, s)
        out[i] = s
        prev = s
    if check.finish() != payload:
        raise DecodeError(
            "payload is not the encoding of the decoded string "
            "(truncated, corrupt, or different side information)")
    if header.crc32 is not None and symbols_crc32(out) != header.crc32:
        raise DecodeError("CRC-32 mismatch: corrupt stream or different side information")
    return out
