"""Binary arithmetic coder with a 64-bit range and 32-bit frequencies.

Integer-only, so the emitted bits are identical on every platform. Underflow
(straddling the midpoint) is handled by counting pending bits that are
released, inverted, after the next decided bit.

Frequency tables are cumulative lists ``cum`` of length ``k + 1`` with
``cum[0] == 0`` and ``cum[k] == FREQ_TOTAL``; symbol ``s`` owns
``[cum[s], cum[s+1])``.
"""

from __future__ import annotations

STATE_BITS = 64
FREQ_BITS = 32
FREQ_TOTAL = 1 << FREQ_BITS
_FULL = 1 << STATE_BITS
_MASK = _FULL - 1
_HALF = _FULL >> 1
_QUARTER = _FULL >> 2
_THREE_QUARTERS = _HALF + _QUARTER


class DecodeError(ValueError):
    """The bitstream is truncated, corrupt, or decoded with the wrong model."""


class BitWriter:
    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0
        self.n_bits = 0

    def write(self, bit: int) -> None:
        self._acc = (self._acc << 1) | bit
        self._nacc += 1
        self.n_bits += 1
        if self._nacc == 8:
            self._buf.append(self._acc)
            self._acc = 0
            self._nacc = 0

    def write_run(self, bit: int, count: int) -> None:
        for _ in range(count):
            self.write(bit)

    def getvalue(self) -> bytes:
        """Bytes written so far, the last one zero-padded."""
        if self._nacc:
            return bytes(self._buf) + bytes([self._acc << (8 - self._nacc)])
        return bytes(self._buf)


class BitReader:
    """Reads bits MSB-first; past the end it yields zeros and counts them."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0
        self.overrun = 0

    def read(self) -> int:
        byte_index = self._pos >> 3
        if byte_index >= len(self._data):
            self.overrun += 1
            self._pos += 1
            return 0
        bit = (self._data[byte_index] >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit


class ArithmeticEncoder:
    def __init__(self):
        self.low = 0
        self.high = _MASK
        self.pending = 0
        self.out = BitWriter()

    def _emit(self, bit: int) -> None:
        self.out.write(bit)
        if self.pending:
            self.out.write_run(bit ^ 1, self.pending)
            self.pending = 0

    def encode(self, cum: list[int], symbol: int) -> None:
        low, high = self.low, self.high
        span = high - low + 1
        lo = cum[symbol]
        hi = cum[symbol + 1]
        if hi <= lo:
            raise ValueError("symbol has zero frequency")
        high = low + ((span * hi) >> FREQ_BITS) - 1
        low = low + ((span * lo) >> FREQ_BITS)
        while True:
            if high < _HALF:
                self._emit(0)
            elif low >= _HALF:
                self._emit(1)
                low -= _HALF
                high -= _HALF
            elif low >= _QUARTER and high < _THREE_QUARTERS:
                self.pending += 1
                low -= _QUARTER
                high -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
        self.low, self.high = low, high

    def finish(self) -> bytes:
        """Emit two (plus pending) bits selecting a point inside the final range."""
        self.pending += 1
        self._emit(0 if self.low < _QUARTER else 1)
        return self.out.getvalue()

    @property
    def n_bits(self) -> int:
        return self.out.n_bits


class ArithmeticDecoder:
    def __init__(self, data: bytes):
        self.reader = BitReader(data)
        self.low = 0
        self.high = _MASK
        code = 0
        for _ in range(STATE_BITS):
            code = (code << 1) | self.reader.read()
        self.code = code

    def decode(self, cum: list[int]) -> int:
        low, high, code = self.low, self.high, self.code
        span = high - low + 1
        offset = code - low
        # largest s with floor(span * cum[s] / TOTAL) <= offset
        lo_s, hi_s = 0, len(cum) - 1
        while hi_s - lo_s > 1:
            mid = (lo_s + hi_s) >> 1
            if (span * cum[mid]) >> FREQ_BITS <= offset:
                lo_s = mid
            else:
                hi_s = mid
        symbol = lo_s
        high = low + ((span * cum[symbol + 1]) >> FREQ_BITS) - 1
        low = low + ((span * cum[symbol]) >> FREQ_BITS)
        if not low <= code <= high:
            raise DecodeError("code value left the coding interval")
        read = self.reader.read
        while True:
            if high < _HALF:
                pass
            elif low >= _HALF:
                low -= _HALF
                high -= _HALF
                code -= _HALF
            elif low >= _QUARTER and high < _THREE_QUARTERS:
                low -= _QUARTER
                high -= _QUARTER
                code -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            code = (code << 1) | read()
        self.low, self.high, self.code = low, high, code
        return symbol
