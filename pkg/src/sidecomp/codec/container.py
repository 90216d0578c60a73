"""Bitstream container.

Layout (big-endian)::

    magic      4 bytes  b"SIC1"
    k          u16      alphabet size
    n          u64      number of encoded symbols
    strategy   u8       bits 0-1 strategy code, bit 4 set for a Markov-1
                        model, bit 6 set when a CRC-32 trailer is present,
                        bit 7 set when a side-info checksum follows
    checksum   8 bytes  optional, first 8 bytes of SHA-256 over y
    payload    arithmetic-coded bits, zero-padded to a byte
    crc32      u32      optional, CRC-32 of the decoded symbols

A near-optimal arithmetic code leaves almost no redundancy, so most altered
payloads still decode to some string. The CRC-32 trailer is what turns
corruption into an error.
"""

from __future__ import annotations

import hashlib
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from ..redundancy import Strategy
from ..source_models import SourceClass, SourceKind
from .arithmetic import DecodeError

MAGIC = b"SIC1"
_HEADER = struct.Struct(">4sHQB")
_STRATEGY_CODES = {
    Strategy.UCOMP: 0,
    Strategy.UCOMP_E: 1,
    Strategy.UCOMP_D: 2,
    Strategy.UCOMP_ED: 3,
}
_CODE_STRATEGIES = {v: s for s, v in _STRATEGY_CODES.items()}
_MARKOV_FLAG = 0x10
_CRC_FLAG = 0x40
_CHECKSUM_FLAG = 0x80
_CRC = struct.Struct(">I")


def side_info_checksum(y) -> bytes:
    y = np.asarray(y, dtype=np.intp)
    h = hashlib.sha256()
    h.update(struct.pack(">Q", y.size))
    h.update(y.astype(">u2").tobytes())
    return h.digest()[:8]


def symbols_crc32(x) -> int:
    return zlib.crc32(np.asarray(x, dtype=np.intp).astype(">u2").tobytes())


@dataclass(frozen=True)
class Header:
    source_class: SourceClass
    n: int
    strategy: Strategy
    checksum: bytes | None
    crc32: int | None = None

    @property
    def size(self) -> int:
        return _HEADER.size + (8 if self.checksum is not None else 0)


def pack(header: Header, payload: bytes) -> bytes:
    flags = _STRATEGY_CODES[header.strategy]
    if header.source_class.kind is SourceKind.MARKOV1:
        flags |= _MARKOV_FLAG
    if header.checksum is not None:
        flags |= _CHECKSUM_FLAG
    if header.crc32 is not None:
        flags |= _CRC_FLAG
    out = _HEADER.pack(MAGIC, header.source_class.k, header.n, flags)
    if header.checksum is not None:
        out += header.checksum
    out += payload
    if header.crc32 is not None:
        out += _CRC.pack(header.crc32)
    return out


def unpack(data: bytes) -> tuple[Header, bytes]:
    if len(data) < _HEADER.size:
        raise DecodeError("bitstream shorter than its header")
    magic, k, n, flags = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DecodeError("bad magic bytes")
    if flags & ~(0x03 | _MARKOV_FLAG | _CRC_FLAG | _CHECKSUM_FLAG):
        raise DecodeError("unknown flag bits in strategy byte")
    try:
        source_class = SourceClass(
            SourceKind.MARKOV1 if flags & _MARKOV_FLAG else SourceKind.MEMORYLESS, k)
    except ValueError as exc:
        raise DecodeError(str(exc)) from None
    offset = _HEADER.size
    checksum = None
    if flags & _CHECKSUM_FLAG:
        if len(data) < offset + 8:
            raise DecodeError("bitstream truncated inside the checksum")
        checksum = bytes(data[offset:offset + 8])
        offset += 8
    end = len(data)
    crc = None
    if flags & _CRC_FLAG:
        if end < offset + _CRC.size:
            raise DecodeError("bitstream truncated inside the CRC trailer")
        end -= _CRC.size
        (crc,) = _CRC.unpack_from(data, end)
    header = Header(source_class, n, _CODE_STRATEGIES[flags & 0x03], checksum, crc)
    return header, bytes(data[offset:end])
