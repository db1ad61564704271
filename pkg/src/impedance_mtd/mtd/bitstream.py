"""
Synthetic partial-bitstream wire format.

Little-endian layout::

    magic        4s   b"ROHM"
    version      u8   1
    region_id    u8
    record_count u16
    records      record_count x (bit_index u16, x u8, y u8, slice u8, ff u8, variant u8)
    perm_present u8   0 or 1
    perm_length  u16  only when perm_present
    perm         perm_length x u16
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from ..errors import BitstreamError
from .shuffle import is_permutation

MAGIC = b"ROHM"
VERSION = 1
_HEADER = struct.Struct("<4sBBH")
_RECORD = struct.Struct("<HBBBBB")


@dataclass(frozen=True)
class PartialBitstream:
    region_id: int
    records: tuple = ()
    perm: tuple | None = None
    version: int = VERSION

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(tuple(int(v) for v in r) for r in self.records))
        if self.perm is not None:
            object.__setattr__(self, "perm", tuple(int(v) for v in self.perm))

    @property
    def magic(self) -> bytes:
        return MAGIC

    @property
    def record_count(self) -> int:
        return len(self.records)

    @property
    def perm_present(self) -> bool:
        return self.perm is not None

    @property
    def perm_entropy_bits(self) -> float:
        """log2(n!) for the carried permutation; 0 without one."""
        if self.perm is None:
            return 0.0
        return math.lgamma(len(self.perm) + 1) / math.log(2)


def serialize_bs(bs: PartialBitstream) -> bytes:
    if not 0 <= bs.region_id <= 0xFF:
        raise BitstreamError("region_id", "does not fit in u8")
    if len(bs.records) > 0xFFFF:
        raise BitstreamError("record_count", "more than 65535 records")
    out = bytearray(_HEADER.pack(MAGIC, bs.version, bs.region_id, len(bs.records)))
    for rec in bs.records:
        if len(rec) != 6 or not 0 <= rec[0] <= 0xFFFF or any(not 0 <= v <= 0xFF for v in rec[1:]):
            raise BitstreamError("records", f"record {rec} does not fit the wire format")
        out += _RECORD.pack(*rec)
    if bs.perm is None:
        out.append(0)
    else:
        if not is_permutation(bs.perm) or len(bs.perm) > 0xFFFF:
            raise BitstreamError("perm", "not a permutation of 0..n-1")
        out.append(1)
        out += struct.pack(f"<H{len(bs.perm)}H", len(bs.perm), *bs.perm)
    return bytes(out)


def parse_bs(data: bytes) -> PartialBitstream:
    data = bytes(data)
    if len(data) < 4:
        raise BitstreamError("magic", "truncated")
    if data[:4] != MAGIC:
        raise BitstreamError("magic", f"expected {MAGIC!r}, got {data[:4]!r}")
    if len(data) < 5:
        raise BitstreamError("version", "truncated")
    if data[4] != VERSION:
        raise BitstreamError("version", f"unsupported version {data[4]}")
    if len(data) < 6:
        raise BitstreamError("region_id", "truncated")
    if len(data) < _HEADER.size:
        raise BitstreamError("record_count", "truncated")
    _, version, region_id, count = _HEADER.unpack_from(data, 0)
    pos = _HEADER.size
    end = pos + count * _RECORD.size
    if len(data) < end:
        raise BitstreamError("records", f"expected {count} records, data truncated")
    records = tuple(_RECORD.unpack_from(data, pos + i * _RECORD.size) for i in range(count))
    pos = end
    if len(data) < pos + 1:
        raise BitstreamError("perm_present", "truncated")
    flag = data[pos]
    pos += 1
    perm = None
    if flag == 1:
        if len(data) < pos + 2:
            raise BitstreamError("perm_length", "truncated")
        (n,) = struct.unpack_from("<H", data, pos)
        pos += 2
        if len(data) < pos + 2 * n:
            raise BitstreamError("perm", "truncated")
        perm = struct.unpack_from(f"<{n}H", data, pos)
        pos += 2 * n
        if not is_permutation(perm):
            raise BitstreamError("perm", "not a permutation of 0..n-1")
    elif flag != 0:
        raise BitstreamError("perm_present", f"flag must be 0 or 1, got {flag}")
    if pos != len(data):
        raise BitstreamError("trailing", f"{len(data) - pos} unexpected bytes after the bitstream")
    return PartialBitstream(region_id, records, perm, version)
