"""Shared bitstream fixtures: golden files and malformed inputs with the field they break."""
from __future__ import annotations

import struct
from pathlib import Path

from hypothesis import strategies as st

from impedance_mtd.mtd.bitstream import PartialBitstream

GOLDEN_DIR = Path(__file__).parent / "golden"

GOLDEN = {
    "empty.bin": PartialBitstream(0, ()),
    "records.bin": PartialBitstream(3, ((5, 1, 2, 3, 4, 1), (300, 15, 15, 0, 7, 3))),
    "perm.bin": PartialBitstream(1, ((0, 0, 0, 0, 0, 2),), (2, 0, 3, 1)),
}

_HDR = b"ROHM\x01\x02\x01\x00"
_REC = struct.pack("<HBBBBB", 1, 2, 3, 4, 5, 0)

MALFORMED = [
    (b"", "magic"),
    (b"RO", "magic"),
    (b"XXXX\x01\x00\x00\x00\x00", "magic"),
    (b"ROHM", "version"),
    (b"ROHM\x02\x00\x00\x00\x00", "version"),
    (b"ROHM\x01", "region_id"),
    (b"ROHM\x01\x00\x01", "record_count"),
    (_HDR, "records"),
    (_HDR + _REC[:4], "records"),
    (_HDR + _REC, "perm_present"),
    (_HDR + _REC + b"\x02", "perm_present"),
    (_HDR + _REC + b"\x01\x03", "perm_length"),
    (_HDR + _REC + b"\x01\x02\x00\x00\x00", "perm"),
    (_HDR + _REC + b"\x01\x02\x00\x00\x00\x00\x00", "perm"),
    (_HDR + _REC + b"\x01\x02\x00\x00\x00\x02\x00", "perm"),
    (_HDR + _REC + b"\x00\xff", "trailing"),
]


@st.composite
def bitstreams(draw):
    records = draw(st.lists(st.tuples(st.integers(0, 0xFFFF), *[st.integers(0, 0xFF)] * 5), max_size=20))
    perm = draw(st.none() | st.integers(0, 40).flatmap(lambda n: st.permutations(range(n))))
    return PartialBitstream(draw(st.integers(0, 255)), tuple(records),
                            None if perm is None else tuple(perm))
