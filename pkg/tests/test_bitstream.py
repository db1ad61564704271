from __future__ import annotations

import pytest
from hypothesis import given

from bitstream_cases import GOLDEN, GOLDEN_DIR, MALFORMED, bitstreams
from impedance_mtd.errors import BitstreamError
from impedance_mtd.mtd.bitstream import PartialBitstream, parse_bs, serialize_bs


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_serialize(name):
    assert serialize_bs(GOLDEN[name]) == (GOLDEN_DIR / name).read_bytes()


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_parse(name):
    assert parse_bs((GOLDEN_DIR / name).read_bytes()) == GOLDEN[name]


def test_empty_is_nine_bytes():
    data = serialize_bs(PartialBitstream(0, ()))
    assert data == b"ROHM\x01\x00\x00\x00\x00"
    bs = parse_bs(data)
    assert bs.magic == b"ROHM" and bs.record_count == 0 and not bs.perm_present


@given(bitstreams())
def test_round_trip(bs):
    assert parse_bs(serialize_bs(bs)) == bs


@pytest.mark.parametrize("data,field", MALFORMED)
def test_malformed_rejected_with_field(data, field):
    with pytest.raises(BitstreamError) as exc:
        parse_bs(data)
    assert exc.value.field == field


def test_unserializable_values():
    with pytest.raises(BitstreamError):
        serialize_bs(PartialBitstream(256, ()))
    with pytest.raises(BitstreamError):
        serialize_bs(PartialBitstream(0, ((0, 256, 0, 0, 0, 0),)))
    with pytest.raises(BitstreamError):
        serialize_bs(PartialBitstream(0, (), (0, 0)))


def test_perm_entropy():
    assert PartialBitstream(0, ()).perm_entropy_bits == 0
    assert PartialBitstream(0, (), (1, 0)).perm_entropy_bits == pytest.approx(1.0)
