from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from impedance_mtd.errors import ParameterError
from impedance_mtd.fabric import ConstraintLimits, build_state, new_fabric
from impedance_mtd.mtd.shuffle import invert
from impedance_mtd.target import (HAMMING_WEIGHT, SBOX, KeyByteScenario, LoadTransform, byte_bits,
                                  first_round_intermediate, load_target, read_back, refresh_shares,
                                  sbox)


def _gf_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a = ((a << 1) ^ 0x11B) if a & 0x80 else a << 1
        b >>= 1
    return out


def _gf_inv(a: int) -> int:
    # a^254 is the multiplicative inverse in GF(2^8); 0 maps to 0
    out, base, e = 1, a, 254
    while e:
        if e & 1:
            out = _gf_mul(out, base)
        base = _gf_mul(base, base)
        e >>= 1
    return out if a else 0


def _oracle_sbox(x: int) -> int:
    b = _gf_inv(x)
    rot = lambda v, n: ((v << n) | (v >> (8 - n))) & 0xFF
    return b ^ rot(b, 1) ^ rot(b, 2) ^ rot(b, 3) ^ rot(b, 4) ^ 0x63


def test_sbox_matches_field_construction():
    assert [sbox(x) for x in range(256)] == [_oracle_sbox(x) for x in range(256)]


def test_sbox_examples():
    assert sbox(0x00) == 0x63
    assert sbox(0x01) == 0x7C
    assert sbox(0x53) == 0xED
    assert sorted(SBOX.tolist()) == list(range(256))


def test_intermediate_examples():
    assert first_round_intermediate(0x00, 0x00) == 0x63
    assert first_round_intermediate(0x32, 0x2B) == sbox(0x19)
    assert KeyByteScenario(0x2B, 0x32).intermediate == 0xD4


@given(st.integers(0, 255))
def test_equal_plaintext_and_key_give_0x63(b):
    assert first_round_intermediate(b, b) == 0x63


def test_intermediate_vectorized():
    p = np.arange(256)
    assert np.array_equal(first_round_intermediate(p, 7), [sbox(x ^ 7) for x in range(256)])


def test_hamming_weight_and_bits():
    assert HAMMING_WEIGHT[0xFF] == 8 and HAMMING_WEIGHT[0x81] == 2
    assert byte_bits(0b1010_0001).tolist() == [1, 0, 0, 0, 0, 1, 0, 1]
    assert np.array_equal(byte_bits(np.arange(256)).sum(axis=1), HAMMING_WEIGHT)


def test_two_shares_of_zero_key_are_equal():
    m = refresh_shares(np.zeros(8, np.uint8), 2, np.random.default_rng(0))
    assert np.array_equal(m.shares[0], m.shares[1])


def test_shares_recombine_over_1000_refreshes():
    rng = np.random.default_rng(1)
    key = np.array([1, 0, 1, 1, 0, 0, 1, 0], np.uint8)
    for _ in range(1000):
        assert np.array_equal(refresh_shares(key, 3, rng).combine(), key)


def test_each_share_marginal_is_fair():
    rng = np.random.default_rng(2)
    key = np.ones(8, np.uint8)
    shares = np.stack([refresh_shares(key, 3, rng).shares for _ in range(10_000)])
    means = shares.mean(axis=0)
    assert np.all(np.abs(means - 0.5) < 0.02)


def test_one_share_rejected():
    with pytest.raises(ParameterError):
        refresh_shares([1, 0], 1, np.random.default_rng(0))


@pytest.fixture
def state():
    return build_state(new_fabric(4, 4), [(0, ConstraintLimits(0, 0, 0, 3), 8)])


def test_identity_load(state):
    bits = [1, 0, 1, 1, 0, 0, 0, 1]
    loaded = load_target(state, bits)
    assert list(loaded.bits) == bits
    assert read_back(loaded).tolist() == bits


@given(st.permutations(range(8)), st.lists(st.integers(0, 1), min_size=8, max_size=8))
def test_permuted_load_reads_back(perm, bits):
    state = build_state(new_fabric(4, 4), [(0, ConstraintLimits(0, 0, 0, 3), 8)])
    t = LoadTransform(tuple(perm))
    loaded = load_target(state, bits, t)
    assert read_back(loaded, t).tolist() == bits
    assert [loaded.bits[j] for j in invert(perm)] == bits


def test_all_zero_is_invariant_under_permutation(state):
    loaded = load_target(state, [0] * 8, LoadTransform((7, 6, 5, 4, 3, 2, 1, 0)))
    assert sum(loaded.bits) == 0


def test_wrong_width_rejected(state):
    with pytest.raises(ParameterError):
        load_target(state, [1, 0, 1])


def test_slice_mux_clears_other_instances():
    st_ = build_state(new_fabric(4, 4), [(0, ConstraintLimits(0, 0, 0, 3), 8)], n_instances=3)
    st_ = load_target(st_, [1] * 8, LoadTransform(None, 0))
    st_ = load_target(st_, [1] * 8, LoadTransform(None, 2))
    assert list(st_.bits) == [0] * 16 + [1] * 8
    with pytest.raises(ParameterError):
        load_target(st_, [1] * 8, LoadTransform(None, 3))
