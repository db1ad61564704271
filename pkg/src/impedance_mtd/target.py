"""
Protected workload: the AES first-round S-box intermediate, d-share masked
key registers, and how logical register bits are written into the fabric.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .fabric import FabricState

SBOX = np.array([
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
], dtype=np.uint8)

HAMMING_WEIGHT = np.array([bin(v).count("1") for v in range(256)], dtype=np.uint8)


def sbox(b: int) -> int:
    return int(SBOX[b])


def first_round_intermediate(p, k):
    """``sbox(p ^ k)``; works element-wise on arrays of bytes."""
    out = SBOX[np.bitwise_xor(p, k)]
    return int(out) if np.ndim(out) == 0 else out


def byte_bits(values, n_bits: int = 8) -> np.ndarray:
    """Little-endian bit decomposition: column ``i`` is bit ``i`` of each value."""
    v = np.asarray(values, dtype=np.int64)
    return ((v[..., None] >> np.arange(n_bits)) & 1).astype(np.uint8)


@dataclass(frozen=True)
class KeyByteScenario:
    key_byte: int
    plaintext_byte: int

    @property
    def intermediate(self) -> int:
        return first_round_intermediate(self.plaintext_byte, self.key_byte)


@dataclass(frozen=True)
class MaskedKeyShares:
    shares: np.ndarray  # (n_shares, n_key_bits) of 0/1

    @property
    def n_shares(self) -> int:
        return self.shares.shape[0]

    def combine(self) -> np.ndarray:
        return np.bitwise_xor.reduce(self.shares, axis=0)


def refresh_shares(key: Sequence[int], n_shares: int, rng_stream: np.random.Generator) -> MaskedKeyShares:
    """Split ``key`` (a bit vector) into ``n_shares`` XOR shares.

    The first ``n_shares - 1`` shares are uniform; the last one is forced so
    that all shares XOR back to the key.
    """
    if n_shares < 2:
        raise ParameterError("masking needs at least two shares")
    key = np.asarray(key, dtype=np.uint8)
    if key.ndim != 1 or np.any(key > 1):
        raise ParameterError("key must be a 1-D bit vector")
    shares = np.empty((n_shares, key.size), dtype=np.uint8)
    shares[:-1] = rng_stream.integers(0, 2, size=(n_shares - 1, key.size), dtype=np.uint8)
    shares[-1] = key ^ np.bitwise_xor.reduce(shares[:-1], axis=0)
    return MaskedKeyShares(shares)


@dataclass(frozen=True)
class LoadTransform:
    """How a logical register lands in its region.

    Physical slot ``j`` of the selected instance stores ``logical[perm[j]]``.
    Instances other than ``instance`` are cleared.
    """

    perm: tuple | None = None
    instance: int = 0


def _region_geometry(state: FabricState, region_id: int | None):
    if region_id is None:
        if state.regions:
            if len(state.regions) > 1:
                raise ParameterError("state has several regions; pass region_id")
            return 0, state.regions[0]
        return None, None
    return state.region(region_id)


def load_target(state: FabricState, logical_bits: Sequence[int],
                mtd_transform: LoadTransform | None = None,
                region_id: int | None = None) -> FabricState:
    k, reg = _region_geometry(state, region_id)
    bits = np.asarray(logical_bits, dtype=np.uint8)
    if reg is None:
        n, n_inst, start = len(state.placement), 1, 0
        active_perm = None
    else:
        n, n_inst, start = reg.n_bits, reg.n_instances, reg.start
        active_perm = state.perms[k]
    if bits.shape != (n,):
        raise ParameterError(f"expected {n} logical bits, got {bits.shape}")
    t = mtd_transform if mtd_transform is not None else LoadTransform(active_perm)
    if not 0 <= t.instance < n_inst:
        raise ParameterError(f"instance {t.instance} out of range")
    stored = bits if t.perm is None else bits[np.asarray(t.perm, dtype=np.intp)]
    block = np.zeros(n * n_inst, dtype=np.uint8)
    block[t.instance * n:(t.instance + 1) * n] = stored
    new = list(state.bits)
    new[start:start + n * n_inst] = block.tolist()
    return replace(state, bits=tuple(new))


def read_back(state: FabricState, mtd_transform: LoadTransform | None = None,
              region_id: int | None = None) -> np.ndarray:
    """Inverse of :func:`load_target`: the logical value the function block sees."""
    k, reg = _region_geometry(state, region_id)
    if reg is None:
        n, start, active_perm = len(state.placement), 0, None
    else:
        n, start, active_perm = reg.n_bits, reg.start, state.perms[k]
    t = mtd_transform if mtd_transform is not None else LoadTransform(active_perm)
    stored = np.asarray(state.bits[start + t.instance * n:start + (t.instance + 1) * n], dtype=np.uint8)
    if t.perm is None:
        return stored
    logical = np.empty(n, dtype=np.uint8)
    logical[np.asarray(t.perm, dtype=np.intp)] = stored
    return logical
