"""Fibonacci LFSR and the slice-multiplexer selector built on it."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..errors import DegenerateStateError, ParameterError

# Known maximal-length tap sets, numbered 1..width.
MAXIMAL_TAPS = {
    4: (4, 3),
    8: (8, 6, 5, 4),
    16: (16, 14, 13, 11),
}


@dataclass(frozen=True)
class Lfsr:
    width: int
    taps: tuple
    state: int

    def __post_init__(self):
        taps = tuple(sorted(set(self.taps), reverse=True))
        if not taps or max(taps) != self.width or min(taps) < 1:
            raise ParameterError("taps must be non-empty with the largest tap equal to width")
        object.__setattr__(self, "taps", taps)
        if not 0 <= self.state < (1 << self.width):
            raise ParameterError("state wider than the register")

    @classmethod
    def maximal(cls, width: int, seed: int) -> Lfsr:
        """A maximal-length register seeded with a nonzero state derived from ``seed``."""
        return cls(width, MAXIMAL_TAPS[width], seed % ((1 << width) - 1) + 1)


def lfsr_next(lfsr: Lfsr) -> tuple[int, Lfsr]:
    """Advance one step. The feedback bit is both the output and the bit shifted in."""
    if lfsr.state == 0:
        raise DegenerateStateError("an all-zero LFSR never leaves zero")
    fb = 0
    for t in lfsr.taps:
        fb ^= (lfsr.state >> (t - 1)) & 1
    state = ((lfsr.state << 1) | fb) & ((1 << lfsr.width) - 1)
    return fb, replace(lfsr, state=state)


def lfsr_period(lfsr: Lfsr) -> int:
    start = lfsr.state
    cur = lfsr
    for n in range(1, 1 << lfsr.width):
        _, cur = lfsr_next(cur)
        if cur.state == start:
            return n
    raise DegenerateStateError("state sequence does not return to the seed")


def slice_mux_select(lfsr: Lfsr, n_instances: int) -> tuple[int, Lfsr]:
    """Pick the instance that receives the data; rejection keeps the pick exact."""
    if n_instances < 1:
        raise ParameterError("n_instances must be >= 1")
    n_draw = math.ceil(math.log2(n_instances)) if n_instances > 1 else 0
    while True:
        value = 0
        for i in range(n_draw):
            bit, lfsr = lfsr_next(lfsr)
            value |= bit << i
        if value < n_instances:
            return value, lfsr
