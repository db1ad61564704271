"""
Per-trace random streams.

Every consumer of randomness gets its own stream, keyed by the campaign seed,
the trace index and a purpose tag::

    Generator(PCG64(SeedSequence([campaign_seed, trace_index, tag, *extra])))

Streams never depend on evaluation order, so serial and parallel capture
draw identical numbers, and changing the defense policy leaves the plaintext
and share sequences untouched.
"""
from __future__ import annotations

import numpy as np

PLAINTEXT = 1
SHARES = 2
PR = 3
NOISE = 4
KEY = 5
LFSR = 6


def stream(campaign_seed: int, trace_index: int, tag: int, *extra: int) -> np.random.Generator:
    words = [int(campaign_seed), int(trace_index), int(tag), *(int(e) for e in extra)]
    if any(w < 0 for w in words):
        raise ValueError("seeds, indices and tags must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))
