"""Measured delay and CLB overhead per PR rate, with a formula fallback."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import OutOfTableError, ParameterError

BASE_DELAY_MS = 0.893

# rate: (delay ms, CLB factor). The delay at rate 128 was not measured.
TABLE = {
    1: (0.893, 1.0),
    2: (0.446, 1.09),
    4: (0.226, 1.12),
    8: (0.118, 1.14),
    16: (0.063, 1.20),
    32: (0.032, 1.25),
    64: (0.016, 1.29),
    128: (None, 1.32),
}

# Number of reconfigurable-module location options listed per rate; kept as-is.
NO_LOC = {1: 0, 2: 2, 4: 4, 8: 8, 16: 16, 32: 32, 64: 64, 128: 128}


@dataclass(frozen=True)
class OverheadEntry:
    pr_rate: float
    delay_ms: float
    clb_factor: float
    extrapolated: bool = False
    no_loc: int | None = None


def _clb_interp(rate: float) -> tuple[float, bool]:
    rates = sorted(TABLE)
    x = [math.log2(r) for r in rates]
    y = [TABLE[r][1] for r in rates]
    lx = math.log2(rate)
    return float(np.interp(lx, x, y)), lx > x[-1]


def overhead(pr_rate, mode: str = "table") -> OverheadEntry:
    if mode == "table":
        if pr_rate not in TABLE or TABLE[pr_rate][0] is None:
            raise OutOfTableError(f"no measured delay for PR rate {pr_rate}")
        delay, clb = TABLE[pr_rate]
        return OverheadEntry(pr_rate, delay, clb, False, NO_LOC[pr_rate])
    if mode != "formula":
        raise ParameterError(f"unknown overhead mode {mode!r}")
    if pr_rate < 1:
        raise ParameterError("PR rate must be >= 1")
    clb, beyond = _clb_interp(pr_rate)
    last_measured = max(r for r, (d, _) in TABLE.items() if d is not None)
    return OverheadEntry(pr_rate, BASE_DELAY_MS / pr_rate, clb,
                         extrapolated=beyond or pr_rate > last_measured,
                         no_loc=NO_LOC.get(pr_rate))


def overhead_any(pr_rate) -> OverheadEntry:
    """Table value when one was measured, formula otherwise."""
    try:
        return overhead(pr_rate, "table")
    except OutOfTableError:
        return overhead(pr_rate, "formula")
