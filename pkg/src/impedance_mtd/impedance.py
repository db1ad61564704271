"""
Synthetic impedance physics and the VNA measurement model.

Every placed flip-flop is a series RLC branch hanging off the power network.
Its capacitance grows by ``delta_c`` when the flip-flop stores a one, which
pulls the branch resonance down and leaves a localized dent in the chip
impedance around that cell's resonance. The flip-flops of a slice that leave
through the same switch-box path share a local-routing node, a further branch
whose capacitance grows with the number of ones they hold; this is the part
of the leakage that tracks Hamming weight.

All branches sit in parallel with a resistive baseline ``z_base``::

    Z(f) = 1 / (1/z_base + sum_cells y_cell(f) + sum_slices y_node(f))
    y(f) = 1 / (r + j*2*pi*f*l + 1 / (j*2*pi*f*c))

Branch parameters are drawn from a keyed hash of the coordinate and the
device ``model_seed``, so a given die is reproducible and two dies differ.
The branch resistance is set so that every cell's state toggle moves ``|Z|``
by roughly ``CELL_LOBE_OHM`` at its resonance whatever its Q and ``delta_c``;
a slice node moves it by a fraction ``NODE_LOBE_RATIO`` of that per stored one.
Resonances are spread uniformly over the middle of ``[F_RES_MIN, F_RES_MAX]``
with raised-cosine shoulders ``EDGE_TAPER_HZ`` wide at both ends. A hard edge
in the resonance density would make the average over all placements leak
near the edge, the same way wherever a bit is relocated.
Near resonance a series branch whose ``Q * delta_c / c0`` equals ``u`` swings
its admittance by ``(u / (1 + u**2 / 4)) / r`` and ``|dZ| ~ z_base**2 * |dY|``.
"""
from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError, SingularityError
from .fabric import CellCoord, FabricState

F_RES_MIN = 1.0e9
F_RES_MAX = 3.0e9
CELL_Q = (100.0, 200.0)
CELL_DELTA = (0.005, 0.02)
CELL_LOBE_OHM = 3.0
CELL_LOBE_JITTER = (0.85, 1.15)
NODE_Q = (100.0, 200.0)
NODE_R = (200.0, 400.0)
NODE_LOBE_RATIO = (0.45, 0.65)
EDGE_TAPER_HZ = 150e6
Z_BASE = 50.0


@dataclass(frozen=True)
class FrequencyGrid:
    f_start: float
    f_stop: float
    n_points: int
    spacing: str = "linear"

    def __post_init__(self):
        if not (0 < self.f_start < self.f_stop):
            raise ParameterError("need 0 < f_start < f_stop")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ParameterError("n_points must be an integer >= 2")
        if self.spacing != "linear":
            raise ParameterError("only linear spacing is supported")

    @property
    def frequencies(self) -> np.ndarray:
        return np.linspace(self.f_start, self.f_stop, int(self.n_points))

    def to_json(self) -> dict:
        return {"f_start": self.f_start, "f_stop": self.f_stop, "n_points": self.n_points}

    @classmethod
    def from_json(cls, obj: dict) -> FrequencyGrid:
        return cls(float(obj["f_start"]), float(obj["f_stop"]), int(obj["n_points"]))


@dataclass(frozen=True)
class CellImpedanceParams:
    r: float
    l: float
    c0: float
    delta_c: float

    @property
    def f_res(self) -> float:
        return 1.0 / (2 * math.pi * math.sqrt(self.l * self.c0))

    @property
    def q(self) -> float:
        return math.sqrt(self.l / self.c0) / self.r

    @property
    def half_power_bandwidth(self) -> float:
        """Full width between the -3 dB points of the branch admittance, in Hz."""
        return self.f_res / self.q


@dataclass(frozen=True)
class ComplexSweep:
    grid: FrequencyGrid
    values: np.ndarray


@dataclass(frozen=True)
class ImpedanceTrace:
    grid: FrequencyGrid
    phase_deg: np.ndarray
    magnitude_ohm: np.ndarray | None = None


@dataclass(frozen=True)
class VnaConfig:
    grid: FrequencyGrid
    z0: float = 50.0
    averaging: int = 200
    noise_sigma: float = 5e-4
    if_bandwidth_hz: float = 500.0

    def __post_init__(self):
        if self.averaging < 1:
            raise ParameterError("averaging must be >= 1")
        if self.noise_sigma < 0:
            raise ParameterError("noise_sigma must be >= 0")
        if self.z0 <= 0:
            raise ParameterError("z0 must be > 0")

    @property
    def effective_sigma(self) -> float:
        """Noise std left on S11 after averaging."""
        return self.noise_sigma / math.sqrt(self.averaging)


def _uniforms(tag: str, key: tuple, n: int) -> list[float]:
    digest = hashlib.blake2b(f"{tag}:{key}".encode(), digest_size=8 * n).digest()
    words = struct.unpack(f"<{n}Q", digest)
    # 53 bits per draw; the fraction is exact in a double
    return [(w >> 11) / float(1 << 53) for w in words]


def _branch(f_res: float, q: float, r: float, delta_ratio: float) -> CellImpedanceParams:
    w0 = 2 * math.pi * f_res
    l = q * r / w0
    c0 = 1.0 / (w0 * q * r)
    return CellImpedanceParams(r, l, c0, delta_ratio * c0)


def _span(lo_hi: tuple[float, float], u: float) -> float:
    lo, hi = lo_hi
    return lo + (hi - lo) * u


def _log_span(lo_hi: tuple[float, float], u: float) -> float:
    lo, hi = lo_hi
    return lo * (hi / lo) ** u


def _swing(u: float) -> float:
    return u / (1.0 + u * u / 4.0)


def _resonance_cdf(n: int = 8001) -> tuple[np.ndarray, np.ndarray]:
    f = np.linspace(F_RES_MIN, F_RES_MAX, n)
    d = np.minimum(f - F_RES_MIN, F_RES_MAX - f) / EDGE_TAPER_HZ
    density = np.sin(0.5 * np.pi * np.clip(d, 0.0, 1.0)) ** 2
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]))])
    return cdf / cdf[-1], f


_CDF, _CDF_F = _resonance_cdf()


def resonance_from_uniform(u: float) -> float:
    """Map ``u`` in [0, 1) to a resonance frequency through the tapered density."""
    return float(np.interp(u, _CDF, _CDF_F))


@lru_cache(maxsize=1 << 16)
def cell_params(coord: CellCoord, model_seed: int = 0) -> CellImpedanceParams:
    """Branch parameters of one flip-flop as reached through its route variant."""
    coord = CellCoord(*coord)
    u = _uniforms("cell", (int(model_seed), *coord), 4)
    f_res = resonance_from_uniform(u[0])
    q = _span(CELL_Q, u[1])
    delta = _span(CELL_DELTA, u[3])
    lobe = CELL_LOBE_OHM * _span(CELL_LOBE_JITTER, u[2])
    r = Z_BASE ** 2 * _swing(q * delta) / lobe
    return _branch(f_res, q, r, delta)


@lru_cache(maxsize=1 << 14)
def slice_node_params(clb_x: int, clb_y: int, slice_: int, route_variant: int = 0,
                      model_seed: int = 0) -> CellImpedanceParams:
    """Local-routing node of a slice behind one switch-box path; ``delta_c`` is the shift per stored one."""
    u = _uniforms("node", (int(model_seed), clb_x, clb_y, slice_, route_variant), 4)
    f_res = resonance_from_uniform(u[0])
    q = _span(NODE_Q, u[1])
    r = _log_span(NODE_R, u[2])
    lobe = _span(NODE_LOBE_RATIO, u[3]) * CELL_LOBE_OHM
    return _branch(f_res, q, r, lobe * r / (Z_BASE ** 2 * q))


def branch_admittance(f: np.ndarray, r, l, c) -> np.ndarray:
    """Series RLC admittance; ``r``, ``l``, ``c`` broadcast against ``f``."""
    w = 2 * np.pi * f
    return 1.0 / (r + 1j * (w * l - 1.0 / (w * c)))


def _branch_arrays(state: FabricState, model_seed: int):
    n = len(state.placement)
    if n == 0:
        return np.empty((0, 3))
    rows = []
    counts: dict[tuple, int] = {}
    for coord, bit in zip(state.placement, state.bits):
        p = cell_params(coord, model_seed)
        rows.append((p.r, p.l, p.c0 + bit * p.delta_c))
        s = (*coord.slice_site, coord.route_variant)
        counts[s] = counts.get(s, 0) + bit
    for s in sorted(counts):
        p = slice_node_params(*s, model_seed)
        rows.append((p.r, p.l, p.c0 + counts[s] * p.delta_c))
    return np.asarray(rows)


def chip_admittance(state: FabricState, f: np.ndarray, model_seed: int = 0,
                    z_base: float = Z_BASE) -> np.ndarray:
    y = np.full(f.shape, 1.0 / z_base, dtype=complex)
    rlc = _branch_arrays(state, model_seed)
    if len(rlc):
        y = y + branch_admittance(f[None, :], rlc[:, 0:1], rlc[:, 1:2], rlc[:, 2:3]).sum(axis=0)
    return y


def chip_impedance(state: FabricState, grid: FrequencyGrid, model_seed: int = 0,
                   z_base: float = Z_BASE) -> ComplexSweep:
    return ComplexSweep(grid, 1.0 / chip_admittance(state, grid.frequencies, model_seed, z_base))


def z_to_s11(z, z0: float = 50.0):
    """Reflection coefficient of a load ``z`` seen from a ``z0`` port."""
    z = np.asarray(z, dtype=complex)
    den = z + z0
    if np.any(den == 0):
        raise SingularityError("z = -z0 has no reflection coefficient")
    out = (z - z0) / den
    return out[()] if out.ndim == 0 else out


def s11_to_z(s11, z0: float = 50.0):
    s11 = np.asarray(s11, dtype=complex)
    den = 1 - s11
    if np.any(den == 0):
        raise SingularityError("S11 = 1 is an open circuit")
    out = z0 * (1 + s11) / den
    return out[()] if out.ndim == 0 else out


def _complex_noise(rng: np.random.Generator, sigma: float, n: int) -> np.ndarray:
    # circular: E|n|^2 = sigma^2
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * (sigma / math.sqrt(2))


def measure(state: FabricState, vna: VnaConfig, rng_stream: np.random.Generator,
            model_seed: int = 0, z_base: float = Z_BASE,
            with_magnitude: bool = False) -> ImpedanceTrace:
    """One averaged S11 sweep, returned as the impedance phase in degrees."""
    z_true = chip_impedance(state, vna.grid, model_seed, z_base).values
    s11 = z_to_s11(z_true, vna.z0)
    sigma = vna.effective_sigma
    if sigma > 0:
        for attempt in range(2):
            noisy = s11 + _complex_noise(rng_stream, sigma, s11.size)
            if np.all(np.abs(1 - noisy) > 1e-12):
                break
        else:
            raise SingularityError("noisy S11 reached 1 twice in a row")
        z = s11_to_z(noisy, vna.z0)
    else:
        z = z_true
    phase = np.degrees(np.angle(z))
    phase[phase <= -180.0] += 360.0
    mag = np.abs(z) if with_magnitude else None
    return ImpedanceTrace(vna.grid, phase, mag)


def phase_noise_variance(state: FabricState, vna: VnaConfig, model_seed: int = 0,
                         z_base: float = Z_BASE) -> np.ndarray:
    """Per-frequency variance (deg^2) of the measured phase, to first order in the noise.

    With ``Z = z0 (1+s)/(1-s)`` the phase moves by ``Im(2 ds / (1 - s^2))``;
    for circular noise of std ``sigma`` that has variance ``2 sigma^2 / |1-s^2|^2``.
    """
    s = z_to_s11(chip_impedance(state, vna.grid, model_seed, z_base).values, vna.z0)
    return np.degrees(1.0) ** 2 * 2 * vna.effective_sigma ** 2 / np.abs(1 - s * s) ** 2
