"""Capture campaigns: drive the defense, load the target, measure, archive."""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..fabric import FabricState, build_state
from ..impedance import measure, phase_noise_variance
from ..mtd import Lfsr, apply_pr, generate_pr, permutation_entropy_bits, should_trigger, slice_mux_select
from ..target import LoadTransform, byte_bits, first_round_intermediate, load_target, refresh_shares
from . import rng
from .archive import TraceArchive, write_archive
from .config import CampaignConfig

LFSR_WIDTH = 16


def campaign_key(config: CampaignConfig) -> bytes:
    key = config.raw["key"]
    if key == "seeded":
        return bytes(rng.stream(config.campaign_seed, 0, rng.KEY).integers(0, 256, 16, dtype=np.uint8))
    return bytes.fromhex(key)


def base_state(config: CampaignConfig) -> FabricState:
    """Fabric with every protected register at its default (pre-defense) location."""
    policy = config.policy
    place = config.region_limits
    reconf = policy.limits or place
    regions = [(k, lim, config.bits_per_region) for k, lim in enumerate(reconf)]
    return build_state(config.geometry, regions, n_instances=policy.n_instances, placement_limits=place)


def slice_selections(config: CampaignConfig) -> np.ndarray:
    """Instance index per (trace, region), stepped serially from one maximal LFSR."""
    n_regions = len(config.region_limits)
    policy = config.policy
    out = np.zeros((config.n_traces, n_regions), dtype=np.int64)
    if policy.n_instances <= 1:
        return out
    lfsr = Lfsr.maximal(LFSR_WIDTH, policy.seed)
    for i in range(config.n_traces):
        for k in range(n_regions):
            out[i, k], lfsr = slice_mux_select(lfsr, policy.n_instances)
    return out


def _region_payloads(config: CampaignConfig, key: bytes, i: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Logical bits per region and the label row for trace ``i``."""
    if config.scenario == "cima_dima":
        p = int(rng.stream(config.campaign_seed, i, rng.PLAINTEXT).integers(0, 256))
        return [byte_bits(first_round_intermediate(p, key[0]))], np.uint8(p)
    n_bytes = config.key_bytes_needed
    key_bits = byte_bits(np.frombuffer(key[:n_bytes], dtype=np.uint8)).reshape(-1)
    shares = refresh_shares(key_bits, config.raw["n_shares"], rng.stream(config.campaign_seed, i, rng.SHARES))
    return list(shares.shares), shares.shares.reshape(-1)


def noise_calibration_inputs(config: CampaignConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-frequency signal variance and noise variance per unit effective sigma (deg^2)."""
    state = base_state(config)
    key = campaign_key(config)
    vna1 = config.vna(noise_sigma=1.0)
    vna1 = type(vna1)(vna1.grid, vna1.z0, 1, 1.0, vna1.if_bandwidth_hz)
    ms, zb = config.model_seed, config.z_base
    rows = []
    if config.scenario == "cima_dima":
        # uniform plaintexts make the intermediate uniform over all bytes
        payloads = ([byte_bits(v)] for v in range(256))
    else:
        payloads = (_region_payloads(config, key, i)[0] for i in range(256))
    for regions in payloads:
        s = state
        for k, bits in enumerate(regions):
            s = load_target(s, bits, LoadTransform(None, 0), region_id=k)
        rows.append(measure(s, config.vna(noise_sigma=0.0), None, ms, zb).phase_deg)
    signal_var = np.var(np.asarray(rows), axis=0)
    return signal_var, phase_noise_variance(state, vna1, ms, zb)


def calibrate_noise(config: CampaignConfig, snr: float | None = None) -> float:
    """Single-shot ``noise_sigma`` that puts the leakiest frequency at single-trace SNR ``snr``."""
    snr = float(config.raw["vna"]["snr"] if snr is None else snr)
    signal_var, unit_noise = noise_calibration_inputs(config)
    sigma_eff = math.sqrt(float(np.max(signal_var / unit_noise)) / snr)
    return sigma_eff * math.sqrt(int(config.raw["vna"]["averaging"]))


@dataclass
class _Plan:
    """Everything a worker needs to produce any trace independently."""

    config: CampaignConfig
    state: FabricState
    key: bytes
    selections: np.ndarray
    noise_sigma: float

    def trace(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        cfg = self.config
        policy = cfg.policy
        state = self.state
        if policy.pr_enabled:
            # the layout in force was generated at the most recent trigger point
            j = i - i % policy.pr_rate
            for k, reg in enumerate(state.regions):
                stream = rng.stream(cfg.campaign_seed, j, rng.PR, k, policy.seed)
                _, bs = generate_pr(policy, reg.base, stream, geometry=state.geometry,
                                    limits=reg.limits, region_id=reg.region_id,
                                    n_instances=reg.n_instances)
                state = apply_pr(state, bs)
        regions, label = _region_payloads(cfg, self.key, i)
        for k, bits in enumerate(regions):
            t = LoadTransform(state.perms[k], int(self.selections[i, k]))
            state = load_target(state, bits, t, region_id=k)
        noise = rng.stream(cfg.campaign_seed, i, rng.NOISE)
        phase = measure(state, cfg.vna(self.noise_sigma), noise, cfg.model_seed, cfg.z_base).phase_deg
        return phase, label

    def rows(self, indices) -> tuple[np.ndarray, np.ndarray]:
        out = [self.trace(i) for i in indices]
        return np.asarray([o[0] for o in out]), np.asarray([o[1] for o in out])


def _run_chunk(args):
    plan, lo, hi = args
    return plan.rows(range(lo, hi))


def pr_applications(config: CampaignConfig) -> int:
    policy = config.policy
    if not policy.pr_enabled:
        return 0
    return sum(should_trigger(i, policy.pr_rate) for i in range(config.n_traces))


def policy_fingerprint(config: CampaignConfig) -> str:
    blob = json.dumps(config.raw["mtd"], sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def capture(config: CampaignConfig, out_dir=None, workers: int = 1,
            chunk_size: int = 256) -> TraceArchive:
    """Run a campaign. Same config gives byte-identical traces for any ``workers``."""
    noise_sigma = calibrate_noise(config) if config.noise_is_calibrated else float(config.raw["vna"]["noise_sigma"])
    state = base_state(config)
    key = campaign_key(config)
    plan = _Plan(config, state, key, slice_selections(config), noise_sigma)
    n, f = config.n_traces, config.grid.n_points
    chunks = [(plan, lo, min(lo + chunk_size, n)) for lo in range(0, n, chunk_size)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
    else:
        parts = [_run_chunk(c) for c in chunks]

    n_labels = len(state.regions) * config.bits_per_region
    if parts:
        traces = np.concatenate([p[0] for p in parts])
        labels = np.concatenate([p[1] for p in parts])
    else:
        traces = np.zeros((0, f))
        labels = np.zeros((0,) if config.scenario == "cima_dima" else (0, n_labels), dtype=np.uint8)

    policy = config.policy
    meta = {
        "config": config.raw,
        "noise_sigma": noise_sigma,
        "key": key[:config.key_bytes_needed].hex(),
        "labels": ({"kind": "plaintext", "width": 8} if config.scenario == "cima_dima"
                   else {"kind": "share_bits", "width": n_labels,
                         "n_shares": config.raw["n_shares"], "bits_per_share": config.bits_per_region}),
        "pr_applications": pr_applications(config),
        "policy_fingerprint": policy_fingerprint(config),
        "perm_entropy_bits": permutation_entropy_bits(config.bits_per_region) if policy.seq_mux else 0.0,
        "campaign_seed": config.campaign_seed,
    }
    if config.scenario == "cima_dima":
        meta["key_byte"] = key[0]
    if out_dir is None:
        from .archive import FORMAT
        meta.update(format=FORMAT, n_traces=n, n_points=f)
        return TraceArchive(meta, traces.astype("<f4"), labels)
    return write_archive(out_dir, meta, traces, labels)
