"""Campaign configurations shared by the harness and acceptance tests."""
from __future__ import annotations

import copy

MODEL_SEED = 20

COLUMN0 = {"x_min": 0, "x_max": 0, "y_min": 0, "y_max": 15,
           "slices": [0, 1, 2, 3], "route_variants": [0, 1, 2, 3]}

CIMA_BASELINE = {
    "scenario": "cima_dima",
    "n_traces": 2000,
    "campaign_seed": 0,
    "model_seed": MODEL_SEED,
    "geometry": {"width": 16, "height": 16, "slices_per_clb": 4, "ffs_per_slice": 8},
    "limits": [COLUMN0],
    "grid": {"f_start": 2e9, "f_stop": 3e9, "n_points": 500},
    "vna": {"noise_sigma": "calibrate", "snr": 0.5},
}

# relocation range for the defended register: CLB columns 0..3
CIMA_MTD_RANGE = {"x_min": 0, "x_max": 3, "y_min": 0, "y_max": 15,
                  "slices": [0, 1, 2, 3], "route_variants": [0, 1, 2, 3]}

CIMA_MTD = {
    **CIMA_BASELINE,
    "n_traces": 20000,
    "mtd": {"seq_mux": True, "randomized_pr": True, "pr_rate": 1, "limits": [CIMA_MTD_RANGE]},
}

TIMA_BASELINE = {
    "scenario": "tima",
    "n_traces": 2000,
    "campaign_seed": 0,
    "model_seed": MODEL_SEED,
    "geometry": {"width": 16, "height": 16, "slices_per_clb": 4, "ffs_per_slice": 8},
    "limits": [{**COLUMN0, "x_min": k, "x_max": k} for k in range(3)],
    "grid": {"f_start": 1e9, "f_stop": 3e9, "n_points": 1000},
    "n_shares": 3,
    "key_bytes": 1,
}

TIMA_MTD = {
    **TIMA_BASELINE,
    "n_traces": 20000,
    "mtd": {"seq_mux": True, "randomized_pr": True, "pr_rate": 16},
}


def small(base: dict, **changes) -> dict:
    """A copy of ``base`` with a short run on a coarse grid for fast tests."""
    out = copy.deepcopy(base)
    out["n_traces"] = 64
    out["grid"] = {**out["grid"], "n_points": 40}
    out.update(copy.deepcopy(changes))
    return out
