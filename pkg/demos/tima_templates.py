"""
Template attack on the shares of a masked key, then the same profile under the defense.

Prints per-share template accuracy on a held-out split of the undefended
campaign and how much the defended campaign flattens the difference of means.
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from impedance_mtd.harness import CampaignConfig, capture
from impedance_mtd.harness.experiments import run_tima, tima_dm_peaks

HERE = Path(__file__).parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--defended-traces", type=int, default=20000)
    args = ap.parse_args()

    off = capture(CampaignConfig.load(HERE / "configs" / "tima_baseline.json"))
    res = run_tima(off, profile_split=0.9)
    acc = np.array(res["accuracy"]).reshape(3, 8)
    for s, row in enumerate(acc):
        print(f"share {s}: held-out accuracy per bit {np.round(row, 3).tolist()}")

    on_cfg = CampaignConfig.load(HERE / "configs" / "tima_defended.json").with_overrides(
        n_traces=args.defended_traces)
    ratio = tima_dm_peaks(capture(on_cfg)) / tima_dm_peaks(off)
    print(f"peak DM defended / undefended: max {ratio.max():.3f}, mean {ratio.mean():.3f}")


if __name__ == "__main__":
    main()
