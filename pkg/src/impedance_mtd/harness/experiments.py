"""Attack runs, PR-rate sweeps and report assembly on top of capture archives."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from ..attacks import AttackReport, cima, dima, dm_curve, progressive_leakage, tima_attack, tima_profile
from ..errors import ParameterError, UsageError
from ..mtd import overhead_any
from .archive import TraceArchive, read_archive
from .capture import capture
from .config import CampaignConfig

METHODS = ("cima", "dima", "tima")
_SCENARIO = {"cima": "cima_dima", "dima": "cima_dima", "tima": "tima"}


def _load(archive) -> TraceArchive:
    return archive if isinstance(archive, TraceArchive) else read_archive(archive)


def run_tima(archive: TraceArchive, profile_split: float = 0.9, k_points: int = 20) -> dict:
    """Profile on the first ``profile_split`` of the traces, attack the rest."""
    if not 0 < profile_split < 1:
        raise UsageError("--profile-split must lie strictly between 0 and 1")
    ts = archive.trace_set()
    n = len(ts)
    cut = int(round(profile_split * n))
    if cut < 2 or n - cut < 1:
        raise UsageError("too few traces for the requested profile/attack split")
    templates = tima_profile(ts.subset(slice(0, cut)), k_points)
    result = tima_attack(templates, ts.subset(slice(cut, n)))
    dm = np.array([t.dm for t in templates])
    return {
        "method": "tima",
        "n_profile": cut,
        "n_attack": n - cut,
        "k_points": k_points,
        "accuracy": [float(a) for a in result.accuracy],
        "vote_accuracy": [float(a) for a in result.vote_accuracy],
        "min_accuracy": float(result.accuracy.min()),
        "dm_peak": [float(v) for v in dm.max(axis=1)],
        "selected_points": [[int(i) for i in t.selected_points] for t in templates],
        "_dm": dm,
    }


def attack_archive(archive, method: str, profile_split: float = 0.9, k_points: int = 20,
                   checkpoints: Sequence[int] | None = None, out_dir=None) -> dict:
    """Run ``method`` on an archive and write its report files next to it (or into ``out_dir``)."""
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    arch = _load(archive)
    if _SCENARIO[method] != arch.scenario:
        raise UsageError(f"{method} needs a {_SCENARIO[method]} archive, this one is {arch.scenario}")
    out = Path(out_dir) if out_dir is not None else arch.path
    if method == "tima":
        summary = run_tima(arch, profile_split, k_points)
        dm = summary.pop("_dm")
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            (out / "tima_report.json").write_text(json.dumps(summary, indent=2) + "\n")
            with (out / "tima_dm.csv").open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["bit"] + [f"f{i}" for i in range(dm.shape[1])])
                for b, row in enumerate(dm):
                    w.writerow([b] + [repr(float(v)) for v in row])
        return summary
    ts = arch.trace_set()
    if len(ts) < 2:
        raise UsageError("need at least two traces")
    try:
        if checkpoints:
            report = progressive_leakage(ts, method, checkpoints)
        else:
            report = cima(ts) if method == "cima" else dima(ts)
    except ParameterError as exc:
        raise UsageError(str(exc)) from None
    if out is not None:
        report.write(out)
    return report.to_json()


def tima_dm_peaks(archive) -> np.ndarray:
    """Peak DM per labelled bit over the whole archive."""
    ts = _load(archive).trace_set()
    return np.array([dm_curve(ts.traces, ts.share_bits, b).values.max()
                     for b in range(ts.share_bits.shape[1])])


SWEEP_COLUMNS = ("rate", "delay_ms", "clb_factor", "extrapolated", "true_key_rank",
                 "max_true_correlation", "pr_applications")


def sweep(config: CampaignConfig, rates: Sequence[int], grid_points: int | None = 100) -> dict:
    """One capture plus CIMA per PR rate on a reduced grid, joined with the overhead model."""
    if config.scenario != "cima_dima":
        raise UsageError("sweep runs CIMA and needs a cima_dima config")
    if not rates:
        raise UsageError("no rates given")
    if not config.policy.pr_enabled:
        raise UsageError("sweep needs an mtd policy with seq_mux or randomized_pr on")
    grid = dict(config.raw["grid"])
    if grid_points is not None:
        grid["n_points"] = min(int(grid["n_points"]), int(grid_points))
    rows = []
    for rate in rates:
        if int(rate) < 1:
            raise UsageError(f"rate {rate} must be >= 1")
        cfg = config.with_overrides(grid=grid, mtd={"pr_rate": int(rate)})
        arch = capture(cfg)
        rep: AttackReport = cima(arch.trace_set())
        oh = overhead_any(int(rate))
        rows.append({
            "rate": int(rate),
            "delay_ms": oh.delay_ms,
            "clb_factor": oh.clb_factor,
            "extrapolated": oh.extrapolated,
            "true_key_rank": rep.key_rank,
            "max_true_correlation": float(rep.peak[rep.true_key]),
            "pr_applications": arch.meta["pr_applications"],
        })
    ranks = [r["true_key_rank"] for r in rows]
    trend = {
        "rank_non_decreasing": all(a <= b for a, b in zip(ranks, ranks[1:])),
        "spearman_rate_rank": (float(stats.spearmanr([r["rate"] for r in rows], ranks).statistic)
                               if len(rows) > 2 and len(set(ranks)) > 1 else None),
    }
    return {"rows": rows, "trend": trend}


def sweep_csv(result: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in result["rows"]:
        w.writerow(row)
    return buf.getvalue()


def report(archive_dir, fmt: str = "json") -> str:
    """Summarize an archive and every attack report written into it."""
    if fmt not in ("json", "csv"):
        raise UsageError("--format must be csv or json")
    arch = read_archive(archive_dir)
    meta = arch.meta
    summary = {
        "scenario": arch.scenario,
        "n_traces": meta["n_traces"],
        "n_points": meta["n_points"],
        "campaign_seed": meta["campaign_seed"],
        "policy_fingerprint": meta["policy_fingerprint"],
        "pr_applications": meta["pr_applications"],
        "noise_sigma": meta["noise_sigma"],
        "traces_sha256": meta["checksums"]["traces.bin"],
        "reports": {},
    }
    for p in sorted(Path(archive_dir).glob("*_report.json")):
        summary["reports"][p.name[:-len("_report.json")]] = json.loads(p.read_text())
    if fmt == "json":
        return json.dumps(summary, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "key_rank", "best_guess", "margin", "max_true_statistic", "min_accuracy"])
    for name, rep in summary["reports"].items():
        w.writerow([name, rep.get("key_rank", ""), rep.get("best_guess", ""), rep.get("margin", ""),
                    rep.get("max_true_statistic", ""), rep.get("min_accuracy", "")])
    return buf.getvalue()
