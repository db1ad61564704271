"""
Impedance attacks over captured phase traces.

CIMA and DIMA are evaluated from per-plaintext class sums: every key guess
only relabels the 256 plaintext classes, so the trace matrix is reduced once
to ``S[p] = sum of centered traces with plaintext p`` and each guess becomes
a 256-term contraction. Class sums are accumulated in float64, sequentially
in trace order, which keeps results bit-reproducible and makes a progressive
checkpoint at ``N`` identical to the full attack.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegeneratePartitionError, ParameterError
from .target import HAMMING_WEIGHT, SBOX, byte_bits

N_GUESSES = 256


@dataclass
class TraceSet:
    traces: np.ndarray                  # N x F phase in degrees
    plaintexts: np.ndarray | None = None  # N bytes (non-profiled)
    share_bits: np.ndarray | None = None  # N x B labels (profiled)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.traces = np.asarray(self.traces, dtype=np.float64)
        if self.traces.ndim != 2:
            raise ParameterError("traces must be an N x F matrix")
        n = self.traces.shape[0]
        if self.plaintexts is not None:
            self.plaintexts = np.asarray(self.plaintexts, dtype=np.uint8)
            if self.plaintexts.shape != (n,):
                raise ParameterError("one plaintext byte per trace expected")
        if self.share_bits is not None:
            self.share_bits = np.asarray(self.share_bits, dtype=np.uint8)
            if self.share_bits.ndim != 2 or self.share_bits.shape[0] != n:
                raise ParameterError("share_bits must be N x B")
        n_points = self.meta.get("n_points")
        if n_points is not None and n_points != self.traces.shape[1]:
            raise ParameterError("trace width does not match the frequency grid")

    def __len__(self) -> int:
        return self.traces.shape[0]

    @property
    def n_points(self) -> int:
        return self.traces.shape[1]

    def subset(self, rows) -> TraceSet:
        pick = (lambda a: None if a is None else a[rows])
        return TraceSet(self.traces[rows], pick(self.plaintexts), pick(self.share_bits), dict(self.meta))


@dataclass(frozen=True)
class DmCurve:
    values: np.ndarray
    target_bit: int = 0


@dataclass(frozen=True)
class BitTemplate:
    mean0: np.ndarray
    mean1: np.ndarray
    pooled_var: np.ndarray
    selected_points: np.ndarray
    target_bit: int = 0
    dm: np.ndarray | None = None


@dataclass
class TimaResult:
    guesses: np.ndarray              # N x B
    accuracy: np.ndarray | None      # per bit, likelihood over all selected points
    vote_accuracy: np.ndarray | None  # per bit, majority of single-point decisions


@dataclass
class AttackReport:
    method: str
    statistic_matrix: np.ndarray     # 256 x F
    best_guess: int
    key_rank: int | None = None
    true_key: int | None = None
    margin: float | None = None
    checkpoints: np.ndarray | None = None
    progressive: np.ndarray | None = None  # n_checkpoints x 256
    degenerate_partitions: int = 0

    @property
    def peak(self) -> np.ndarray:
        """Max over frequency of the absolute statistic, per guess."""
        return np.abs(self.statistic_matrix).max(axis=1)

    def to_json(self) -> dict:
        out = {
            "method": self.method,
            "best_guess": self.best_guess,
            "key_rank": self.key_rank,
            "true_key": self.true_key,
            "margin": self.margin,
            "degenerate_partitions": self.degenerate_partitions,
            "n_points": int(self.statistic_matrix.shape[1]),
        }
        if self.true_key is not None:
            out["max_true_statistic"] = float(self.peak[self.true_key])
        if self.checkpoints is not None:
            out["checkpoints"] = [int(c) for c in self.checkpoints]
        return out

    def write(self, out_dir, prefix: str | None = None) -> list[Path]:
        """JSON summary plus CSV matrices: one row per key guess, one per checkpoint."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = prefix or self.method
        paths = [out_dir / f"{stem}_report.json", out_dir / f"{stem}_statistic.csv"]
        paths[0].write_text(json.dumps(self.to_json(), indent=2) + "\n")
        with paths[1].open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["guess"] + [f"f{i}" for i in range(self.statistic_matrix.shape[1])])
            for k, row in enumerate(self.statistic_matrix):
                w.writerow([k] + [repr(float(v)) for v in row])
        if self.progressive is not None:
            p = out_dir / f"{stem}_progressive.csv"
            with p.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["n_traces"] + [f"k{k}" for k in range(N_GUESSES)])
                for c, row in zip(self.checkpoints, self.progressive):
                    w.writerow([int(c)] + [repr(float(v)) for v in row])
            paths.append(p)
        return paths


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ParameterError("x and y must be 1-D vectors of equal length")
    if x.size < 2:
        raise ParameterError("need at least two samples")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    r = float(xc @ yc) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def _split(traces: np.ndarray, labels: np.ndarray):
    one = labels.astype(bool)
    n1 = int(one.sum())
    if n1 == 0 or n1 == len(labels):
        raise DegeneratePartitionError("both label classes must be non-empty")
    return traces[~one], traces[one]


def dm_curve(traces, labels, bit_index: int = 0) -> DmCurve:
    """Per-frequency ``|mean(traces | bit=0) - mean(traces | bit=1)|``.

    ``labels`` is either one bit per trace or an N x B matrix from which
    column ``bit_index`` is used.
    """
    traces = np.asarray(traces, dtype=np.float64)
    labels = np.asarray(labels)
    if labels.ndim == 2:
        labels = labels[:, bit_index]
    if labels.shape != (traces.shape[0],):
        raise ParameterError("one label per trace expected")
    t0, t1 = _split(traces, labels)
    return DmCurve(np.abs(t0.mean(axis=0) - t1.mean(axis=0)), bit_index)


def tima_profile(profiling_set: TraceSet, k_points: int = 20,
                 bits: Sequence[int] | None = None) -> list[BitTemplate]:
    """Two-class Gaussian template per labelled bit over its top-``k_points`` DM frequencies."""
    if profiling_set.share_bits is None:
        raise ParameterError("profiling needs share_bits labels")
    if k_points < 1:
        raise ParameterError("k_points must be >= 1")
    tr = profiling_set.traces
    k = min(k_points, tr.shape[1])
    out = []
    for b in (range(profiling_set.share_bits.shape[1]) if bits is None else bits):
        t0, t1 = _split(tr, profiling_set.share_bits[:, b])
        m0, m1 = t0.mean(axis=0), t1.mean(axis=0)
        ss = ((t0 - m0) ** 2).sum(axis=0) + ((t1 - m1) ** 2).sum(axis=0)
        dof = max(len(t0) + len(t1) - 2, 1)
        var = ss / dof
        # floor keeps noiseless profiles usable
        var = np.maximum(var, 1e-12 * max(float(var.mean()), 1e-12))
        dm = np.abs(m0 - m1)
        sel = np.argsort(-dm, kind="stable")[:k]
        out.append(BitTemplate(m0, m1, var, sel, b, dm))
    return out


def tima_attack(templates: Sequence[BitTemplate], attack_set: TraceSet) -> TimaResult:
    """Classify every labelled bit of every attack trace by Gaussian log-likelihood."""
    tr = attack_set.traces
    guesses = np.zeros((len(tr), len(templates)), dtype=np.uint8)
    votes = np.zeros_like(guesses)
    for j, t in enumerate(templates):
        if t.mean0.shape[0] != tr.shape[1]:
            raise ParameterError("templates and attack traces use different frequency grids")
        x = tr[:, t.selected_points]
        m0, m1, v = t.mean0[t.selected_points], t.mean1[t.selected_points], t.pooled_var[t.selected_points]
        d0 = (x - m0) ** 2 / v
        d1 = (x - m1) ** 2 / v
        guesses[:, j] = d1.sum(axis=1) < d0.sum(axis=1)
        votes[:, j] = 2 * (d1 < d0).sum(axis=1) > len(t.selected_points)
    acc = vote = None
    if attack_set.share_bits is not None:
        truth = attack_set.share_bits[:, [t.target_bit for t in templates]]
        acc = (guesses == truth).mean(axis=0)
        vote = (votes == truth).mean(axis=0)
    return TimaResult(guesses, acc, vote)


def _hw_models() -> np.ndarray:
    p = np.arange(256)
    return np.stack([HAMMING_WEIGHT[SBOX[p ^ k]] for k in range(N_GUESSES)]).astype(np.float64)


def _bit_models() -> np.ndarray:
    """8 x 256 x 256: bit b of sbox(p ^ k) indexed [b, k, p]."""
    p = np.arange(256)
    inter = np.stack([SBOX[p ^ k] for k in range(N_GUESSES)])
    return np.moveaxis(byte_bits(inter), -1, 0).astype(np.float64)


class _ClassSums:
    """Running per-plaintext sums of centered traces and their squares."""

    def __init__(self, n_points: int, offset: np.ndarray):
        self.offset = offset
        self.s = np.zeros((256, n_points))
        self.q = np.zeros((256, n_points))
        self.n = np.zeros(256)

    def add(self, traces: np.ndarray, plaintexts: np.ndarray) -> None:
        yc = traces - self.offset
        np.add.at(self.s, plaintexts, yc)
        np.add.at(self.q, plaintexts, yc * yc)
        np.add.at(self.n, plaintexts, 1.0)


def _cima_stat(cs: _ClassSums, models: np.ndarray) -> tuple[np.ndarray, int]:
    n = cs.n.sum()
    if n < 2:
        raise ParameterError("need at least two traces")
    mean_y = cs.s.sum(axis=0) / n
    var_y = cs.q.sum(axis=0) / n - mean_y ** 2
    mean_h = models @ cs.n / n
    var_h = (models ** 2) @ cs.n / n - mean_h ** 2
    cov = (models @ cs.s) / n - mean_h[:, None] * mean_y[None, :]
    den = np.sqrt(np.clip(var_h, 0, None)[:, None] * np.clip(var_y, 0, None)[None, :])
    tiny = 1e-12 * max(float(np.max(den, initial=0.0)), 1e-300)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(den > tiny, cov / den, 0.0)
    # a guess whose model is constant over the observed plaintexts is uninformative
    r[var_h <= 1e-12 * np.max(np.abs(mean_h) ** 2 + 1)] = 0.0
    return np.clip(r, -1.0, 1.0), 0


def _dima_stat(cs: _ClassSums, models: np.ndarray) -> tuple[np.ndarray, int]:
    n = cs.n.sum()
    if n < 2:
        raise ParameterError("need at least two traces")
    total = cs.s.sum(axis=0)
    acc = np.zeros((N_GUESSES, cs.s.shape[1]))
    degenerate = 0
    for bit_model in models:
        n1 = bit_model @ cs.n
        s1 = bit_model @ cs.s
        ok = (n1 > 0) & (n1 < n)
        degenerate += int((~ok).sum())
        with np.errstate(invalid="ignore", divide="ignore"):
            dom = np.abs(s1 / n1[:, None] - (total - s1) / (n - n1)[:, None])
        acc += np.where(ok[:, None], dom, 0.0)
    return acc / models.shape[0], degenerate


_STATS = {"cima": (_cima_stat, _hw_models), "dima": (_dima_stat, _bit_models)}


def _rank(peak: np.ndarray, true_key: int | None):
    best = int(np.argmax(peak))
    if true_key is None:
        return best, None, None
    t = peak[true_key]
    rank = 1 + int((peak > t).sum())
    wrong = np.delete(peak, true_key).max()
    margin = float(t / wrong) if wrong > 0 else float("inf")
    return best, rank, margin


def _true_key(trace_set: TraceSet, true_key: int | None) -> int | None:
    if true_key is not None:
        return int(true_key)
    k = trace_set.meta.get("key_byte")
    return None if k is None else int(k)


def progressive_leakage(trace_set: TraceSet, attack: str = "cima",
                        checkpoints: Sequence[int] | None = None,
                        true_key: int | None = None) -> AttackReport:
    """Re-run the statistic on trace prefixes; ``progressive[i, k]`` is guess k's peak at checkpoint i.

    The returned report's statistic matrix and rank are those of the last checkpoint.
    """
    if attack not in _STATS:
        raise ParameterError(f"unknown attack {attack!r}")
    if trace_set.plaintexts is None:
        raise ParameterError("non-profiled attacks need plaintexts")
    n = len(trace_set)
    cps = np.asarray([n] if checkpoints is None else list(checkpoints), dtype=np.int64)
    if cps.size == 0 or np.any(np.diff(cps) <= 0) or cps[0] < 2 or cps[-1] > n:
        raise ParameterError("checkpoints must be ascending within 2..N")
    stat_fn, model_fn = _STATS[attack]
    models = model_fn()
    tr = trace_set.traces
    cs = _ClassSums(tr.shape[1], tr.mean(axis=0))
    prog = np.empty((len(cps), N_GUESSES))
    start = 0
    stat = degenerate = None
    for i, c in enumerate(cps):
        cs.add(tr[start:c], trace_set.plaintexts[start:c])
        start = int(c)
        stat, degenerate = stat_fn(cs, models)
        prog[i] = np.abs(stat).max(axis=1)
    key = _true_key(trace_set, true_key)
    best, rank, margin = _rank(prog[-1], key)
    return AttackReport(attack, stat, best, rank, key, margin, cps, prog, degenerate)


def cima(trace_set: TraceSet, true_key: int | None = None) -> AttackReport:
    """Pearson correlation of every frequency with ``HW(sbox(p ^ k))`` for all 256 guesses."""
    rep = progressive_leakage(trace_set, "cima", None, true_key)
    rep.checkpoints = rep.progressive = None
    return rep


def dima(trace_set: TraceSet, true_key: int | None = None) -> AttackReport:
    """Mean over the 8 S-box output bits of the per-frequency ``|DoM|``.

    A (guess, bit) pair whose partition is one-sided contributes 0 and is
    counted in ``degenerate_partitions``.
    """
    rep = progressive_leakage(trace_set, "dima", None, true_key)
    rep.checkpoints = rep.progressive = None
    return rep
