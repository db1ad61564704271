"""
On-disk trace archives.

A directory holding:

``meta.json``
    format version, the resolved campaign config, dimensions, label layout,
    capture bookkeeping and SHA-256 checksums of the two binary files.
``traces.bin``
    little-endian float32, row-major ``n_traces x n_points`` phase in degrees.
``labels.bin``
    one plaintext byte per trace, or share-bit labels packed 8 per byte
    (bit ``j`` of a row in byte ``j // 8`` at position ``j % 8``).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..attacks import TraceSet
from ..errors import DataError

FORMAT = 1
META = "meta.json"
TRACES = "traces.bin"
LABELS = "labels.bin"


@dataclass
class TraceArchive:
    meta: dict
    traces: np.ndarray   # float32, N x F
    labels: np.ndarray   # uint8 plaintexts (N,) or unpacked bits (N, B)
    path: Path | None = None

    @property
    def scenario(self) -> str:
        return self.meta["config"]["scenario"]

    def trace_set(self) -> TraceSet:
        meta = {k: v for k, v in self.meta.items() if k != "checksums"}
        if self.meta["labels"]["kind"] == "plaintext":
            return TraceSet(self.traces, plaintexts=self.labels, meta=meta)
        return TraceSet(self.traces, share_bits=self.labels, meta=meta)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _encode(traces: np.ndarray, labels: np.ndarray, kind: str) -> tuple[bytes, bytes]:
    tr = np.ascontiguousarray(traces, dtype="<f4").tobytes()
    if kind == "plaintext":
        lb = np.ascontiguousarray(labels, dtype=np.uint8).tobytes()
    else:
        lb = np.packbits(np.asarray(labels, dtype=np.uint8), axis=1, bitorder="little").tobytes()
    return tr, lb


def write_archive(out_dir, meta: dict, traces: np.ndarray, labels: np.ndarray) -> TraceArchive:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    kind = meta["labels"]["kind"]
    tr, lb = _encode(traces, labels, kind)
    meta = dict(meta)
    meta["format"] = FORMAT
    meta["n_traces"] = int(traces.shape[0])
    meta["n_points"] = int(traces.shape[1])
    meta["checksums"] = {TRACES: _sha256(tr), LABELS: _sha256(lb)}
    (out / TRACES).write_bytes(tr)
    (out / LABELS).write_bytes(lb)
    (out / META).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return TraceArchive(meta, np.frombuffer(tr, dtype="<f4").reshape(traces.shape), np.asarray(labels), out)


def _major(fmt) -> int:
    try:
        return int(str(fmt).split(".")[0])
    except ValueError:
        raise DataError(f"unreadable format version {fmt!r}") from None


def read_archive(path) -> TraceArchive:
    path = Path(path)
    try:
        meta = json.loads((path / META).read_text())
        tr = (path / TRACES).read_bytes()
        lb = (path / LABELS).read_bytes()
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read archive {path}: {exc}") from None
    if _major(meta.get("format")) != FORMAT:
        raise DataError(f"unsupported archive format {meta.get('format')!r}")
    sums = meta.get("checksums", {})
    if sums.get(TRACES) != _sha256(tr):
        raise DataError("traces.bin checksum mismatch")
    if sums.get(LABELS) != _sha256(lb):
        raise DataError("labels.bin checksum mismatch")
    n, f = int(meta["n_traces"]), int(meta["n_points"])
    if len(tr) != 4 * n * f:
        raise DataError("traces.bin size does not match the recorded dimensions")
    traces = np.frombuffer(tr, dtype="<f4").reshape(n, f)
    kind = meta["labels"]["kind"]
    if kind == "plaintext":
        if len(lb) != n:
            raise DataError("labels.bin size does not match n_traces")
        labels = np.frombuffer(lb, dtype=np.uint8).copy()
    else:
        width = int(meta["labels"]["width"])
        row = (width + 7) // 8
        if len(lb) != n * row:
            raise DataError("labels.bin size does not match n_traces")
        packed = np.frombuffer(lb, dtype=np.uint8).reshape(n, row)
        labels = np.unpackbits(packed, axis=1, count=width, bitorder="little")
    return TraceArchive(meta, traces, labels, path)
