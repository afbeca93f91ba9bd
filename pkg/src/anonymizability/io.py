"""Canonical dataset files and delimited report tables.

A canonical dataset is a planar CSV (``pseudo_id,timestamp,x,y`` with
integer minutes since the epoch) plus a JSON sidecar next to it carrying the
epoch, the granularities and any projection or generator metadata.
"""

from __future__ import annotations

import csv
import json
import math
from datetime import datetime
from pathlib import Path

from .ingest import (
    PLANAR_HEADER,
    TIMESTAMP_FORMAT,
    ParseError,
    epoch_plus,
    ingest_csv,
    read_records,
)
from .model import Dataset, Fingerprint

FORMAT_VERSION = 1


def fmt(v) -> str:
    """Fixed 12-significant-digit rendering; ``inf``/``nan`` spelled out."""
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".12g")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_dataset(d: Dataset, path) -> None:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PLANAR_HEADER)
        for u in sorted(d.users, key=lambda u: u.pseudo_id):
            for x, y, t in zip(u.x.tolist(), u.y.tolist(), u.t.tolist()):
                w.writerow([u.pseudo_id, t, repr(x), repr(y)])
    meta = {
        "format_version": FORMAT_VERSION,
        "timestamp": "minutes_since_epoch",
        "epoch": d.epoch.strftime(TIMESTAMP_FORMAT),
        "spatial_granularity_m": d.spatial_granularity_m,
        "temporal_granularity_min": d.temporal_granularity_min,
        **d.meta,
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_dataset(path) -> Dataset:
    """Load a canonical dataset; a CSV without sidecar is ingested as raw input."""
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        return ingest_csv(path)
    try:
        meta = json.loads(side.read_text(encoding="utf-8"))
        epoch = datetime.strptime(meta.pop("epoch"), TIMESTAMP_FORMAT)
        cell = int(meta.pop("spatial_granularity_m"))
        bin_ = int(meta.pop("temporal_granularity_min"))
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad sidecar {side}: {exc}") from None
    meta.pop("format_version", None)
    meta.pop("timestamp", None)
    grouped: dict[str, list] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for r in read_records(fh, epoch_minutes=True):
            if r.geographic:
                raise ParseError("canonical dataset must be planar", r.line)
            if r.timestamp < 0:
                raise ParseError("timestamp before epoch", r.line)
            grouped.setdefault(r.pseudo_id, []).append((r.x, r.y, r.timestamp))
    users = [Fingerprint.from_samples(pid, s) for pid, s in sorted(grouped.items())]
    return Dataset(users, epoch, cell, bin_, meta)


def write_raw_csv(d: Dataset, path) -> None:
    """Planar input-format CSV with ISO timestamps (what ingest consumes)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PLANAR_HEADER)
        for u in sorted(d.users, key=lambda u: u.pseudo_id):
            for x, y, t in zip(u.x.tolist(), u.y.tolist(), u.t.tolist()):
                w.writerow([u.pseudo_id, epoch_plus(d.epoch, t).strftime(TIMESTAMP_FORMAT), repr(x), repr(y)])


def write_table(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else fmt(c) for c in row])


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    v = float(obj)
    # non-finite values would make the JSON invalid; fixed precision keeps output byte-stable
    return fmt(v) if not math.isfinite(v) else float(fmt(v))
