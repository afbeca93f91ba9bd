"""Raw trajectory ingestion.

Geographic coordinates are projected with a spherical Lambert azimuthal
equal-area projection (authalic radius), then every position is snapped to
the center of its 100 m grid cell and timestamps become minutes since the
dataset epoch.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Iterator

import numpy as np

from .model import BASE_BIN_MIN, BASE_CELL_M, Dataset, Fingerprint

AUTHALIC_RADIUS_M = 6371007.181
MINUTES_PER_DAY = 1440
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M"

GEO_HEADER = ("pseudo_id", "timestamp", "lat", "lon")
PLANAR_HEADER = ("pseudo_id", "timestamp", "x", "y")


class ParseError(ValueError):
    """Malformed input; ``line`` is the 1-based line number in the file, if known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ProjectionError(ValueError):
    pass


@dataclass(frozen=True)
class RawRecord:
    """One input row.  Exactly one of (lat, lon) and (x, y) is set.

    ``timestamp`` is either a ``datetime`` or an integer count of minutes
    since the epoch.
    """

    pseudo_id: str
    timestamp: datetime | int
    lat: float | None = None
    lon: float | None = None
    x: float | None = None
    y: float | None = None
    line: int | None = None

    @property
    def geographic(self) -> bool:
        return self.lat is not None


@dataclass(frozen=True)
class ProjectionSpec:
    center_lat: float
    center_lon: float
    earth_radius_m: float = AUTHALIC_RADIUS_M

    def __post_init__(self):
        if not -90.0 <= self.center_lat <= 90.0 or not -180.0 <= self.center_lon <= 180.0:
            raise ValueError("projection center outside valid lat/lon range")
        if not self.earth_radius_m > 0:
            raise ValueError("earth radius must be positive")

    @classmethod
    def centered_on(cls, records: Iterable[RawRecord]) -> "ProjectionSpec":
        """Center on the middle of the bounding box of the records."""
        lats = [r.lat for r in records]
        lons = [r.lon for r in records]
        return cls((min(lats) + max(lats)) / 2, (min(lons) + max(lons)) / 2)

    def as_dict(self) -> dict:
        return {"center_lat": self.center_lat, "center_lon": self.center_lon, "earth_radius_m": self.earth_radius_m}


def project(lat: float, lon: float, spec: ProjectionSpec) -> tuple[float, float]:
    """Forward spherical Lambert azimuthal equal-area projection, in meters."""
    phi = math.radians(lat)
    lam = math.radians(lon)
    phi1 = math.radians(spec.center_lat)
    lam0 = math.radians(spec.center_lon)
    dlam = lam - lam0
    # haversine forms of the textbook expressions: exact zeros at the center
    hav_dlam = math.sin(dlam / 2) ** 2
    hav = math.sin((phi - phi1) / 2) ** 2 + math.cos(phi) * math.cos(phi1) * hav_dlam
    denom = 2.0 - 2.0 * hav  # 1 + cos(angular distance)
    if denom <= 1e-12:
        raise ProjectionError(f"projection singularity at ({lat}, {lon}): antipode of the center")
    kp = math.sqrt(2.0 / denom)
    R = spec.earth_radius_m
    x = R * kp * math.cos(phi) * math.sin(dlam)
    y = R * kp * (math.sin(phi - phi1) + 2.0 * math.sin(phi1) * math.cos(phi) * hav_dlam)
    return x, y


def snap_to_grid(x: float, y: float, cell_side: float) -> tuple[float, float]:
    """Center of the grid cell containing (x, y); cells are half-open [lo, hi)."""
    if cell_side <= 0:
        raise ValueError("cell side must be positive")
    return (math.floor(x / cell_side) + 0.5) * cell_side, (math.floor(y / cell_side) + 0.5) * cell_side


def snap_array(v: np.ndarray, cell_side: float) -> np.ndarray:
    return (np.floor(np.asarray(v, dtype=np.float64) / cell_side) + 0.5) * cell_side


def parse_timestamp(text: str) -> datetime:
    return datetime.strptime(text.strip(), TIMESTAMP_FORMAT)


def read_records(lines: Iterable[str], epoch_minutes: bool = False) -> Iterator[RawRecord]:
    """Parse CSV text (header included) into :class:`RawRecord` objects."""
    reader = csv.reader(lines)
    try:
        header = tuple(h.strip() for h in next(reader))
    except StopIteration:
        raise ParseError("empty dataset") from None
    if header == GEO_HEADER:
        geographic = True
    elif header == PLANAR_HEADER:
        geographic = False
    else:
        raise ParseError(f"unrecognized header {','.join(header)!r}", 1)
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", line)
        pid, ts, c1, c2 = (c.strip() for c in row)
        if not pid:
            raise ParseError("empty pseudo_id", line)
        try:
            stamp = int(ts) if epoch_minutes else parse_timestamp(ts)
            a, b = float(c1), float(c2)
        except ValueError as exc:
            raise ParseError(str(exc), line) from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ParseError("non-finite coordinate", line)
        if geographic:
            if not (-90.0 <= a <= 90.0 and -180.0 <= b <= 180.0):
                raise ParseError(f"latitude/longitude out of range: {a}, {b}", line)
            yield RawRecord(pid, stamp, lat=a, lon=b, line=line)
        else:
            yield RawRecord(pid, stamp, x=a, y=b, line=line)


def _minutes(stamp, epoch: datetime, line) -> int:
    if isinstance(stamp, datetime):
        delta = stamp - epoch
        if delta.seconds % 60 or delta.microseconds:
            raise ParseError("timestamp finer than one minute", line)
        minutes = delta.days * MINUTES_PER_DAY + delta.seconds // 60
    else:
        minutes = int(stamp)
    if minutes < 0:
        raise ParseError(f"timestamp before epoch {epoch.strftime(TIMESTAMP_FORMAT)}", line)
    return minutes


def default_epoch(records: Iterable[RawRecord]) -> datetime:
    """Midnight of the earliest calendar date among the records."""
    first = min(r.timestamp for r in records)
    return datetime(first.year, first.month, first.day)


def ingest(
    records: Iterable[RawRecord],
    spec: ProjectionSpec | None = None,
    epoch: datetime | None = None,
) -> Dataset:
    """Build a base-granularity :class:`Dataset` from raw records.

    Geographic records are projected (``spec`` defaults to the bounding-box
    center); all positions are snapped to the 100 m grid.

    Raises
    ------
    ParseError
        On an empty stream, mixed coordinate modes, or a timestamp before
        the epoch.
    """
    records = list(records)
    if not records:
        raise ParseError("empty dataset")
    modes = {r.geographic for r in records}
    if len(modes) > 1:
        raise ParseError("mixed coordinate modes in one dataset")
    geographic = modes.pop()
    if epoch is None:
        if any(not isinstance(r.timestamp, datetime) for r in records):
            epoch = datetime(1970, 1, 1)
        else:
            epoch = default_epoch(records)
    if geographic and spec is None:
        spec = ProjectionSpec.centered_on(records)

    grouped: dict[str, list[tuple[float, float, int]]] = defaultdict(list)
    for r in records:
        if geographic:
            try:
                x, y = project(r.lat, r.lon, spec)
            except ProjectionError as exc:
                raise ParseError(str(exc), r.line) from None
        else:
            x, y = r.x, r.y
        x, y = snap_to_grid(x, y, BASE_CELL_M)
        grouped[r.pseudo_id].append((x, y, _minutes(r.timestamp, epoch, r.line)))

    users = [Fingerprint.from_samples(pid, grouped[pid]) for pid in sorted(grouped)]
    meta = {"projection": spec.as_dict()} if geographic else {}
    return Dataset(users, epoch, BASE_CELL_M, BASE_BIN_MIN, meta)


def ingest_csv(path, spec: ProjectionSpec | None = None, epoch: datetime | None = None,
               epoch_minutes: bool = False) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        return ingest(read_records(fh, epoch_minutes), spec, epoch)


def filter_daily_activity(d: Dataset, window_days: int) -> Dataset:
    """Keep users with at least one sample in every day of the window.

    Days are the epoch-aligned intervals [1440 i, 1440 (i + 1)).
    """
    if window_days < 1:
        raise ValueError("window_days must be >= 1")
    kept = []
    for u in d.users:
        days = np.unique(u.t // MINUTES_PER_DAY)
        days = days[(days >= 0) & (days < window_days)]
        if days.size == window_days:
            kept.append(u)
    return d.replace(users=kept)


def epoch_plus(epoch: datetime, minutes: int) -> datetime:
    return epoch + timedelta(minutes=int(minutes))
