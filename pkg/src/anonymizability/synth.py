"""Synthetic anchor-based mobility populations.

Users live on a small shared pool of places (homes, offices, venues) and
follow one of a few weekly routine templates, so spatial fingerprints are
alike across users.  Temporal diversity comes from per-event Gaussian
jitter plus, for a fraction of events, a heavy-tailed (Lomax) time offset.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from datetime import datetime

import numpy as np

from .ingest import MINUTES_PER_DAY, snap_array
from .model import BASE_BIN_MIN, BASE_CELL_M, Dataset, Fingerprint

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence(seed).spawn(n_users + 1)"
SYNTH_EPOCH = datetime(2013, 12, 2)  # a Monday
WEEK = 7


@dataclass(frozen=True)
class PopulationSpec:
    n_users: int = 1000
    days: int = 14
    region_extent_m: float = 20_000.0
    anchors_per_user: int = 3
    events_per_day: float = 5.0
    temporal_jitter_min: float = 30.0
    temporal_tail_shape: float = 1.0
    tail_fraction: float = 0.2
    seed: int = 0
    anchor_pool: int = 10
    routines: int = 4
    tail_scale_min: float = 60.0

    def __post_init__(self):
        for name in ("n_users", "days", "anchors_per_user", "anchor_pool", "routines"):
            if int(getattr(self, name)) != getattr(self, name) or getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.events_per_day <= 0:
            raise ValueError("events_per_day must be positive")
        if not 0.0 <= self.tail_fraction <= 1.0:
            raise ValueError("tail_fraction must lie in [0, 1]")
        if self.region_extent_m < BASE_CELL_M:
            raise ValueError(f"region_extent_m must be >= {BASE_CELL_M}")
        if self.temporal_jitter_min < 0 or self.tail_scale_min < 0:
            raise ValueError("temporal scales must be non-negative")
        if self.temporal_tail_shape <= 0:
            raise ValueError("temporal_tail_shape must be positive")
        if self.anchors_per_user > self.anchor_pool:
            raise ValueError("anchors_per_user exceeds anchor_pool")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def _slot_for(minute: int, n_anchors: int, rng) -> int:
    # home at night, work during office hours, anything else in between
    hour = minute // 60
    if hour < 8 or hour >= 20 or n_anchors == 1:
        return 0
    if 9 <= hour < 17 or n_anchors == 2:
        return 1 if n_anchors > 1 else 0
    return int(rng.integers(0, n_anchors))


def _templates(spec: PopulationSpec, rng) -> list[list[list[tuple[int, int]]]]:
    """Weekly routines: template -> weekday -> [(minute of day, anchor slot)]."""
    out = []
    for _ in range(spec.routines):
        week = []
        for _ in range(WEEK):
            n = max(1, int(rng.poisson(spec.events_per_day)))
            # daytime-heavy event times (mixture centered on morning, midday, evening)
            centers = rng.choice([480, 750, 1110], size=n)
            minutes = np.clip(np.rint(centers + rng.normal(0, 150, size=n)), 0, MINUTES_PER_DAY - 1).astype(int)
            minutes.sort()
            week.append([(int(m), _slot_for(int(m), spec.anchors_per_user, rng)) for m in minutes])
        out.append(week)
    return out


def generate(spec: PopulationSpec) -> Dataset:
    """Deterministic synthetic population for ``spec``.

    Every user has at least one event per day, so the result survives the
    daily-activity filter over ``spec.days``.
    """
    children = np.random.SeedSequence(spec.seed).spawn(spec.n_users + 1)
    shared = np.random.Generator(np.random.PCG64(children[0]))
    pool = snap_array(shared.uniform(0, spec.region_extent_m, size=(spec.anchor_pool, 2)), BASE_CELL_M)
    templates = _templates(spec, shared)
    width = len(str(spec.n_users - 1))

    users = []
    for i in range(spec.n_users):
        rng = np.random.Generator(np.random.PCG64(children[i + 1]))
        routine = templates[int(rng.integers(0, spec.routines))]
        anchors = pool[rng.choice(spec.anchor_pool, size=spec.anchors_per_user, replace=False)]
        xs, ys, ts = [], [], []
        for day in range(spec.days):
            events = routine[day % WEEK]
            n = len(events)
            base = np.array([m for m, _ in events], dtype=np.float64)
            slots = np.array([s for _, s in events], dtype=np.int64)
            offset = rng.normal(0.0, 1.0, size=n) * spec.temporal_jitter_min
            heavy = rng.random(n) < spec.tail_fraction
            tail = rng.pareto(spec.temporal_tail_shape, size=n) * spec.tail_scale_min
            sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
            offset = offset + np.where(heavy, sign * tail, 0.0)
            # wrap within the day, keeping one event per day guaranteed
            tod = np.mod(np.rint(base + offset), MINUTES_PER_DAY).astype(np.int64)
            xs.append(anchors[slots, 0])
            ys.append(anchors[slots, 1])
            ts.append(day * MINUTES_PER_DAY + tod)
        users.append(
            Fingerprint.from_arrays(f"u{i:0{width}d}", np.concatenate(xs), np.concatenate(ys), np.concatenate(ts))
        )
    meta = {"generator": {"rng": RNG_ALGORITHM, "spec": spec.as_dict()}}
    return Dataset(users, SYNTH_EPOCH, BASE_CELL_M, BASE_BIN_MIN, meta)


def plant_duplicates(d: Dataset, group_size: int, groups: int, seed: int = 0) -> Dataset:
    """Copy leaders' fingerprints onto other users to form exact cliques.

    ``groups`` disjoint sets of ``group_size`` users are drawn; within each
    set every member receives the first member's samples.
    """
    if groups < 0 or group_size < 1:
        raise ValueError("groups must be >= 0 and group_size >= 1")
    if groups * group_size > len(d):
        raise ValueError(f"cannot plant {groups} groups of {group_size} in {len(d)} users")
    if groups == 0:
        return d.replace()
    rng = np.random.default_rng(seed)
    ids = sorted(d.ids)
    chosen = rng.choice(len(ids), size=groups * group_size, replace=False)
    by_id = {u.pseudo_id: u for u in d.users}
    replaced = {}
    for g in range(groups):
        members = [ids[j] for j in chosen[g * group_size : (g + 1) * group_size]]
        leader = by_id[members[0]]
        for m in members[1:]:
            replaced[m] = Fingerprint(m, leader.x, leader.y, leader.t)
    users = [replaced.get(u.pseudo_id, u) for u in d.users]
    return d.replace(users=users)
