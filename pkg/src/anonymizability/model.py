"""Domain types shared by every stage of the pipeline.

A :class:`Dataset` is a set of :class:`Fingerprint` objects, each one the
time-ordered sequence of spatiotemporal samples of one pseudo-identified
user.  Locations are planar meters, timestamps integer minutes since the
dataset epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, NamedTuple, Sequence

import numpy as np

BASE_CELL_M = 100
BASE_BIN_MIN = 1
DEFAULT_EPOCH = datetime(1970, 1, 1)


class Sample(NamedTuple):
    x: float
    y: float
    t: int


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Fingerprint:
    """The mobile traffic fingerprint of one user.

    Samples are held column-wise in read-only arrays.  The constructor does
    not reorder anything; use :meth:`from_samples` to get the canonical
    (t, x, y) ordering.
    """

    pseudo_id: str
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x, np.float64))
        object.__setattr__(self, "y", _frozen(self.y, np.float64))
        object.__setattr__(self, "t", _frozen(self.t, np.int64))
        if not (len(self.x) == len(self.y) == len(self.t)):
            raise ValueError(f"{self.pseudo_id}: coordinate arrays differ in length")

    @classmethod
    def from_samples(cls, pseudo_id: str, samples: Iterable) -> "Fingerprint":
        rows = sorted((int(s[2]), float(s[0]), float(s[1])) for s in samples)
        if not rows:
            return cls(pseudo_id, [], [], [])
        t, x, y = zip(*rows)
        return cls(pseudo_id, x, y, t)

    @classmethod
    def from_arrays(cls, pseudo_id: str, x, y, t) -> "Fingerprint":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        t = np.asarray(t, dtype=np.int64)
        order = np.lexsort((y, x, t))
        return cls(pseudo_id, x[order], y[order], t[order])

    def __len__(self) -> int:
        return len(self.t)

    @property
    def samples(self) -> tuple[Sample, ...]:
        return tuple(Sample(float(a), float(b), int(c)) for a, b, c in zip(self.x, self.y, self.t))

    def is_sorted(self) -> bool:
        keys = list(zip(self.t.tolist(), self.x.tolist(), self.y.tolist()))
        return all(keys[i] <= keys[i + 1] for i in range(len(keys) - 1))

    def sample_set(self) -> frozenset:
        """Distinct (x, y, t) triples; the basis of k-anonymity equality."""
        return frozenset(zip(self.x.tolist(), self.y.tolist(), self.t.tolist()))

    def __eq__(self, other):
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return (
            self.pseudo_id == other.pseudo_id
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.t, other.t)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Dataset:
    """A collection of fingerprints plus the granularity they are expressed in."""

    users: tuple[Fingerprint, ...]
    epoch: datetime = DEFAULT_EPOCH
    spatial_granularity_m: int = BASE_CELL_M
    temporal_granularity_min: int = BASE_BIN_MIN
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))

    def __len__(self) -> int:
        return len(self.users)

    def __iter__(self):
        return iter(self.users)

    @property
    def ids(self) -> list[str]:
        return [u.pseudo_id for u in self.users]

    def get(self, pseudo_id: str) -> Fingerprint:
        for u in self.users:
            if u.pseudo_id == pseudo_id:
                return u
        raise KeyError(f"unknown pseudo_id {pseudo_id!r}")

    def sorted_by_id(self) -> "Dataset":
        return self.replace(users=sorted(self.users, key=lambda u: u.pseudo_id))

    def replace(self, **changes) -> "Dataset":
        kw = dict(
            users=self.users,
            epoch=self.epoch,
            spatial_granularity_m=self.spatial_granularity_m,
            temporal_granularity_min=self.temporal_granularity_min,
            meta=dict(self.meta),
        )
        kw.update(changes)
        return Dataset(**kw)

    @property
    def n_samples(self) -> int:
        return sum(len(u) for u in self.users)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.epoch == other.epoch
            and self.spatial_granularity_m == other.spatial_granularity_m
            and self.temporal_granularity_min == other.temporal_granularity_min
            and self.users == other.users
        )

    __hash__ = None


@dataclass(frozen=True)
class DistanceParams:
    """Weights and saturation thresholds of the sample distance.

    Defaults weigh space and time equally and saturate at 20 km (Taxicab)
    and 8 hours.
    """

    w_s: float = 0.5
    w_t: float = 0.5
    delta_max_s: float = 20_000.0
    delta_max_t: float = 480.0

    def __post_init__(self):
        for name in ("w_s", "w_t", "delta_max_s", "delta_max_t"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.w_s < 0 or self.w_t < 0 or self.w_s + self.w_t <= 0:
            raise ValueError("weights must be non-negative with a positive sum")
        if self.delta_max_s <= 0 or self.delta_max_t <= 0:
            raise ValueError("saturation thresholds must be positive")

    def as_dict(self) -> dict:
        return {
            "w_s": self.w_s,
            "w_t": self.w_t,
            "delta_max_s_m": self.delta_max_s,
            "delta_max_t_min": self.delta_max_t,
        }


class Violation(NamedTuple):
    pseudo_id: str | None
    rule: str
    detail: str = ""


def validate_dataset(d: Dataset) -> list[Violation]:
    """Check every type invariant; one :class:`Violation` per breach."""
    out: list[Violation] = []
    if d.spatial_granularity_m < BASE_CELL_M:
        out.append(Violation(None, "spatial granularity", f"{d.spatial_granularity_m} < {BASE_CELL_M}"))
    if d.temporal_granularity_min < BASE_BIN_MIN:
        out.append(Violation(None, "temporal granularity", f"{d.temporal_granularity_min} < {BASE_BIN_MIN}"))
    seen: set[str] = set()
    for u in d.users:
        if u.pseudo_id in seen:
            out.append(Violation(u.pseudo_id, "duplicate id"))
        seen.add(u.pseudo_id)
        if len(u) == 0:
            out.append(Violation(u.pseudo_id, "empty fingerprint"))
            continue
        if not (np.all(np.isfinite(u.x)) and np.all(np.isfinite(u.y))):
            out.append(Violation(u.pseudo_id, "non-finite coordinate"))
        if np.any(u.t < 0):
            out.append(Violation(u.pseudo_id, "negative timestamp"))
        if not u.is_sorted():
            out.append(Violation(u.pseudo_id, "unsorted"))
    return out


@dataclass(frozen=True)
class NeighborSet:
    owner: str
    neighbors: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class UserAnonymizability:
    delta_k: float
    neighbor_ids: tuple[str, ...]
    neighbor_deltas: tuple[float, ...]
    spatial_components: np.ndarray
    temporal_components: np.ndarray
    # matched-sample count per neighbor, to split the pooled component arrays
    match_counts: tuple[int, ...]


@dataclass(frozen=True)
class AnonymizabilityReport:
    k: int
    params: DistanceParams
    per_user: dict[str, UserAnonymizability]

    def deltas(self) -> dict[str, float]:
        return {a: r.delta_k for a, r in self.per_user.items()}

    def neighbor_set(self, pseudo_id: str) -> NeighborSet:
        r = self.per_user[pseudo_id]
        return NeighborSet(pseudo_id, tuple(zip(r.neighbor_ids, r.neighbor_deltas)))


def exact_mean(values: Sequence[float]) -> float:
    """Correctly rounded arithmetic mean.

    Exact accumulation keeps the mean of the j smallest values
    non-decreasing in j, which plain float summation does not.
    """
    from fractions import Fraction

    if len(values) == 0:
        raise ValueError("mean of empty sequence")
    return float(sum(Fraction(v) for v in values) / len(values))
