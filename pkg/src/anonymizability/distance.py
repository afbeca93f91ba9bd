"""Sample and fingerprint distances.

The sample distance is a weighted sum of a saturated Taxicab distance and a
saturated absolute time difference.  The fingerprint distance averages, over
the samples of the longer fingerprint, the distance to the closest sample of
the shorter one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import Dataset, DistanceParams, Fingerprint, Sample


@dataclass(frozen=True)
class SampleDistanceBreakdown:
    spatial: float
    temporal: float

    @property
    def total(self) -> float:
        return self.spatial + self.temporal


def spatial_delta(a: Sample, b: Sample, p: DistanceParams) -> float:
    dist = abs(a[0] - b[0]) + abs(a[1] - b[1])
    return dist / p.delta_max_s if dist <= p.delta_max_s else 1.0


def temporal_delta(a: Sample, b: Sample, p: DistanceParams) -> float:
    dt = abs(float(a[2]) - float(b[2]))
    return dt / p.delta_max_t if dt <= p.delta_max_t else 1.0


def sample_distance(a: Sample, b: Sample, p: DistanceParams) -> SampleDistanceBreakdown:
    return SampleDistanceBreakdown(p.w_s * spatial_delta(a, b, p), p.w_t * temporal_delta(a, b, p))


class Packed:
    """Flat column arrays for a list of fingerprints (kernel input)."""

    def __init__(self, fingerprints):
        fingerprints = list(fingerprints)
        lengths = np.array([len(f) for f in fingerprints], dtype=np.int64)
        if np.any(lengths == 0):
            bad = [f.pseudo_id for f in fingerprints if len(f) == 0]
            raise ValueError(f"empty fingerprint: {bad[0]}")
        self.ids = [f.pseudo_id for f in fingerprints]
        self.offsets = np.zeros(len(fingerprints) + 1, dtype=np.int64)
        np.cumsum(lengths, out=self.offsets[1:])
        if fingerprints:
            self.xs = np.concatenate([f.x for f in fingerprints])
            self.ys = np.concatenate([f.y for f in fingerprints])
            self.ts = np.concatenate([f.t for f in fingerprints]).astype(np.float64)
        else:
            self.xs = self.ys = self.ts = np.empty(0)

    @classmethod
    def from_dataset(cls, d: Dataset) -> "Packed":
        return cls(sorted(d.users, key=lambda u: u.pseudo_id))

    def __len__(self):
        return len(self.ids)

    def span(self, i: int) -> tuple[int, int]:
        return int(self.offsets[i]), int(self.offsets[i + 1] - self.offsets[i])

    def delta(self, a: int, b: int, p: DistanceParams, bound: float = np.inf) -> float:
        oa, na = self.span(a)
        ob, nb = self.span(b)
        return _kernels.pair_delta(
            self.xs, self.ys, self.ts, oa, na, ob, nb, p.w_s, p.w_t, p.delta_max_s, p.delta_max_t, bound
        )

    def matches(self, a: int, b: int, p: DistanceParams):
        oa, na = self.span(a)
        ob, nb = self.span(b)
        return _kernels.pair_matches(
            self.xs, self.ys, self.ts, oa, na, ob, nb, p.w_s, p.w_t, p.delta_max_s, p.delta_max_t
        )


def fingerprint_distance(
    A: Fingerprint, B: Fingerprint, p: DistanceParams | None = None
) -> tuple[float, list[SampleDistanceBreakdown]]:
    """Distance between two fingerprints and the per-sample winning matches.

    The breakdowns follow the sample order of the iterated (longer)
    fingerprint.  When both have the same length the iterated one is chosen
    by content, which keeps the result independent of argument order.

    Raises
    ------
    ValueError
        If either fingerprint is empty.
    """
    p = p or DistanceParams()
    if len(A) == 0 or len(B) == 0:
        raise ValueError("fingerprint distance of an empty fingerprint")
    packed = Packed([A, B])
    sp, tp, _, _ = packed.matches(0, 1, p)
    delta = packed.delta(0, 1, p)
    return float(delta), [SampleDistanceBreakdown(float(s), float(t)) for s, t in zip(sp, tp)]


def distance_matrix(d: Dataset, p: DistanceParams | None = None) -> tuple[list[str], np.ndarray]:
    """All-pairs fingerprint distances, rows/columns in pseudo_id order."""
    p = p or DistanceParams()
    packed = Packed.from_dataset(d)
    m = _kernels.all_pairs(
        packed.xs, packed.ys, packed.ts, packed.offsets, p.w_s, p.w_t, p.delta_max_s, p.delta_max_t
    )
    return packed.ids, m
