"""Spatiotemporal generalization of fingerprints on nested regular grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anonymity import anonymizability, count_k_anonymous
from .ingest import snap_array
from .model import Dataset, DistanceParams, Fingerprint


class GranularityError(ValueError):
    pass


def _check_multiple(new: int, current: int, what: str):
    if int(new) != new or new < current or new % current:
        raise GranularityError(f"{what} {new} is not an integer multiple of the current {current}")


def aggregate(d: Dataset, cell_side: int, bin_width: int) -> Dataset:
    """Coarsen every fingerprint to ``cell_side`` meter cells and ``bin_width`` minute bins.

    Positions move to cell centers and timestamps to the bin midpoint
    (floored to the minute); repeated samples within a fingerprint collapse.
    Requesting the dataset's current granularity returns it unchanged.
    """
    _check_multiple(cell_side, d.spatial_granularity_m, "cell side")
    _check_multiple(bin_width, d.temporal_granularity_min, "bin width")
    cell_side, bin_width = int(cell_side), int(bin_width)
    if (cell_side, bin_width) == (d.spatial_granularity_m, d.temporal_granularity_min):
        return d.replace()
    users = []
    for u in d.users:
        x = snap_array(u.x, cell_side)
        y = snap_array(u.y, cell_side)
        t = (u.t // bin_width) * bin_width + bin_width // 2
        triples = np.unique(np.column_stack([t.astype(np.float64), x, y]), axis=0)
        users.append(Fingerprint(u.pseudo_id, triples[:, 1], triples[:, 2], triples[:, 0].astype(np.int64)))
    return d.replace(users=users, spatial_granularity_m=cell_side, temporal_granularity_min=bin_width)


@dataclass(frozen=True)
class LevelSummary:
    cell_side: int
    bin_width: int
    k: int
    deltas: dict[str, float]
    count_k_anonymous: int
    fraction_k_anonymous: float

    @property
    def label(self) -> str:
        return f"{self.cell_side}x{self.bin_width}"

    @property
    def median_delta(self) -> float:
        return float(np.median(list(self.deltas.values())))


def aggregation_sweep(
    d: Dataset, levels, k: int = 2, p: DistanceParams | None = None
) -> list[LevelSummary]:
    """Evaluate each (cell_side, bin_width) level independently from ``d``."""
    levels = list(levels)
    for c, b in levels:
        _check_multiple(c, d.spatial_granularity_m, "cell side")
        _check_multiple(b, d.temporal_granularity_min, "bin width")
    out = []
    for c, b in levels:
        g = aggregate(d, c, b)
        rep = anonymizability(g, k, p)
        count, frac = count_k_anonymous(g, k)
        out.append(LevelSummary(int(c), int(b), k, rep.deltas(), count, frac))
    return out
