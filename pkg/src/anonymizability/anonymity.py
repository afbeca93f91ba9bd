"""Anonymizability measure, exact k-anonymity, and component decomposition."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from . import _kernels
from .distance import Packed
from .model import (
    AnonymizabilityReport,
    Dataset,
    DistanceParams,
    UserAnonymizability,
    exact_mean,
)


class PopulationTooSmall(ValueError):
    pass


def _candidate_order(packed: Packed, p: DistanceParams) -> np.ndarray:
    # cheap centroid proxy: visit likely neighbors first so the bound tightens early
    n = len(packed)
    mx = np.add.reduceat(packed.xs, packed.offsets[:-1]) / np.diff(packed.offsets)
    my = np.add.reduceat(packed.ys, packed.offsets[:-1]) / np.diff(packed.offsets)
    mt = np.add.reduceat(packed.ts, packed.offsets[:-1]) / np.diff(packed.offsets)
    order = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        proxy = p.w_s * (np.abs(mx - mx[a]) + np.abs(my - my[a])) / p.delta_max_s
        proxy += p.w_t * np.abs(mt - mt[a]) / p.delta_max_t
        order[a] = np.argsort(proxy, kind="stable")
    return order


def nearest_neighbors(
    d: Dataset, k: int, p: DistanceParams | None = None, method: str = "pruned"
) -> tuple[Packed, np.ndarray, np.ndarray]:
    """Indices and distances of the k-1 nearest users of every user.

    ``method`` is ``"pruned"`` (early-exit search) or ``"exhaustive"``
    (full distance matrix); both return identical results.  Users are
    indexed in pseudo_id order.
    """
    p = p or DistanceParams()
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if len(d) < k:
        raise PopulationTooSmall(f"population too small: {len(d)} users for k={k}")
    packed = Packed.from_dataset(d)
    if len(set(packed.ids)) != len(packed.ids):
        raise ValueError("duplicate pseudo_id in dataset")
    m = k - 1
    args = (p.w_s, p.w_t, p.delta_max_s, p.delta_max_t)
    if method == "pruned":
        order = _candidate_order(packed, p)
        idx, dist = _kernels.knn_pruned(packed.xs, packed.ys, packed.ts, packed.offsets, m, order, *args)
    elif method == "exhaustive":
        full = _kernels.all_pairs(packed.xs, packed.ys, packed.ts, packed.offsets, *args)
        n = len(packed)
        idx = np.empty((n, m), dtype=np.int64)
        dist = np.empty((n, m))
        others = np.arange(n)
        for a in range(n):
            row = full[a].copy()
            row[a] = np.inf
            # lexsort: last key is primary -> delta, then index
            sel = np.lexsort((others, row))[:m]
            idx[a] = sel
            dist[a] = row[sel]
    else:
        raise ValueError(f"unknown method {method!r}")
    return packed, idx, dist


def anonymizability(
    d: Dataset, k: int = 2, p: DistanceParams | None = None, method: str = "pruned"
) -> AnonymizabilityReport:
    """Mean fingerprint distance from each user to its k-1 nearest users.

    Besides the measure itself, the report keeps the spatial and temporal
    terms of every matched sample pair with the selected neighbors, pooled
    across neighbors.

    Raises
    ------
    PopulationTooSmall
        If the dataset has fewer than ``k`` users.
    """
    p = p or DistanceParams()
    packed, idx, dist = nearest_neighbors(d, k, p, method)
    per_user = {}
    for a, owner in enumerate(packed.ids):
        sps, tps, counts = [], [], []
        for b in idx[a]:
            sp, tp, _, _ = packed.matches(a, int(b), p)
            sps.append(sp)
            tps.append(tp)
            counts.append(len(sp))
        per_user[owner] = UserAnonymizability(
            delta_k=exact_mean(dist[a].tolist()),
            neighbor_ids=tuple(packed.ids[int(b)] for b in idx[a]),
            neighbor_deltas=tuple(float(v) for v in dist[a]),
            spatial_components=np.concatenate(sps),
            temporal_components=np.concatenate(tps),
            match_counts=tuple(counts),
        )
    return AnonymizabilityReport(k=k, params=p, per_user=per_user)


def recompute_delta(rec: UserAnonymizability) -> float:
    """Rebuild delta_k from the stored components (consistency check)."""
    deltas = []
    start = 0
    for c in rec.match_counts:
        acc = 0.0
        for s, t in zip(rec.spatial_components[start : start + c], rec.temporal_components[start : start + c]):
            acc += s + t
        deltas.append(acc / c)
        start += c
    return exact_mean(deltas)


def is_k_anonymous(d: Dataset, a: str, k: int) -> bool:
    """True iff at least k-1 other users have exactly a's set of distinct samples."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    target = d.get(a).sample_set()
    twins = sum(1 for u in d.users if u.pseudo_id != a and u.sample_set() == target)
    return twins >= k - 1


def count_k_anonymous(d: Dataset, k: int) -> tuple[int, float]:
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    sets = [u.sample_set() for u in d.users]
    sizes = Counter(sets)
    count = sum(1 for s in sets if sizes[s] >= k)
    return count, (count / len(sets) if sets else 0.0)


def temporal_spatial_ratio(r: AnonymizabilityReport, a: str) -> float:
    rec = r.per_user[a]
    s = math.fsum(rec.spatial_components.tolist())
    t = math.fsum(rec.temporal_components.tolist())
    if s == 0.0:
        return math.inf if t > 0 else 0.0
    return t / s
