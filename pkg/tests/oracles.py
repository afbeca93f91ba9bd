"""Independent brute-force references used to freeze and cross-check values."""

import itertools
import math


def sample_terms(a, b, ws=0.5, wt=0.5, dms=20000.0, dmt=480.0):
    taxi = abs(a[0] - b[0]) + abs(a[1] - b[1])
    dt = abs(a[2] - b[2])
    return ws * (taxi / dms if taxi <= dms else 1.0), wt * (dt / dmt if dt <= dmt else 1.0)


def _key(fp):
    return [(s[2], s[0], s[1]) for s in fp]


def fingerprint_distance(A, B, **params):
    """Full |L| x |S| matrix, then row minima averaged."""
    if len(A) > len(B) or (len(A) == len(B) and _key(A) <= _key(B)):
        L, S = A, B
    else:
        L, S = B, A
    matrix = [[sum(sample_terms(l, s, **params)) for s in S] for l in L]
    acc = 0.0
    for row in matrix:
        acc += min(row)
    return acc / len(L)


def anonymizability(users, k, **params):
    """users: {id: [(x, y, t), ...]} -> {id: delta_k} via the full distance table."""
    from fractions import Fraction

    ids = sorted(users)
    table = {(a, b): fingerprint_distance(users[a], users[b], **params) for a, b in itertools.permutations(ids, 2)}
    out = {}
    for a in ids:
        ranked = sorted((table[a, b], b) for b in ids if b != a)[: k - 1]
        out[a] = float(sum(Fraction(d) for d, _ in ranked) / (k - 1))
    return out


def gini_mad(values):
    """Mean absolute difference over all ordered pairs / (2 * mean)."""
    n = len(values)
    mean = math.fsum(values) / n
    return math.fsum(abs(a - b) for a in values for b in values) / (2 * n * n * mean)


def lat_lon_rectangle_area(lat1, lat2, lon1, lon2, radius):
    """Exact spherical area between two parallels and two meridians."""
    return radius**2 * math.radians(lon2 - lon1) * (math.sin(math.radians(lat2)) - math.sin(math.radians(lat1)))
