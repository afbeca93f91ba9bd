"""Compiled inner loops for fingerprint distances and nearest-user search.

Fingerprints are packed into flat ``xs, ys, ts`` arrays with an ``offsets``
index (user ``i`` owns ``offsets[i]:offsets[i+1]``).  Every routine here
evaluates sample distances and sums minima in the same order, so any two
paths that complete a pair produce bit-identical deltas.
"""

import numpy as np
from numba import config, njit, prange

# the bundled TBB is often too old; pick a layer that never warns
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@njit(cache=True, inline="always")
def _sample_terms(xa, ya, ta, xb, yb, tb, ws, wt, dms, dmt):
    dist = abs(xa - xb) + abs(ya - yb)
    ds = dist / dms if dist <= dms else 1.0
    dtm = abs(ta - tb)
    dt = dtm / dmt if dtm <= dmt else 1.0
    return ws * ds, wt * dt


@njit(cache=True)
def _lex_le(xs, ys, ts, oa, ob, n):
    # (t, x, y) lexicographic comparison of two equal-length sample runs
    for h in range(n):
        a = oa + h
        b = ob + h
        if ts[a] != ts[b]:
            return ts[a] < ts[b]
        if xs[a] != xs[b]:
            return xs[a] < xs[b]
        if ys[a] != ys[b]:
            return ys[a] < ys[b]
    return True


@njit(cache=True)
def orient(xs, ys, ts, oa, na, ob, nb):
    """Return (oL, nL, oS, nS): the fingerprint iterated over comes first.

    The longer fingerprint is iterated; equal lengths fall back to a
    content-based order so that the result does not depend on argument order.
    """
    if na > nb:
        return oa, na, ob, nb
    if nb > na:
        return ob, nb, oa, na
    if _lex_le(xs, ys, ts, oa, ob, na):
        return oa, na, ob, nb
    return ob, nb, oa, na


@njit(cache=True)
def pair_delta(xs, ys, ts, oa, na, ob, nb, ws, wt, dms, dmt, bound):
    """Fingerprint distance between two packed users.

    Returns ``inf`` as soon as the running mean of minima (a lower bound on
    the final value) strictly exceeds ``bound``.
    """
    oL, nL, oS, nS = orient(xs, ys, ts, oa, na, ob, nb)
    acc = 0.0
    for h in range(nL):
        i = oL + h
        best = np.inf
        for q in range(nS):
            j = oS + q
            sp, tp = _sample_terms(xs[i], ys[i], ts[i], xs[j], ys[j], ts[j], ws, wt, dms, dmt)
            tot = sp + tp
            if tot < best:
                best = tot
        acc += best
        if acc / nL > bound:
            return np.inf
    return acc / nL


@njit(cache=True)
def pair_matches(xs, ys, ts, oa, na, ob, nb, ws, wt, dms, dmt):
    """Winning spatial/temporal terms for each sample of the iterated fingerprint.

    Equidistant candidates resolve to the smallest index in the shorter one.
    Returns (spatial, temporal, match_index, a_is_iterated).
    """
    oL, nL, oS, nS = orient(xs, ys, ts, oa, na, ob, nb)
    sp_out = np.empty(nL)
    tp_out = np.empty(nL)
    idx = np.empty(nL, dtype=np.int64)
    for h in range(nL):
        i = oL + h
        best = np.inf
        bs = 0.0
        bt = 0.0
        bq = 0
        for q in range(nS):
            j = oS + q
            sp, tp = _sample_terms(xs[i], ys[i], ts[i], xs[j], ys[j], ts[j], ws, wt, dms, dmt)
            tot = sp + tp
            if tot < best:
                best = tot
                bs = sp
                bt = tp
                bq = q
        sp_out[h] = bs
        tp_out[h] = bt
        idx[h] = bq
    return sp_out, tp_out, idx, oL == oa and nL == na


@njit(cache=True, parallel=True)
def all_pairs(xs, ys, ts, offsets, ws, wt, dms, dmt):
    """Full symmetric matrix of fingerprint distances (diagonal = 0)."""
    n = offsets.shape[0] - 1
    out = np.zeros((n, n))
    for a in prange(n):
        oa = offsets[a]
        na = offsets[a + 1] - oa
        for b in range(a + 1, n):
            ob = offsets[b]
            nb = offsets[b + 1] - ob
            d = pair_delta(xs, ys, ts, oa, na, ob, nb, ws, wt, dms, dmt, np.inf)
            out[a, b] = d
            out[b, a] = d
    return out


@njit(cache=True, parallel=True)
def knn_pruned(xs, ys, ts, offsets, m, order, ws, wt, dms, dmt):
    """Exact ``m`` nearest users of every user, with early-exit pruning.

    ``order[a]`` lists the candidates for user ``a`` in the sequence they are
    tried; a good order only speeds things up.  Users are indexed in
    pseudo_id order, so the index tie-break is the lexicographic one.
    """
    n = offsets.shape[0] - 1
    nb_idx = np.full((n, m), -1, dtype=np.int64)
    nb_d = np.full((n, m), np.inf)
    for a in prange(n):
        oa = offsets[a]
        na = offsets[a + 1] - oa
        best_d = np.full(m, np.inf)
        best_j = np.full(m, n, dtype=np.int64)
        filled = 0
        for c in range(order.shape[1]):
            b = order[a, c]
            if b == a:
                continue
            ob = offsets[b]
            nb = offsets[b + 1] - ob
            bound = best_d[m - 1] if filled == m else np.inf
            d = pair_delta(xs, ys, ts, oa, na, ob, nb, ws, wt, dms, dmt, bound)
            if filled == m:
                if d > best_d[m - 1] or (d == best_d[m - 1] and b > best_j[m - 1]):
                    continue
                pos = m - 1
            else:
                pos = filled
                filled += 1
            while pos > 0 and (d < best_d[pos - 1] or (d == best_d[pos - 1] and b < best_j[pos - 1])):
                best_d[pos] = best_d[pos - 1]
                best_j[pos] = best_j[pos - 1]
                pos -= 1
            best_d[pos] = d
            best_j[pos] = b
        for q in range(m):
            nb_idx[a, q] = best_j[q]
            nb_d[a, q] = best_d[q]
    return nb_idx, nb_d
