import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anonymizability.distance import (
    fingerprint_distance,
    sample_distance,
    spatial_delta,
    temporal_delta,
)
from anonymizability.model import DistanceParams, Fingerprint, Sample

import oracles

P = DistanceParams()


def fp(samples, pid="x"):
    return Fingerprint.from_samples(pid, samples)


def test_spatial_delta_examples():
    assert spatial_delta(Sample(5, 5, 0), Sample(5, 5, 9), P) == 0
    assert spatial_delta(Sample(0, 0, 0), Sample(12000, 8000, 0), P) == 1.0
    assert spatial_delta(Sample(0, 0, 0), Sample(3000, 4000, 0), P) == pytest.approx(0.35)
    assert spatial_delta(Sample(0, 0, 0), Sample(1e6, 0, 0), P) == 1.0


def test_temporal_delta_examples():
    assert temporal_delta(Sample(0, 0, 7), Sample(1, 1, 7), P) == 0
    assert temporal_delta(Sample(0, 0, 0), Sample(0, 0, 480), P) == 1.0
    assert temporal_delta(Sample(0, 0, 600), Sample(0, 0, 480), P) == 0.25
    assert temporal_delta(Sample(0, 0, 0), Sample(0, 0, 5000), P) == 1.0


def test_sample_distance_examples():
    b = sample_distance(Sample(1, 2, 3), Sample(1, 2, 3), P)
    assert (b.spatial, b.temporal, b.total) == (0, 0, 0)
    # delta_s = 0.35, delta_t = 0.5
    b = sample_distance(Sample(0, 0, 0), Sample(3000, 4000, 240), P)
    assert (b.spatial, b.temporal, b.total) == pytest.approx((0.175, 0.25, 0.425))
    assert sample_distance(Sample(0, 0, 0), Sample(50000, 0, 2000), P).total == 1.0


def test_fingerprint_distance_identity():
    A = fp([(0, 0, 0), (100, 200, 50), (300, 0, 900)])
    assert fingerprint_distance(A, A, P)[0] == 0.0


def test_fingerprint_distance_worked_example():
    A = fp([(0, 0, 0)])
    B = fp([(1000, 0, 0), (0, 0, 60)])
    delta, matched = fingerprint_distance(A, B, P)
    assert delta == 0.04375  # brute-force oracle
    assert [(m.spatial, m.temporal) for m in matched] == [(0.025, 0.0), (0.0, 0.0625)]


def test_fingerprint_distance_saturated():
    A = fp([(0, 0, 0)])
    B = fp([(30000, 0, 1000), (0, 40000, 3000)])
    assert fingerprint_distance(A, B, P)[0] == 1.0


def test_empty_fingerprint_rejected():
    with pytest.raises(ValueError):
        fingerprint_distance(fp([]), fp([(0, 0, 0)]), P)


def test_tie_break_prefers_smaller_index():
    # both samples of the shorter fingerprint are 0.025 away from (0, 0, 0)
    L = fp([(0, 0, 0), (0, 0, 5000), (0, 0, 9000)])
    S = fp([(-1000, 0, 0), (1000, 0, 0)])
    _, matched = fingerprint_distance(L, S, P)
    assert matched[0].spatial == 0.025


samples = st.tuples(
    st.integers(-300, 300).map(lambda v: v * 100.0 + 50),
    st.integers(-300, 300).map(lambda v: v * 100.0 + 50),
    st.integers(0, 3000),
)
fingerprints = st.lists(samples, min_size=1, max_size=8)
weights = st.sampled_from([(0.5, 0.5), (1.0, 1.0), (0.2, 0.8), (1.0, 0.0)])


@settings(max_examples=300, deadline=None)
@given(fingerprints, fingerprints, weights)
def test_properties_against_brute_force(a, b, w):
    p = DistanceParams(w_s=w[0], w_t=w[1])
    A, B = fp(a, "a"), fp(b, "b")
    d_ab, matched = fingerprint_distance(A, B, p)
    d_ba, _ = fingerprint_distance(B, A, p)
    assert d_ab == d_ba
    assert d_ab == oracles.fingerprint_distance(A.samples, B.samples, ws=w[0], wt=w[1])
    assert 0.0 <= d_ab <= p.w_s + p.w_t
    assert len(matched) == max(len(A), len(B))
    assert d_ab == pytest.approx(np.mean([m.total for m in matched]), abs=1e-12)
    for m in matched:
        assert 0 <= m.spatial <= p.w_s and 0 <= m.temporal <= p.w_t
