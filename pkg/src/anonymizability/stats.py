"""Empirical distribution tools: ECDF, quantiles, Gini, Tail weight index."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SMALL_SAMPLE = 100


class UndefinedStatistic(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Ecdf:
    sorted_values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.sorted_values, dtype=np.float64).reshape(-1))
        if v.size == 0:
            raise ValueError("ECDF of an empty sample")
        v.setflags(write=False)
        object.__setattr__(self, "sorted_values", v)

    @property
    def n(self) -> int:
        return self.sorted_values.size

    def __call__(self, x: float) -> float:
        return np.searchsorted(self.sorted_values, x, side="right") / self.n


def ecdf_inverse(e: Ecdf, p: float) -> float:
    """Lower empirical quantile: smallest value whose ECDF reaches ``p``."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"probability must lie in (0, 1], got {p}")
    # smallest rank r with r/n >= p; p*n may round across an integer, so settle it exactly
    r = min(max(math.ceil(p * e.n), 1), e.n)
    while r > 1 and (r - 1) / e.n >= p:
        r -= 1
    while r / e.n < p:
        r += 1
    return float(e.sorted_values[r - 1])


# Acklam's rational approximation to the standard normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    if p > 1.0 - _P_LOW:
        return -_acklam(1.0 - p)
    q = p - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
        ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    )


def inverse_normal_cdf(p: float) -> float:
    """Standard normal quantile, accurate to ~1e-15 relative.

    Acklam's approximation (relative error 1.15e-9) followed by one Halley
    step against the erfc-based CDF.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    # refine the lower-tail value and mirror, which keeps the result antisymmetric
    lower = p if p < 0.5 else 1.0 - p
    x = _acklam(lower)
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - lower
    u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    x = x - u / (1.0 + 0.5 * x * u)
    return x if p < 0.5 else -x


def gini(values) -> float:
    """Gini coefficient of a multiset of non-negative values.

    Evaluates ``1 - (2 * sum(i * s_i) + sum(s_i)) / (N * sum(s_i))`` with
    the values sorted in descending order and ``i`` counted from zero, which
    is the usual population Gini.

    Raises
    ------
    UndefinedStatistic
        For an empty or all-zero input.
    """
    s = np.asarray(values, dtype=np.float64).reshape(-1)
    if s.size == 0:
        raise UndefinedStatistic("undefined Gini: empty input")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise ValueError("Gini requires finite non-negative values")
    total = math.fsum(s.tolist())
    if total <= 0:
        raise UndefinedStatistic("undefined Gini: all values are zero")
    desc = np.sort(s)[::-1]
    n = desc.size
    weighted = math.fsum((np.arange(n, dtype=np.float64) * desc).tolist())
    return 1.0 - (2.0 * weighted + total) / (n * total)


# (Phi^-1(0.75) - Phi^-1(0.5)) / (Phi^-1(0.99) - Phi^-1(0.5))
def _normal_tail_factor() -> float:
    return (inverse_normal_cdf(0.75) - 0.0) / (inverse_normal_cdf(0.99) - 0.0)


NORMAL_TAIL_FACTOR = _normal_tail_factor()


class TailWeight(NamedTuple):
    value: float
    small_sample: bool


def tail_weight(e: Ecdf) -> float:
    """Tail weight index of an empirical distribution.

    Ratio of the 99th-to-median and 75th-to-median quantile gaps, scaled so
    that a normal distribution scores 1.

    Raises
    ------
    UndefinedStatistic
        If the 75th percentile equals the median.
    """
    med = ecdf_inverse(e, 0.5)
    q75 = ecdf_inverse(e, 0.75)
    q99 = ecdf_inverse(e, 0.99)
    if q75 == med:
        raise UndefinedStatistic("degenerate interquartile tail")
    return (q99 - med) / (q75 - med) * NORMAL_TAIL_FACTOR


def tail_weight_flagged(values) -> TailWeight:
    e = Ecdf(values)
    return TailWeight(tail_weight(e), e.n < SMALL_SAMPLE)


def cdf_table(values, points: int | None = None) -> list[tuple[float, float]]:
    """Rank-spaced (value, cumulative probability) pairs for plotting.

    Pair ``j`` (1-based) sits at rank ``ceil(j * n / points)``, so the last
    pair is always the maximum with probability 1.  ``points`` defaults to
    the sample size, i.e. the full step function.
    """
    e = Ecdf(values)
    n = e.n
    points = n if points is None else points
    if points < 2:
        raise ValueError("points must be >= 2")
    out = []
    for j in range(1, points + 1):
        r = -(-j * n // points)
        out.append((float(e.sorted_values[r - 1]), r / n))
    return out
