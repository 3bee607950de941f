"""U-empirical distribution function of pairwise ratios and the W / D statistics.

Under exponentiality the ratio X_i / X_j of two observations follows the
Fisher F(2, 2) law with cdf t / (1 + t). ``H_n`` is the U-statistic
estimate of that cdf built from all ordered pairs of the sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import scaled_e1


class SampleError(ValueError):
    """Raised for samples that cannot be used by the ratio statistics."""


class Sample:
    """A validated vector of strictly positive, finite observations (n >= 2)."""

    __slots__ = ("_values",)

    def __init__(self, values):
        if isinstance(values, Sample):
            self._values = values._values
            return
        arr = np.array(values, dtype=float).ravel()
        if arr.size < 2:
            raise SampleError(f"need at least 2 observations, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise SampleError("observations must be finite")
        if np.any(arr <= 0):
            bad = int(np.flatnonzero(arr <= 0)[0])
            raise SampleError(f"observation {bad} is not strictly positive: {arr[bad]!r}")
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self) -> int:
        return self._values.size

    def __repr__(self) -> str:
        return f"Sample(n={len(self)})"


@dataclass(frozen=True)
class TestStatistic:
    """Which statistic to compute: ``W`` (integral, weight ``mu``) or ``D`` (sup)."""

    __test__ = False  # keep pytest from collecting this as a test class

    kind: str
    mu: float = 2.0

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in ("W", "D"):
            raise ValueError(f"unknown statistic {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "W" and not self.mu > 0:
            raise ValueError("mu must be positive")

    @classmethod
    def w(cls, mu: float = 2.0) -> "TestStatistic":
        return cls("W", mu)

    @classmethod
    def d(cls) -> "TestStatistic":
        return cls("D")

    @property
    def label(self) -> str:
        return f"W(mu={self.mu:g})" if self.kind == "W" else "D"

    def __call__(self, sample) -> float:
        if self.kind == "W":
            return statistic_w(sample, self.mu)
        return statistic_d(sample)


def ratio_jump_points(sample) -> np.ndarray:
    """All n(n-1) ordered ratios X_i / X_j, i != j, sorted ascending."""
    x = Sample(sample).values
    n = x.size
    ratios = x[:, None] / x[None, :]
    off_diag = ~np.eye(n, dtype=bool)
    return np.sort(ratios[off_diag])


def u_empirical_cdf(sample, t):
    """H_n(t): fraction of ordered pairs with X_i / X_j < t (strict)."""
    jumps = ratio_jump_points(sample)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    out = np.searchsorted(jumps, t_arr, side="left") / jumps.size
    return float(out) if out.ndim == 0 else out


def w_constant(mu: float) -> float:
    """1 - mu e^mu E1(mu), the F(2, 2) part of the integral statistic."""
    return 1.0 - scaled_e1(mu)


def statistic_w(sample, mu: float) -> float:
    """Integral statistic W_n as a degree-2 U-statistic.

    Averages the centered kernel
    ``1 - mu e^mu E1(mu) - (exp(-mu x/y) + exp(-mu y/x)) / 2``
    over the n(n-1)/2 unordered pairs. O(n^2) time, O(n) memory.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    x = Sample(sample).values
    n = x.size
    # row sums use numpy pairwise summation; fsum makes the reduction exact
    row_sums = []
    for i in range(n - 1):
        r = x[i] / x[i + 1 :]
        row_sums.append(float(np.sum(np.exp(-mu * r) + np.exp(-mu / r))))
    pair_mean = 0.5 * math.fsum(row_sums) / (n * (n - 1) / 2)
    return w_constant(mu) - pair_mean


def statistic_d(sample) -> float:
    """Kolmogorov-type statistic D_n = sup_t |t/(1+t) - H_n(t)|, computed exactly.

    Between jumps t/(1+t) increases while H_n is flat, so the supremum is
    reached at a one-sided limit at some jump. O(n^2 log n).
    """
    jumps = ratio_jump_points(sample)
    return float(_d_from_sorted(jumps[None, :])[0])


def _d_from_sorted(sorted_ratios: np.ndarray) -> np.ndarray:
    # With ties, k/N runs through every value between H(r-) and H(r+);
    # |F - v| is convex in v so the endpoints, both present, dominate.
    total = sorted_ratios.shape[1]
    f = sorted_ratios / (1.0 + sorted_ratios)
    k = np.arange(1, total + 1, dtype=float)
    below = np.abs(f - (k - 1) / total)
    above = np.abs(f - k / total)
    return np.maximum(below.max(axis=1), above.max(axis=1))


def w_batch(x: np.ndarray, mu: float) -> np.ndarray:
    """Signed W_n for every row of an (m, n) array of positive samples."""
    m, n = x.shape
    e = np.exp(-mu * (x[:, :, None] / x[:, None, :]))
    # sum over ordered pairs i != j; the diagonal contributes n * exp(-mu)
    total = e.sum(axis=(1, 2)) - n * math.exp(-mu)
    return w_constant(mu) - total / (n * (n - 1))


def d_batch(x: np.ndarray) -> np.ndarray:
    """D_n for every row of an (m, n) array of positive samples."""
    m, n = x.shape
    ratios = (x[:, :, None] / x[:, None, :]).reshape(m, n * n)
    off_diag = ~np.eye(n, dtype=bool).ravel()
    return _d_from_sorted(np.sort(ratios[:, off_diag], axis=1))
