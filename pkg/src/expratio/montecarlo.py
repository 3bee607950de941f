"""Monte Carlo null distributions, critical values, p-values and power.

Every replicate ``k`` draws from its own generator, derived from
``(seed, stream, k)`` through :class:`numpy.random.SeedSequence`. Results are
therefore independent of batch size and of how many worker threads run the
batches. The null distribution and the alternative samples of a power
study use different streams.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .alternatives import AlternativeModel, Family, exponential_variates
from .stats_core import TestStatistic, d_batch, w_batch

NULL_STREAM = 0
ALTERNATIVE_STREAM = 1

MIN_REPS = 1000
DEFAULT_REPS = 10_000
# ratios per batch; keeps the (batch, n*n) work array around 30 MB
_BATCH_ELEMENTS = 4_000_000


def replicate_rng(seed: int, stream: int, k: int) -> np.random.Generator:
    """Generator for replicate ``k`` of ``stream`` under the master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, k))))


@dataclass(frozen=True)
class NullDistribution:
    statistic: TestStatistic
    n: int
    replicates: np.ndarray
    seed: int

    @property
    def rep_count(self) -> int:
        return self.replicates.size


@dataclass(frozen=True)
class PowerResult:
    model: AlternativeModel
    statistic: TestStatistic
    n: int
    alpha: float
    power: float
    critical_value: float
    rep_count: int
    seed: int

    @property
    def theta(self) -> float:
        return self.model.theta

    def as_dict(self) -> dict:
        return {
            "alternative": self.model.name,
            "theta": self.theta,
            "statistic": self.statistic.label,
            "n": self.n,
            "alpha": self.alpha,
            "power": self.power,
            "critical_value": self.critical_value,
            "reps": self.rep_count,
            "seed": self.seed,
        }


def _evaluate(statistic: TestStatistic, x: np.ndarray) -> np.ndarray:
    if statistic.kind == "W":
        return w_batch(x, statistic.mu)
    return d_batch(x)


def simulate_statistic(
    statistic: TestStatistic,
    n: int,
    reps: int,
    seed: int,
    model: AlternativeModel | None = None,
    stream: int | None = None,
    workers: int = 1,
) -> np.ndarray:
    """Signed statistic values for ``reps`` samples of size ``n``, in replicate order.

    With ``model=None`` the samples are Exp(1); otherwise they come from the
    alternative. The default stream is the null stream for Exp(1) data and
    the alternative stream for everything else.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if reps < 1:
        raise ValueError("reps must be positive")
    if stream is None:
        stream = NULL_STREAM if model is None else ALTERNATIVE_STREAM

    def draw(rng):
        if model is None:
            return exponential_variates(rng, n)
        return model.draw(n, rng)

    batch = max(1, _BATCH_ELEMENTS // (n * n))
    starts = range(0, reps, batch)

    def run(start):
        stop = min(start + batch, reps)
        x = np.empty((stop - start, n))
        for row, k in enumerate(range(start, stop)):
            x[row] = draw(replicate_rng(seed, stream, k))
        return _evaluate(statistic, x)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, starts))
    else:
        chunks = [run(s) for s in starts]
    return np.concatenate(chunks)


@lru_cache(maxsize=128)
def _cached_null(statistic: TestStatistic, n: int, reps: int, seed: int, workers: int) -> NullDistribution:
    values = simulate_statistic(statistic, n, reps, seed, workers=workers)
    if statistic.kind == "W":
        # large absolute values are critical
        values = np.abs(values)
    values = np.sort(values)
    values.setflags(write=False)
    return NullDistribution(statistic, n, values, seed)


def simulate_null(statistic: TestStatistic, n: int, reps: int = DEFAULT_REPS, seed: int = 0, workers: int = 1) -> NullDistribution:
    """Sorted null replicates of D, or of |W|, from Exp(1) samples of size n."""
    if reps < MIN_REPS:
        raise ValueError(f"reps must be at least {MIN_REPS}")
    if n < 2:
        raise ValueError("n must be at least 2")
    return _cached_null(statistic, int(n), int(reps), int(seed), int(workers))


def critical_value(dist: NullDistribution, alpha: float) -> float:
    """Empirical (1 - alpha) quantile: order statistic ceil((1 - alpha) * reps)."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    reps = dist.rep_count
    # guard against (1 - 0.05) * 10000 = 9500.000000000002
    index = math.ceil((1.0 - alpha) * reps - 1e-9)
    index = min(max(index, 1), reps)
    return float(dist.replicates[index - 1])


def p_value(
    statistic: TestStatistic,
    observed: float,
    n: int,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    workers: int = 1,
) -> float:
    """Add-one Monte Carlo p-value (1 + #{replicates >= observed}) / (reps + 1).

    For W the comparison uses |observed|.
    """
    if statistic.kind == "W":
        observed = abs(observed)
    elif observed < 0:
        raise ValueError("D is nonnegative")
    dist = simulate_null(statistic, n, reps, seed, workers)
    exceed = dist.rep_count - int(np.searchsorted(dist.replicates, observed, side="left"))
    return (1 + exceed) / (dist.rep_count + 1)


def power_curve(
    model: AlternativeModel,
    statistic: TestStatistic,
    n: int,
    alphas,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    workers: int = 1,
) -> list[PowerResult]:
    """Rejection rates at several levels from one set of alternative samples."""
    null = simulate_null(statistic, n, reps, seed, workers)
    values = simulate_statistic(statistic, n, reps, seed, model=model, workers=workers)
    if statistic.kind == "W":
        values = np.abs(values)
    results = []
    for alpha in alphas:
        crit = critical_value(null, alpha)
        results.append(
            PowerResult(
                model=model,
                statistic=statistic,
                n=n,
                alpha=float(alpha),
                power=float(np.mean(values > crit)),
                critical_value=crit,
                rep_count=reps,
                seed=seed,
            )
        )
    return results


def power(
    model: AlternativeModel,
    statistic: TestStatistic,
    n: int,
    alpha: float,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    theta: float | None = None,
    workers: int = 1,
) -> PowerResult:
    """Fraction of alternative samples whose statistic exceeds the null critical value."""
    if theta is not None:
        model = AlternativeModel(model.family, theta, model.beta)
    return power_curve(model, statistic, n, [alpha], reps, seed, workers)[0]


def inconsistency_demo(
    family: Family,
    statistic: TestStatistic,
    n: int,
    alpha: float,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    workers: int = 1,
) -> PowerResult:
    """Power against a Kotlarski law, whose pairwise ratios are F(2, 2) like the null."""
    family = Family(family)
    if not family.is_kotlarski:
        raise ValueError(f"{family.value} is not a Kotlarski family")
    return power(AlternativeModel(family), statistic, n, alpha, reps, seed, workers=workers)
