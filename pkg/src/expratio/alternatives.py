"""Parametric alternatives to exponentiality and the Kotlarski counterexamples.

The four test families reduce to the standard exponential at ``theta = 0``.
The Kotlarski laws are not exponential, yet the ratio of two independent
draws from any of them still has the F(2, 2) distribution.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .specfun import EULER_GAMMA
from .stats_core import Sample

EMNW_BRACKET = (0.0, 50.0)
EMNW_BISECTION_STEPS = 60


class Family(str, enum.Enum):
    WEIBULL = "weibull"
    GAMMA = "gamma"
    EMNW = "emnw"
    VERHULST = "verhulst"
    KOTLARSKI_INV_EXP = "kotlarski1"
    KOTLARSKI_HALF_CAUCHY = "kotlarski2"
    KOTLARSKI_X_OVER_CUBE = "kotlarski3"

    @property
    def is_kotlarski(self) -> bool:
        return self.value.startswith("kotlarski")


TEST_FAMILIES = (Family.WEIBULL, Family.GAMMA, Family.EMNW, Family.VERHULST)
KOTLARSKI_FAMILIES = (
    Family.KOTLARSKI_INV_EXP,
    Family.KOTLARSKI_HALF_CAUCHY,
    Family.KOTLARSKI_X_OVER_CUBE,
)


class UnsupportedOperation(TypeError):
    """The operation has no meaning for this family (e.g. a score for Kotlarski laws)."""


def open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform variates on the open interval (0, 1)."""
    u = rng.random(size)
    u[u == 0.0] = 2.0**-54
    return u


def exponential_variates(rng: np.random.Generator, size) -> np.ndarray:
    """Standard exponential variates by inversion, -ln(1 - U)."""
    return -np.log1p(-open_uniform(rng, size))


@dataclass(frozen=True)
class AlternativeModel:
    """A member of one of the alternative families.

    ``theta`` is the deviation from exponentiality (ignored and forced to 0
    for Kotlarski laws); ``beta`` is only used by EMNW.
    """

    family: Family
    theta: float = 0.0
    beta: float = 3.0

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        theta = float(self.theta)
        if family.is_kotlarski:
            if theta != 0.0:
                raise ValueError(f"{family.value} has no shape parameter")
        elif not theta >= 0 or not math.isfinite(theta):
            raise ValueError(f"theta must be >= 0, got {theta!r}")
        if family is Family.EMNW:
            if not self.beta > 1:
                raise ValueError("EMNW requires beta > 1")
            if theta > 1.0 / (self.beta - 1.0) + 1e-15:
                raise ValueError(
                    f"EMNW({self.beta:g}) requires theta <= {1.0 / (self.beta - 1.0):g}, got {theta!r}"
                )
        object.__setattr__(self, "theta", theta)

    @property
    def name(self) -> str:
        if self.family is Family.EMNW:
            return f"EMNW(beta={self.beta:g})"
        return self.family.value

    def density(self, x):
        x = np.asarray(x, dtype=float)
        th = self.theta
        fam = self.family
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if fam is Family.WEIBULL:
                out = (1 + th) * x**th * np.exp(-(x ** (1 + th)))
            elif fam is Family.GAMMA:
                out = np.exp(th * np.log(x) - x - math.lgamma(th + 1)) if th else np.exp(-x)
            elif fam is Family.EMNW:
                out = (1 + th) * np.exp(-x) - th * self.beta * np.exp(-self.beta * x)
            elif fam is Family.VERHULST:
                out = (1 + th) * np.exp(-x) * (-np.expm1(-x)) ** th
            elif fam is Family.KOTLARSKI_INV_EXP:
                out = np.where(x > 0, np.exp(-1.0 / x) / x**2, 0.0)
            elif fam is Family.KOTLARSKI_HALF_CAUCHY:
                out = (1 + x * x) ** -1.5
            else:
                out = x * (1 + x * x) ** -1.5
        out = np.where(x < 0, 0.0, out)
        return _scalar_or_array(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        th = self.theta
        fam = self.family
        xp = np.maximum(x, 0.0)
        with np.errstate(divide="ignore", over="ignore"):
            if fam is Family.WEIBULL:
                out = -np.expm1(-(xp ** (1 + th)))
            elif fam is Family.GAMMA:
                out = special.gammainc(th + 1, xp)
            elif fam is Family.EMNW:
                out = (1 + th) * -np.expm1(-xp) - th * -np.expm1(-self.beta * xp)
            elif fam is Family.VERHULST:
                out = (-np.expm1(-xp)) ** (1 + th)
            elif fam is Family.KOTLARSKI_INV_EXP:
                out = np.where(xp > 0, np.exp(-1.0 / xp), 0.0)
            elif fam is Family.KOTLARSKI_HALF_CAUCHY:
                out = xp / np.sqrt(1 + xp * xp)
            else:
                out = -np.expm1(-0.5 * np.log1p(xp * xp))
        return _scalar_or_array(out)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u < 0) | (u > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        th = self.theta
        fam = self.family
        with np.errstate(divide="ignore", invalid="ignore"):
            if fam is Family.WEIBULL:
                out = (-np.log1p(-u)) ** (1.0 / (1 + th))
            elif fam is Family.GAMMA:
                out = special.gammaincinv(th + 1, u)
            elif fam is Family.EMNW:
                out = self._emnw_quantile(u)
            elif fam is Family.VERHULST:
                out = -np.log1p(-(u ** (1.0 / (1 + th))))
            elif fam is Family.KOTLARSKI_INV_EXP:
                out = -1.0 / np.log(u)
            elif fam is Family.KOTLARSKI_HALF_CAUCHY:
                out = u / np.sqrt((1 - u) * (1 + u))
            else:
                out = np.sqrt(u * (2 - u)) / (1 - u)
        return _scalar_or_array(out)

    def _emnw_quantile(self, u: np.ndarray) -> np.ndarray:
        # negative mixture weight: no composition sampler, so invert the cdf
        lo = np.full(u.shape, EMNW_BRACKET[0])
        hi = np.full(u.shape, EMNW_BRACKET[1])
        for _ in range(EMNW_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def draw(self, size, rng: np.random.Generator) -> np.ndarray:
        """Raw i.i.d. variates as an array of the given shape."""
        if self.family is Family.GAMMA:
            return rng.standard_gamma(self.theta + 1.0, size)
        return np.asarray(self.quantile(open_uniform(rng, size)), dtype=float)

    def sample(self, n: int, rng: np.random.Generator) -> Sample:
        if n < 2:
            raise ValueError("n must be at least 2")
        return Sample(self.draw(n, rng))

    def score_h(self, x):
        """Derivative of the density in theta at theta = 0."""
        x = np.asarray(x, dtype=float)
        fam = self.family
        if fam.is_kotlarski:
            raise UnsupportedOperation(f"{fam.value} has no shape parameter")
        with np.errstate(divide="ignore", invalid="ignore"):
            if fam is Family.WEIBULL:
                out = np.exp(-x) * (1 + (1 - x) * np.log(x))
            elif fam is Family.GAMMA:
                out = np.exp(-x) * (np.log(x) + EULER_GAMMA)
            elif fam is Family.EMNW:
                out = np.exp(-x) - self.beta * np.exp(-self.beta * x)
            else:
                out = np.exp(-x) * (1 + np.log(-np.expm1(-x)))
        return _scalar_or_array(out)


def _scalar_or_array(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a
