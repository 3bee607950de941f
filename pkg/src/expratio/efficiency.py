"""Local Bahadur efficiency of the W and D tests.

Everything here is driven by the projections of the two kernels onto a
single observation under Exp(1):

* ``phi_mu(s)``   for the integral statistic W,
* ``xi(s; t)``    for the family of kernels behind D.

Their variances give the leading large-deviation coefficients, and their
inner products with the score ``h`` of an alternative give the limits in
probability ``b(theta) ~ b_coeff * theta``. The exact slope is then
``c(theta) ~ b_coeff**2 / (4 variance) * theta**2`` and the local efficiency
divides it by twice the Kullback-Leibler coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from .alternatives import AlternativeModel, Family, UnsupportedOperation
from .specfun import Tolerance, bessel_k1_combo, integrate_adaptive, scaled_e1
from .stats_core import TestStatistic

EFFICIENCY_TOL = Tolerance(abs_tol=1e-9, rel_tol=1e-10, max_subdivisions=2000)

T_GRID = np.logspace(-3, 3, 2001)


def _integrate(f, a=0.0, b=math.inf):
    return integrate_adaptive(f, a, b, EFFICIENCY_TOL)


# -- projections ------------------------------------------------------------


def projection_phi(mu: float, s):
    """Projection of the W kernel: E[Phi(s, Y)] for Y ~ Exp(1)."""
    s_arr = np.asarray(s, dtype=float)
    out = 1.0 - scaled_e1(mu) - bessel_k1_combo(mu, s_arr) - s_arr / (2.0 * (mu + s_arr))
    return float(out) if np.ndim(out) == 0 else out


def projection_xi(s, t):
    """Projection of the D kernel at level t: E[Xi(s, Y; t)] for Y ~ Exp(1)."""
    s_arr = np.asarray(s, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = t_arr / (1 + t_arr) - 0.5 * np.exp(-s_arr / t_arr) + 0.5 * np.exp(-s_arr * t_arr) - 0.5
    out = np.where(t_arr == 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def variance_delta_w(mu: float) -> float:
    """Delta_W^2(mu) = int phi_mu(s)^2 e^{-s} ds."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    return _integrate(lambda s: projection_phi(mu, s) ** 2 * math.exp(-s))


def variance_delta_d(t):
    """delta^2(t) = E xi(X; t)^2 in closed rational form."""
    t = np.asarray(t, dtype=float)
    out = t * (t - 1) ** 2 * (t * t + 3 * t + 1) / (
        4 * (t + 1) ** 2 * (t + 2) * (t**3 + (t + 1) ** 3)
    )
    return float(out) if out.ndim == 0 else out


def _grid_argmax(fun, grid=T_GRID):
    """Maximize a smooth positive function of t > 0 on a log grid, then refine.

    Returns (t, value) of the global maximum.
    """
    values = np.array([fun(t) for t in grid])
    k = int(np.argmax(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    res = optimize.minimize_scalar(
        lambda u: -fun(math.exp(u)),
        bounds=(math.log(lo), math.log(hi)),
        method="bounded",
        options={"xatol": 1e-12},
    )
    t_best = math.exp(res.x)
    best = float(fun(t_best))
    if best < values[k]:
        return float(grid[k]), float(values[k])
    return t_best, best


@dataclass(frozen=True)
class SupDeltaD:
    t_star: float
    partner: float
    delta2: float


@lru_cache(maxsize=1)
def sup_delta_d() -> SupDeltaD:
    """Global maximum of delta^2(t); the two maximizers are t* and 1/t*."""
    t, val = _grid_argmax(variance_delta_d, T_GRID[T_GRID <= 1.0])
    return SupDeltaD(t_star=t, partner=1.0 / t, delta2=val)


def large_deviation_coeff(statistic: TestStatistic) -> float:
    """Leading coefficient k of f(a) ~ k a^2 as a -> 0."""
    if statistic.kind == "W":
        return 1.0 / (8.0 * variance_delta_w(statistic.mu))
    return 1.0 / (8.0 * sup_delta_d().delta2)


# -- limits under alternatives ------------------------------------------------


def _score(model):
    if isinstance(model, AlternativeModel) and model.family.is_kotlarski:
        raise UnsupportedOperation(f"{model.family.value} has no shape parameter")
    return model.score_h


@lru_cache(maxsize=256)
def b_coeff_w(model, mu: float) -> float:
    """b_W(theta) / theta as theta -> 0: 2 int phi_mu(x) h(x) dx."""
    h = _score(model)
    return 2.0 * _integrate(lambda x: projection_phi(mu, x) * h(x))


def b_curve_d_numeric(model, t: float) -> float:
    """2 int xi(x; t) h(x) dx by quadrature."""
    h = _score(model)
    if t == 1.0:
        return 0.0
    return 2.0 * _integrate(lambda x: projection_xi(x, t) * h(x))


def b_curve_d(model, t: float) -> float:
    """Local limit b_D(t, theta) / theta, closed form where one is known."""
    _score(model)
    if isinstance(model, AlternativeModel):
        fam = model.family
        if fam is Family.WEIBULL:
            return -t * math.log(t) / (t + 1) ** 2
        if fam is Family.GAMMA:
            return ((t - 1) * math.log1p(t) - t * math.log(t)) / (t + 1)
        if fam is Family.EMNW:
            beta = model.beta
            return (beta - 1) ** 2 * t * (1 - t) / ((t + 1) * (beta + t) * (t * beta + 1))
    return b_curve_d_numeric(model, t)


@lru_cache(maxsize=256)
def b_coeff_d(model) -> float:
    """sup_t |b_D(t, theta)| / theta as theta -> 0."""
    # b(1/t) = -b(t), so the scan can stay on t <= 1
    grid = T_GRID[T_GRID <= 1.0]
    _, val = _grid_argmax(lambda t: abs(b_curve_d(model, t)), grid)
    return val


# -- Kullback-Leibler ------------------------------------------------------------


def kl_coeff(model) -> float:
    """KL(theta) / theta^2 as theta -> 0."""
    if isinstance(model, AlternativeModel):
        fam = model.family
        if fam is Family.WEIBULL:
            return math.pi**2 / 12
        if fam is Family.GAMMA:
            return math.pi**2 / 12 - 0.5
        if fam is Family.EMNW:
            beta = model.beta
            return (beta - 1) ** 4 / (2 * beta**2 * (2 * beta - 1))
        if fam is Family.VERHULST:
            return math.pi**2 / 6 - math.pi**4 / 72
        raise UnsupportedOperation(f"{fam.value} has no shape parameter")
    return kl_coeff_from_score(model.score_h)


def kl_coeff_from_score(h) -> float:
    """(int h^2 e^x dx - (int x h dx)^2) / 2 for a score function h."""
    energy = _integrate(lambda x: h(x) ** 2 * math.exp(x) if x < 700 else 0.0)
    first = _integrate(lambda x: x * h(x))
    return 0.5 * (energy - first**2)


def h0_transform(h):
    """h0(x) = h(x) - (x - 1) e^{-x} int u h(u) du."""
    m = _integrate(lambda u: u * h(u))
    return lambda x: h(x) - (x - 1) * math.exp(-x) * m


def kl_numeric(model: AlternativeModel, theta: float) -> float:
    """inf over lambda of KL(g_theta || Exp(lambda)), by quadrature and 1-d search."""
    if model.family.is_kotlarski:
        raise UnsupportedOperation(f"{model.family.value} has no shape parameter")
    if not 0 <= theta <= 0.2:
        raise ValueError("kl_numeric is a small-theta check; need 0 <= theta <= 0.2")
    if theta == 0:
        return 0.0
    g = AlternativeModel(model.family, theta, model.beta)

    def log_g(x):
        d = g.density(x)
        return math.log(d) if d > 0 else 0.0

    # int g ln g and int x g do not depend on lambda
    neg_entropy = _integrate(lambda x: g.density(x) * log_g(x))
    mean = _integrate(lambda x: x * g.density(x))

    def divergence(lam):
        return neg_entropy - math.log(lam) + lam * mean

    res = optimize.minimize_scalar(divergence, bounds=(0.1, 10.0), method="bounded", options={"xatol": 1e-10})
    return float(res.fun)


# -- assembling the efficiency -------------------------------------------------


@dataclass(frozen=True)
class EfficiencyReport:
    alternative: str
    statistic: str
    b_coeff: float
    slope_coeff: float
    kl_coeff: float
    efficiency: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def bahadur_efficiency(model, statistic: TestStatistic) -> EfficiencyReport:
    if statistic.kind == "W":
        b = b_coeff_w(model, statistic.mu)
        variance = variance_delta_w(statistic.mu)
    else:
        b = b_coeff_d(model)
        variance = sup_delta_d().delta2
    slope = b * b / (4.0 * variance)
    kl = kl_coeff(model)
    return EfficiencyReport(
        alternative=model.name,
        statistic=statistic.label,
        b_coeff=b,
        slope_coeff=slope,
        kl_coeff=kl,
        efficiency=slope / (2.0 * kl),
    )


# -- locally optimal alternatives --------------------------------------------


class LAOAlternative:
    """Density e^{-x} (1 + theta * p(x)) with p the projection of the test kernel.

    Its score is e^{-x} p(x), so the test attains the Kullback-Leibler bound
    to first order in theta.
    """

    def __init__(self, statistic: TestStatistic, theta: float = 0.0):
        self.statistic = statistic
        if statistic.kind == "W":
            mu = statistic.mu
            self._perturbation = lambda x: projection_phi(mu, x)
            # phi_mu takes its minimum 1/2 - mu e^mu E1(mu) at both ends of (0, inf)
            self._inf_p = 0.5 - scaled_e1(mu)
            self.t0 = None
        else:
            t0 = sup_delta_d().t_star
            self._perturbation = lambda x: projection_xi(x, t0)
            # for t0 < 1, xi(.; t0) >= t0/(1+t0) - 1/2, its value at both ends
            self._inf_p = t0 / (1 + t0) - 0.5
            self.t0 = t0
        self.theta_max = math.inf if self._inf_p >= 0 else -1.0 / self._inf_p
        if not 0 <= theta <= self.theta_max:
            raise ValueError(f"theta must lie in [0, {self.theta_max:.6g}] for a valid density")
        self.theta = float(theta)

    @property
    def name(self) -> str:
        return f"LAO[{self.statistic.label}]"

    def perturbation(self, x):
        return self._perturbation(x)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.exp(-x) * (1.0 + self.theta * self._perturbation(x))
        return float(out) if out.ndim == 0 else out

    def score_h(self, x):
        x = np.asarray(x, dtype=float)
        out = np.exp(-x) * self._perturbation(x)
        return float(out) if out.ndim == 0 else out


def lao_alternative(statistic: TestStatistic, theta: float = 0.0) -> LAOAlternative:
    return LAOAlternative(statistic, theta)
