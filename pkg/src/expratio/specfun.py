"""Special functions and quadrature used by the kernels and projections."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

EULER_GAMMA = 0.57721566490153286061


class ConvergenceError(ArithmeticError):
    """Adaptive integration ran out of subdivisions before meeting tolerance."""

    def __init__(self, message: str, estimate: float, abserr: float):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_TOL = Tolerance()


def _e1_continued_fraction(mu: float) -> float:
    """exp(mu) * E1(mu) for mu > 1 via the modified Lentz algorithm."""
    tiny = 1e-300
    b = mu + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


def _e1_series(mu: float) -> float:
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    for k in range(1, 60):
        term *= -mu / k
        contrib = term / k
        total += contrib
        if abs(contrib) < 1e-17 * abs(total):
            break
    return -EULER_GAMMA - math.log(mu) - total


def _check_positive(mu) -> float:
    mu = float(mu)
    if not mu > 0 or not math.isfinite(mu):
        raise ValueError(f"E1 requires a finite positive argument, got {mu!r}")
    return mu


def exp_integral_e1(mu: float) -> float:
    """Exponential integral E1(mu) = int_1^inf exp(-mu t) / t dt for real mu > 0.

    Power series around zero for mu <= 1, continued fraction otherwise.
    Both regimes are accurate to roughly 1e-15 relative.
    """
    mu = _check_positive(mu)
    if mu <= 1.0:
        return _e1_series(mu)
    return _e1_continued_fraction(mu) * math.exp(-mu)


def scaled_e1(mu: float) -> float:
    """mu * exp(mu) * E1(mu), without overflow for large mu."""
    mu = _check_positive(mu)
    if mu <= 1.0:
        return mu * math.exp(mu) * _e1_series(mu)
    return mu * _e1_continued_fraction(mu)


def bessel_k1_combo(mu: float, s):
    """sqrt(mu s) * K1(2 sqrt(mu s)), equal to 1/2 int_0^inf exp(-mu s/y - y) dy.

    Accepts scalar or array ``s``. The value at s = 0 is the limit 1/2.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("s must be nonnegative")
    z = 2.0 * np.sqrt(mu * s_arr)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # k1e avoids underflow for large z; exp(-z) then underflows cleanly
        out = 0.5 * z * special.k1e(z) * np.exp(-z)
    out = np.where(z < 1e-300, 0.5, out)
    if np.ndim(s) == 0:
        return float(out)
    return out


def integrate_adaptive(f, a: float, b: float = math.inf, tol: Tolerance = DEFAULT_TOL) -> float:
    """Integrate ``f`` over (a, b); ``b`` may be +inf.

    A semi-infinite range is mapped onto (0, 1) by x = a + u / (1 - u) and
    handed to the same adaptive Gauss-Kronrod engine as finite ranges. The
    integrand is never evaluated at the endpoints.
    """
    if math.isinf(b):
        if b < 0:
            raise ValueError("upper limit must be +inf or finite")

        def g(u):
            one_minus = 1.0 - u
            return f(a + u / one_minus) / (one_minus * one_minus)

        lo, hi, fun = 0.0, 1.0, g
    else:
        lo, hi, fun = float(a), float(b), f

    value, abserr, _info, *message = integrate.quad(
        fun,
        lo,
        hi,
        epsabs=tol.abs_tol,
        epsrel=tol.rel_tol,
        limit=tol.max_subdivisions,
        full_output=1,
    )
    # QUADPACK reports roundoff trouble liberally; only fail when the
    # returned error bound is genuinely outside the requested tolerance.
    bound = max(tol.abs_tol, tol.rel_tol * abs(value))
    if not math.isfinite(value) or (message and not abserr <= 100 * bound):
        raise ConvergenceError(
            f"integration did not converge: estimate {value!r}, error bound {abserr!r}",
            value,
            abserr,
        )
    return value
