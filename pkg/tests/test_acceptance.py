"""Exit criteria for the package, one test per criterion.

Each test prints a single PASS/FAIL line (collected in the terminal summary).
Set EXPRATIO_ACCEPTANCE_REPS=2000 for the reduced-replicate smoke mode of
the power criterion; its tolerance then widens from 0.02 to 0.04.
"""

import math
import os

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from expratio.alternatives import KOTLARSKI_FAMILIES, TEST_FAMILIES, AlternativeModel, Family
from expratio.efficiency import (
    bahadur_efficiency,
    large_deviation_coeff,
    lao_alternative,
    projection_phi,
    projection_xi,
    sup_delta_d,
    variance_delta_d,
    variance_delta_w,
)
from expratio.montecarlo import (
    ALTERNATIVE_STREAM,
    critical_value,
    p_value,
    power_curve,
    simulate_null,
    simulate_statistic,
)
from expratio.stats_core import TestStatistic, statistic_d, statistic_w
from oracles import d_by_grid, expect_exp, w_by_quadrature

SEED = 2017
REPS = 10_000
POWER_REPS = int(os.environ.get("EXPRATIO_ACCEPTANCE_REPS", REPS))
POWER_TOL = 0.02 if POWER_REPS >= REPS else 0.04

W2 = TestStatistic.w(2.0)
D = TestStatistic.d()
ALPHAS = (0.1, 0.05, 0.01)


def report(number, title, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    line = f"[{status}] criterion {number}: {title}"
    if detail:
        line += f" ({detail})"
    if failures:
        line += " | " + "; ".join(failures[:6]) + (" ..." if len(failures) > 6 else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failures, line


def check(failures, label, value, expected, tol):
    if not abs(value - expected) <= tol:
        failures.append(f"{label}: {value:.4f} vs {expected} +/- {tol}")


TABLE3 = {
    10: (0.14, 0.16, 0.20),
    20: (0.09, 0.10, 0.13),
    30: (0.07, 0.08, 0.10),
    40: (0.06, 0.07, 0.09),
    50: (0.05, 0.06, 0.07),
    100: (0.04, 0.04, 0.05),
}


def test_criterion_1_critical_values_of_d():
    failures = []
    worst = 0.0
    for n, row in TABLE3.items():
        dist = simulate_null(D, n, REPS, SEED)
        for alpha, expected in zip(ALPHAS, row):
            value = critical_value(dist, alpha)
            worst = max(worst, abs(value - expected))
            check(failures, f"n={n} alpha={alpha}", value, expected, 0.01)
    report(1, "D critical values, 18 entries within 0.01", failures, f"max dev {worst:.4f}")


TABLE1 = {
    Family.WEIBULL: (0.123, 1.357, 0.825),
    Family.GAMMA: (0.081, 0.590, 0.915),
    Family.EMNW: (0.056, 0.284, 0.800),
    Family.VERHULST: (0.078, 0.541, 0.927),
}


def test_criterion_2_efficiency_of_w():
    failures = []
    for family, (b, c, e) in TABLE1.items():
        r = bahadur_efficiency(AlternativeModel(family), W2)
        check(failures, f"{family.value} b", r.b_coeff, b, 0.01)
        check(failures, f"{family.value} slope", r.slope_coeff, c, 0.01)
        check(failures, f"{family.value} efficiency", r.efficiency, e, 0.01)
    report(2, "W(mu=2) b, slope and efficiency within 0.01", failures)


TABLE4 = {
    Family.WEIBULL: (0.2239, 1.313, 0.798),
    Family.GAMMA: (0.1468, 0.564, 0.875),
    Family.EMNW: (0.1056, 0.292, 0.821),
    Family.VERHULST: (0.1406, 0.518, 0.886),
}


def test_criterion_3_efficiency_of_d():
    failures = []
    for family, (b, c, e) in TABLE4.items():
        r = bahadur_efficiency(AlternativeModel(family), D)
        check(failures, f"{family.value} b", r.b_coeff, b, 0.002)
        check(failures, f"{family.value} slope", r.slope_coeff, c, 0.01)
        check(failures, f"{family.value} efficiency", r.efficiency, e, 0.01)
    report(3, "D b within 0.002, slope and efficiency within 0.01", failures)


def test_criterion_4_scalar_constants():
    failures = []
    sup = sup_delta_d()
    check(failures, "Delta_W^2(2)", variance_delta_w(2.0), 0.0028, 1e-4)
    check(failures, "sup delta^2", sup.delta2, 0.00954, 1e-4)
    check(failures, "f_D coefficient", large_deviation_coeff(D), 13.103, 0.05)
    check(failures, "argmax low", sup.t_star, 0.1963, 0.001)
    check(failures, "argmax high", sup.partner, 5.0949, 0.005)
    report(
        4,
        "variance constants, f_D coefficient, argmax pair",
        failures,
        f"Delta_W^2={variance_delta_w(2.0):.5f} delta^2={sup.delta2:.6f} t*={sup.t_star:.4f}/{sup.partner:.4f}",
    )


TABLE2 = {
    (Family.WEIBULL, 0.5): (0.999, 0.997, 0.985),
    (Family.WEIBULL, 0.25): (0.822, 0.717, 0.499),
    (Family.GAMMA, 0.5): (0.922, 0.856, 0.669),
    (Family.GAMMA, 0.25): (0.506, 0.366, 0.186),
    (Family.EMNW, 0.5): (0.997, 0.992, 0.959),
    (Family.EMNW, 0.25): (0.513, 0.378, 0.193),
    (Family.VERHULST, 0.5): (0.890, 0.804, 0.600),
    (Family.VERHULST, 0.25): (0.467, 0.333, 0.161),
}
TABLE5 = {
    (Family.WEIBULL, 0.5): (0.999, 0.997, 0.976),
    (Family.WEIBULL, 0.25): (0.809, 0.712, 0.452),
    (Family.GAMMA, 0.5): (0.914, 0.845, 0.622),
    (Family.GAMMA, 0.25): (0.489, 0.361, 0.155),
    (Family.EMNW, 0.5): (0.996, 0.991, 0.941),
    (Family.EMNW, 0.25): (0.504, 0.382, 0.171),
    (Family.VERHULST, 0.5): (0.883, 0.797, 0.552),
    (Family.VERHULST, 0.25): (0.454, 0.330, 0.136),
}


def test_criterion_5_power_tables():
    failures = []
    worst = 0.0
    count = 0
    for stat, table in ((W2, TABLE2), (D, TABLE5)):
        for (family, theta), row in table.items():
            results = power_curve(AlternativeModel(family, theta), stat, 100, ALPHAS, POWER_REPS, SEED)
            for res, expected in zip(results, row):
                count += 1
                worst = max(worst, abs(res.power - expected))
                check(failures, f"{stat.label} {family.value} theta={theta} alpha={res.alpha}", res.power, expected, POWER_TOL)
    report(5, f"{count} simulated powers within {POWER_TOL} at reps={POWER_REPS}", failures, f"max dev {worst:.4f}")


def test_criterion_6_reign_p_values():
    failures = []
    p_w53 = p_value(W2, 0.048, 53, REPS, SEED)
    p_d53 = p_value(D, 0.095, 53, REPS, SEED)
    p_w76 = p_value(W2, 0.050, 76, REPS, SEED)
    p_d76 = p_value(D, 0.096, 76, REPS, SEED)
    if not 0.0003 <= p_w53 <= 0.004:
        failures.append(f"W n=53 p={p_w53:.5f}")
    if not 0.0005 <= p_d53 <= 0.006:
        failures.append(f"D n=53 p={p_d53:.5f}")
    if not p_w76 <= 1e-3:
        failures.append(f"W n=76 p={p_w76:.5f}")
    if not p_d76 <= 1e-3:
        failures.append(f"D n=76 p={p_d76:.5f}")
    report(
        6,
        "p-values for the observed reign statistics",
        failures,
        f"n=53: {p_w53:.4f}/{p_d53:.4f}, n=76: {p_w76:.5f}/{p_d76:.5f}",
    )


def test_criterion_7_kotlarski_blind_spot():
    failures = []
    rates = []
    for family in KOTLARSKI_FAMILIES:
        for stat in (W2, D):
            for res in power_curve(AlternativeModel(family), stat, 100, (0.1, 0.05), REPS, SEED):
                rates.append(f"{family.value}/{stat.kind}/{res.alpha}={res.power:.4f}")
                check(failures, f"{family.value} {stat.label} alpha={res.alpha}", res.power, res.alpha, 0.015)
    report(7, "rejection rate under Kotlarski laws within 0.015 of alpha", failures, ", ".join(rates))


def test_criterion_8_oracle_equivalences():
    rng = np.random.default_rng(SEED)
    failures = []

    worst = 0.0
    for _ in range(50):
        x = rng.exponential(size=int(rng.integers(2, 13))) * rng.uniform(0.1, 10)
        worst = max(worst, abs(statistic_w(x, 2.0) - w_by_quadrature(x, 2.0)))
    if not worst < 1e-8:
        failures.append(f"W kernel sum vs quadrature {worst:.2e}")

    worst = 0.0
    for _ in range(50):
        x = rng.exponential(size=int(rng.integers(2, 21)))
        worst = max(worst, abs(statistic_d(x) - d_by_grid(x)))
    if not worst < 1e-12:
        failures.append(f"D jumps vs grid {worst:.2e}")

    worst = 0.0
    for family in TEST_FAMILIES:
        for x in (0.1, 0.5, 1.0, 2.0, 5.0):
            fd = (AlternativeModel(family, 1e-6).density(x) - AlternativeModel(family).density(x)) / 1e-6
            worst = max(worst, abs(AlternativeModel(family).score_h(x) - fd))
    if not worst < 1e-4:
        failures.append(f"score vs finite difference {worst:.2e}")

    worst = 0.0
    for t in (0.2, 0.5, 2.0, 5.0):
        worst = max(worst, abs(variance_delta_d(t) - expect_exp(lambda s: projection_xi(s, t) ** 2)))
    if not worst < 1e-10:
        failures.append(f"delta^2 closed form vs quadrature {worst:.2e}")

    worst = max(
        max(abs(expect_exp(lambda s: projection_phi(mu, s))) for mu in (0.5, 1.0, 2.0, 5.0)),
        max(abs(expect_exp(lambda s: projection_xi(s, t))) for t in (0.2, 0.5, 2.0, 5.0)),
    )
    if not worst < 1e-8:
        failures.append(f"projection centering {worst:.2e}")

    effs = [bahadur_efficiency(AlternativeModel(f), s).efficiency for f in TEST_FAMILIES for s in (W2, D)]
    if not max(effs) <= 1 + 1e-6:
        failures.append(f"efficiency bound violated: {max(effs):.6f}")

    lao = [bahadur_efficiency(lao_alternative(s), s).efficiency for s in (W2, D)]
    if not min(lao) >= 0.99:
        failures.append(f"LAO efficiency {min(lao):.6f}")

    report(8, "oracle equivalences", failures, f"LAO efficiencies {lao[0]:.6f}/{lao[1]:.6f}")


def test_criterion_9_null_calibration():
    failures = []
    rates = []
    for n in (20, 100):
        for stat in (W2, D):
            null = simulate_null(stat, n, REPS, SEED)
            # fresh Exp(1) samples from a stream independent of the critical values
            values = simulate_statistic(stat, n, REPS, SEED, stream=ALTERNATIVE_STREAM)
            if stat.kind == "W":
                values = np.abs(values)
            for alpha in ALPHAS:
                rate = float(np.mean(values > critical_value(null, alpha)))
                rates.append(f"{stat.kind}/n={n}/{alpha}={rate:.4f}")
                check(failures, f"{stat.label} n={n} alpha={alpha}", rate, alpha, 3 * math.sqrt(alpha * (1 - alpha) / REPS))
    report(9, "null rejection rate within 3 binomial SE of alpha", failures, ", ".join(rates))
