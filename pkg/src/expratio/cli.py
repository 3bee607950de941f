"""Command-line front end.

    expratio test --input reigns.txt
    expratio critical-values --statistic d
    expratio power --statistic w --reps 2000
    expratio efficiency
    expratio simulate --family emnw --theta 0.5 --n 1000 --seed 1
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .alternatives import KOTLARSKI_FAMILIES, TEST_FAMILIES, AlternativeModel, Family
from .efficiency import EFFICIENCY_TOL, LAOAlternative, bahadur_efficiency, sup_delta_d, variance_delta_w
from .montecarlo import DEFAULT_REPS, MIN_REPS, critical_value, p_value, power_curve, replicate_rng, simulate_null
from .specfun import ConvergenceError
from .stats_core import Sample, SampleError, TestStatistic, statistic_d, statistic_w

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

TABLE3_SIZES = (10, 20, 30, 40, 50, 100)
DEFAULT_ALPHAS = (0.1, 0.05, 0.01)
POWER_THETAS = (0.5, 0.25)
SIMULATE_STREAM = 2


class InputError(Exception):
    pass


def read_sample(path: Path) -> Sample:
    """One strictly positive number per line; '#' lines and blank lines are skipped."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            value = float(line)
        except ValueError:
            raise InputError(f"{path}:{lineno}: not a number: {line!r}") from None
        if not np.isfinite(value) or value <= 0:
            raise InputError(f"{path}:{lineno}: observation must be strictly positive, got {line!r}")
        values.append(value)
    if len(values) < 2:
        raise InputError(f"{path}: need at least 2 observations, found {len(values)}")
    return Sample(values)


def _statistics(args) -> list[TestStatistic]:
    out = []
    if args.statistic in ("w", "both"):
        out.append(TestStatistic.w(args.mu))
    if args.statistic in ("d", "both"):
        out.append(TestStatistic.d())
    return out


def _provenance(args, **extra) -> dict:
    info = {"version": __version__, "command": args.command}
    for key in ("seed", "reps", "mu", "beta"):
        if hasattr(args, key):
            info[key] = getattr(args, key)
    info.update(extra)
    return info


def _format_table(header: list[str], rows: list[list]) -> str:
    def cell(v):
        if isinstance(v, float):
            return f"{v:.4f}"
        return str(v)

    body = [[cell(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(lines)


def _emit(args, report: dict, header: list[str], rows: list[list], out) -> None:
    if args.format == "json":
        json.dump(report, out, indent=2)
        out.write("\n")
    else:
        out.write(_format_table(header, rows) + "\n")


# -- commands ----------------------------------------------------------------------


def cmd_test(args, out) -> dict:
    if args.input is None:
        raise InputError("--input is required")
    sample = read_sample(args.input)
    n = len(sample)
    results = []
    for stat in _statistics(args):
        value = statistic_w(sample, stat.mu) if stat.kind == "W" else statistic_d(sample)
        p = p_value(stat, value, n, args.reps, args.seed, args.workers)
        results.append({"statistic": stat.label, "value": value, "p_value": p})
    report = {"n": n, "results": results, "provenance": _provenance(args, input=str(args.input))}
    rows = [[r["statistic"], n, r["value"], r["p_value"]] for r in results]
    _emit(args, report, ["statistic", "n", "value", "p-value"], rows, out)
    return report


def cmd_critical_values(args, out) -> dict:
    sizes = args.n or list(TABLE3_SIZES)
    alphas = args.alpha or list(DEFAULT_ALPHAS)
    entries = []
    for stat in _statistics(args):
        for n in sizes:
            null = simulate_null(stat, n, args.reps, args.seed, args.workers)
            for alpha in alphas:
                entries.append(
                    {"statistic": stat.label, "n": n, "alpha": alpha, "critical_value": critical_value(null, alpha)}
                )
    report = {"critical_values": entries, "provenance": _provenance(args)}
    rows = [[e["statistic"], e["n"], e["alpha"], e["critical_value"]] for e in entries]
    _emit(args, report, ["statistic", "n", "alpha", "critical"], rows, out)
    return report


def _power_models(args) -> list[AlternativeModel]:
    if args.family is not None:
        family = Family(args.family)
        if family.is_kotlarski:
            return [AlternativeModel(family)]
        thetas = args.theta or list(POWER_THETAS)
        return [AlternativeModel(family, th, args.beta) for th in thetas]
    thetas = args.theta or list(POWER_THETAS)
    return [AlternativeModel(f, th, args.beta) for f in TEST_FAMILIES for th in thetas]


def cmd_power(args, out) -> dict:
    n = args.n[0] if args.n else 100
    alphas = args.alpha or list(DEFAULT_ALPHAS)
    entries = []
    for stat in _statistics(args):
        for model in _power_models(args):
            for res in power_curve(model, stat, n, alphas, args.reps, args.seed, args.workers):
                entries.append(res.as_dict())
    report = {"power": entries, "provenance": _provenance(args, n=n)}
    rows = [[e["statistic"], e["alternative"], e["theta"], e["alpha"], e["power"]] for e in entries]
    _emit(args, report, ["statistic", "alternative", "theta", "alpha", "power"], rows, out)
    return report


def cmd_efficiency(args, out) -> dict:
    entries = []
    models = [AlternativeModel(f, 0.0, args.beta) for f in TEST_FAMILIES]
    for stat in _statistics(args):
        for model in models + [LAOAlternative(stat)]:
            entries.append(bahadur_efficiency(model, stat).as_dict())
    sup = sup_delta_d()
    constants = {
        "delta_w_squared": variance_delta_w(args.mu),
        "delta_d_squared": sup.delta2,
        "argmax_t": [sup.t_star, sup.partner],
    }
    report = {
        "efficiency": entries,
        "constants": constants,
        "provenance": _provenance(args, abs_tol=EFFICIENCY_TOL.abs_tol, rel_tol=EFFICIENCY_TOL.rel_tol),
    }
    rows = [
        [e["statistic"], e["alternative"], e["b_coeff"], e["slope_coeff"], e["kl_coeff"], e["efficiency"]]
        for e in entries
    ]
    _emit(args, report, ["statistic", "alternative", "b", "slope", "KL", "efficiency"], rows, out)
    return report


def cmd_simulate(args, out) -> dict:
    if args.family is None:
        raise InputError("--family is required")
    family = Family(args.family)
    theta = 0.0 if family.is_kotlarski else (args.theta[0] if args.theta else 0.0)
    model = AlternativeModel(family, theta, args.beta)
    n = args.n[0] if args.n else 100
    values = model.draw(n, replicate_rng(args.seed, SIMULATE_STREAM, 0))
    lines = [f"# {model.name} theta={theta!r} n={n} seed={args.seed}"]
    lines += [repr(float(v)) for v in values]
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return {"model": model.name, "theta": theta, "n": n, "seed": args.seed}


COMMANDS = {
    "test": cmd_test,
    "critical-values": cmd_critical_values,
    "power": cmd_power,
    "efficiency": cmd_efficiency,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path)
    common.add_argument("--statistic", choices=["w", "d", "both"], default="both")
    common.add_argument("--mu", type=float, default=2.0)
    common.add_argument("--n", type=int, nargs="+")
    common.add_argument("--reps", type=int, default=DEFAULT_REPS)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--alpha", type=float, nargs="+")
    common.add_argument("--family", choices=[f.value for f in Family])
    common.add_argument("--theta", type=float, nargs="+")
    common.add_argument("--beta", type=float, default=3.0)
    common.add_argument("--format", choices=["table", "json"], default="table")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--output", type=Path, help="simulate: write samples here instead of stdout")

    parser = argparse.ArgumentParser(prog="expratio", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _validate(args) -> None:
    if args.reps < MIN_REPS:
        raise InputError(f"--reps must be at least {MIN_REPS}")
    if not args.mu > 0:
        raise InputError("--mu must be positive")
    for alpha in args.alpha or []:
        if not 0 < alpha < 1:
            raise InputError(f"--alpha must lie in (0, 1), got {alpha}")
    for n in args.n or []:
        if n < 2:
            raise InputError(f"--n must be at least 2, got {n}")
    if args.workers < 1:
        raise InputError("--workers must be positive")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        _validate(args)
        COMMANDS[args.command](args, out)
    except (InputError, SampleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
