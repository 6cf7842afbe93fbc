"""Command-line entry point: ``hhl-lab {solve,fit,sweep,bounds,complexity}``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import bounds, experiments
from .coeffs import solve_analytic
from .errors import NumericalError, ValidationError
from .params import build_params
from .problem import load_problem, prepare, random_problem

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
POST_FLAGS = {"a": "ancilla", "a0": "ancilla_and_zero_clock"}

log = logging.getLogger("hhl_lab")


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags already; route through our handler
    # so the message format matches other validation errors
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_range(text: str) -> tuple[int, ...]:
    """``"A..B"`` inclusive, or a single integer.

    >>> parse_range("3..5"), parse_range("7")
    ((3, 4, 5), (7,))
    """
    m = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected A..B or an integer, got {text!r}")
    a = int(m.group(1))
    b = int(m.group(2)) if m.group(2) is not None else a
    if b < a:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return tuple(range(a, b + 1))


def parse_angle(text: str) -> float:
    """A float, optionally in multiples of pi: ``1.2``, ``pi``, ``8pi/5``, ``0.5*pi``."""
    s = text.replace(" ", "").lower()
    m = re.fullmatch(r"([0-9.eE+-]*)\*?pi(?:/([0-9.eE+-]+))?", s)
    try:
        if m:
            num = float(m.group(1)) if m.group(1) not in ("", "+") else 1.0
            if m.group(1) == "-":
                num = -1.0
            den = float(m.group(2)) if m.group(2) else 1.0
            value = num * math.pi / den
        else:
            value = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as a number or multiple of pi") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"{text!r} is not finite")
    return value


def _global_flags() -> argparse.ArgumentParser:
    g = _Parser(add_help=False)
    g.add_argument("--seed", type=int, default=7, help="master seed for all randomness (default 7)")
    g.add_argument("--threads", type=int, default=1, help="worker threads for sweeps (default 1)")
    g.add_argument("--out", type=Path, default=Path("."), help="output directory (default .)")
    g.add_argument("--format", choices=("csv", "json"), default="csv", help="tabular output format")
    g.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    return g


def _circuit_flags(p: argparse.ArgumentParser, nc_default: str, t_default: str) -> None:
    p.add_argument("--nc", type=parse_range, default=parse_range(nc_default),
                   help=f"clock qubits, A..B or single value (default {nc_default})")
    p.add_argument("--t", type=parse_angle, default=parse_angle(t_default),
                   help=f"evolution time per clock step, e.g. 8pi/5 (default {t_default})")
    p.add_argument("--kappa-prime", type=float, default=None, help="condition-number bound; sets k_min")
    p.add_argument("--clock", choices=("hhl", "uniform"), default="uniform", help="clock preparation")
    p.add_argument("--post", choices=tuple(POST_FLAGS), default="a0",
                   help="postselect ancilla only (a) or ancilla and clock zero (a0)")
    p.add_argument("--mode", choices=("positive", "signed"), default="positive", help="eigenvalue sign mode")


def build_parser() -> argparse.ArgumentParser:
    g = _global_flags()
    root = _Parser(prog="hhl-lab", description="HHL error analysis: closed forms, simulation and sweeps.")
    sub = root.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[g], help="closed-form metrics for one problem (JSON on stdout)")
    p.add_argument("problem", type=Path, help="problem JSON file")
    _circuit_flags(p, "6", "pi")
    p.add_argument("--lambda-max", type=float, default=None, help="spectral-radius estimate for rescaling")
    p.add_argument("--simulate", action="store_true", help="cross-check against the state-vector simulator")

    p = sub.add_parser("fit", parents=[g], help="fit eps1, eps2 ~ a/(lambda t T)^2")
    p.add_argument("--nc", type=parse_range, default=parse_range("3..9"), help="clock qubits (default 3..9)")
    p.add_argument("--points", type=int, default=50, help="grid points per axis (default 50)")
    p.add_argument("--clock", choices=("hhl", "uniform"), default="hhl", help="clock preparation (default hhl)")
    p.add_argument("--full-grid", action="store_true", help="fit every grid point, not just lambda t T > 4 pi")

    p = sub.add_parser("sweep", parents=[g], help="random-problem error sweep")
    p.add_argument("--problems", type=int, default=50, help="number of random problems (default 50)")
    p.add_argument("--d", type=int, default=2, help="problem dimension (default 2)")
    p.add_argument("--nc", type=parse_range, default=parse_range("3..11"), help="clock qubits (default 3..11)")
    p.add_argument("--t", type=parse_angle, default=8 * math.pi / 5, help="evolution time (default 8pi/5)")
    p.add_argument("--clock", choices=("hhl", "uniform"), default="uniform", help="clock preparation")
    p.add_argument("--no-crosscheck", action="store_true", help="skip simulator cross-checks")

    p = sub.add_parser("bounds", parents=[g], help="bounded-ratio checks of the convergence rates")
    p.add_argument("--problems", type=int, default=10, help="number of random problems (default 10)")
    p.add_argument("--nc", type=parse_range, default=parse_range("4..12"), help="clock qubits (default 4..12)")
    p.add_argument("--t", type=parse_angle, default=8 * math.pi / 5, help="evolution time (default 8pi/5)")
    p.add_argument("--k-min", type=int, default=1, help="smallest rotated clock value (default 1)")

    p = sub.add_parser("complexity", parents=[g], help="clock size, query and gate counts")
    p.add_argument("--s", type=int, required=True, help="sparsity")
    p.add_argument("--d", type=int, required=True, help="dimension")
    p.add_argument("--kappa", type=float, required=True, help="condition number")
    p.add_argument("--kappa-prime", type=float, default=None, help="condition-number bound (default kappa)")
    p.add_argument("--eps", type=float, required=True, help="target error")
    p.add_argument("--algorithm", choices=("improved", "hhl"), default="improved")
    return root


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def cmd_solve(args) -> dict:
    from .simulator import simulate_metrics

    prepared = prepare(load_problem(args.problem), lambda_max_estimate=args.lambda_max, mode=args.mode)
    reports = []
    for n_c in args.nc:
        params = build_params(n_c, args.t, kappa_prime=args.kappa_prime, clock_prep=args.clock,
                              postselect=POST_FLAGS[args.post], mode=args.mode)
        m = solve_analytic(prepared, params)
        rep = {"n_c": n_c, "T": params.T, "t": params.t, "k_min": params.k_min, "C": params.C,
               "kappa": prepared.kappa, "clock_prep": params.clock_prep, "warnings": list(params.notes)}
        rep.update(m.as_dict())
        if args.simulate:
            sim = simulate_metrics(prepared, params)
            rep["simulated"] = {"p0": sim.p0, "p_tilde": sim.p_tilde, "fidelity": sim.fidelity,
                                "infidelity": sim.infidelity}
        reports.append(rep)
    out = reports[0] if len(reports) == 1 else reports
    print(json.dumps(_jsonable(out), indent=1))
    return out


def cmd_fit(args) -> None:
    cfg = experiments.FitConfig(lambda_points=args.points, t_points=args.points, n_c_range=args.nc,
                                clock_prep=args.clock, restrict_to_covered_peak=not args.full_grid)
    rep = experiments.fit_epsilon_constants(cfg)
    paths = experiments.emit_artifacts(rep, args.out)
    print(f"a1={rep.a1:.4f} a2={rep.a2:.4f} points={rep.n_points} -> {paths[0]}")


def cmd_sweep(args) -> None:
    if args.problems < 1:
        raise ValidationError("--problems must be >= 1")
    cfg = experiments.SweepConfig(problems=args.problems, seed=args.seed, d=args.d, n_c_range=args.nc,
                                  t=args.t, clock_prep=args.clock, threads=args.threads,
                                  crosscheck_per_nc=0 if args.no_crosscheck else 5)
    rows = experiments.random_sweep(cfg)
    paths = experiments.emit_artifacts(rows, args.out)
    if args.format == "json":
        paths.append(experiments._write(Path(args.out) / "sweep.json", experiments.rows_to_json(rows) + "\n"))
    summary = experiments.summarize(rows)
    last = max(args.nc)
    gm = {a: f"{summary[a][last]['geo_mean']:.3g}" for a in summary}
    print(f"{len(rows)} rows; geo-mean infidelity at n_c={last}: {gm} -> {', '.join(map(str, paths))}")


def cmd_bounds(args) -> None:
    probs = [prepare(random_problem(args.seed, 2, index=i)) for i in range(args.problems)]
    rep = bounds.run_bound_suite(probs, args.t, args.nc, k_min=args.k_min)
    paths = experiments.emit_artifacts(rep, args.out)
    counts: dict[str, list[int]] = {}
    for c in rep.checks:
        counts.setdefault(c.name, [0, 0])
        counts[c.name][0] += c.holds
        counts[c.name][1] += 1
    text = " ".join(f"{k}={a}/{b}" for k, (a, b) in counts.items())
    print(f"{text} -> {paths[0]}")


def cmd_complexity(args) -> dict:
    kp = args.kappa if args.kappa_prime is None else args.kappa_prime
    est = bounds.gate_complexity(args.s, args.d, args.kappa, kp, args.eps, algorithm=args.algorithm)
    rep = est.as_dict()
    rep["T_from_error"] = rep["T"]
    if args.format == "json" or args.out == Path("."):
        print(json.dumps(_jsonable(rep), indent=1))
    if args.out != Path("."):
        args.out.mkdir(parents=True, exist_ok=True)
        experiments._write(args.out / "complexity.json", json.dumps(_jsonable(rep), indent=1) + "\n")
    return rep


COMMANDS = {"solve": cmd_solve, "fit": cmd_fit, "sweep": cmd_sweep, "bounds": cmd_bounds,
            "complexity": cmd_complexity}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
