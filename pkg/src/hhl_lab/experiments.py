"""Numerical studies: the epsilon-constant fit and the random-problem sweep.

Both are deterministic functions of their config; the sweep draws problem
``i`` from substream ``i`` of the master seed (see :func:`problem.problem_rng`).
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bounds import BoundReport
from .coeffs import alpha_squared, solve_analytic
from .errors import NumericalError, ValidationError
from .params import ClockPrep, build_params
from .problem import prepare, random_problem
from .simulator import simulate_metrics

log = logging.getLogger(__name__)

ALGOS = {"variant_ancilla": "ancilla", "improved": "ancilla_and_zero_clock"}
CSV_HEADER = ["problem_id", "seed", "n_c", "algo", "infidelity", "norm_rel_error", "p_success"]


def open_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` equally spaced interior points of ``(lo, hi)``: ``lo + i (hi-lo)/(n+1)``."""
    return lo + (hi - lo) * np.arange(1, n + 1) / (n + 1)


@dataclass(frozen=True)
class FitConfig:
    lambda_points: int = 50
    t_points: int = 50
    t_range: tuple[float, float] = (0.1 * math.pi, math.pi)
    n_c_range: tuple[int, ...] = tuple(range(3, 10))
    clock_prep: ClockPrep = "hhl"
    k_min: int = 1
    # keep only points where the rotation window covers the spectral peak,
    # k_min < lambda t0 / (4 pi); set False to fit the whole grid
    restrict_to_covered_peak: bool = True


@dataclass(frozen=True)
class FitReport:
    a1: float
    a2: float
    grid: dict
    residual_rms_1: float
    residual_rms_2: float
    n_points: int
    n_excluded: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, allow_nan=False)


def least_squares_scale(eps: np.ndarray, x: np.ndarray) -> float:
    """Closed-form ``argmin_a sum (eps_i - a x_i)^2 = sum eps x / sum x^2``."""
    eps = np.asarray(eps, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise NumericalError("empty fit")
    return float(np.dot(eps, x) / np.dot(x, x))


def epsilon_grid(config: FitConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """``(lambda t T, eps1, eps2, included)`` flattened over the whole grid."""
    if config.lambda_points < 1 or config.t_points < 1 or not config.n_c_range:
        raise NumericalError("empty fit grid")
    lams = open_grid(0.0, 1.0, config.lambda_points)
    ts = open_grid(*config.t_range, config.t_points)
    lam_g, t_g = np.meshgrid(lams, ts, indexing="ij")
    lam_g, t_g = lam_g.ravel(), t_g.ravel()
    ys, e1s, e2s = [], [], []
    for n_c in config.n_c_range:
        T = 2**n_c
        prob = alpha_squared(lam_g, t_g, T, config.clock_prep)
        k = np.arange(config.k_min, T)
        w = t_g[:, None] * T / (2 * math.pi * k[None, :])
        tail = prob[:, config.k_min :]
        e1s.append(lam_g * np.sum(tail * w, axis=1) - 1.0)
        e2s.append(lam_g**2 * np.sum(tail * w * w, axis=1) - 1.0)
        ys.append(lam_g * t_g * T)
    y = np.concatenate(ys)
    included = np.ones(y.size, dtype=bool)
    if config.restrict_to_covered_peak:
        included = y > 4 * math.pi * config.k_min
    return y, np.concatenate(e1s), np.concatenate(e2s), included


def fit_epsilon_constants(config: FitConfig = FitConfig()) -> FitReport:
    """Fit ``eps_l ~ a_l (lambda t T)^-2`` by unweighted least squares, pooled over ``n_c``."""
    y, e1, e2, inc = epsilon_grid(config)
    if not np.any(inc):
        raise NumericalError("no grid point inside the fit domain")
    x = y[inc] ** -2.0
    a1 = least_squares_scale(e1[inc], x)
    a2 = least_squares_scale(e2[inc], x)
    res1 = e1[inc] - a1 * x
    res2 = e2[inc] - a2 * x
    grid = {
        "lambda_points": config.lambda_points,
        "t_points": config.t_points,
        "t_range": list(config.t_range),
        "n_c_range": list(config.n_c_range),
        "clock_prep": config.clock_prep,
        "k_min": config.k_min,
        "domain": "lambda*t*T > 4*pi*k_min" if config.restrict_to_covered_peak else "all",
    }
    return FitReport(
        a1=a1,
        a2=a2,
        grid=grid,
        residual_rms_1=float(np.sqrt(np.mean(res1**2))),
        residual_rms_2=float(np.sqrt(np.mean(res2**2))),
        n_points=int(inc.sum()),
        n_excluded=int((~inc).sum()),
    )


# -- random sweep -------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    problems: int = 50
    seed: int = 7
    d: int = 2
    n_c_range: tuple[int, ...] = tuple(range(3, 12))
    t: float = 8 * math.pi / 5
    k_min: int = 1
    clock_prep: ClockPrep = "uniform"
    algos: tuple[str, ...] = ("variant_ancilla", "improved")
    crosscheck_per_nc: int = 5
    crosscheck_max_nc: int = 9
    crosscheck_tol: float = 1e-9
    threads: int = 1


@dataclass(frozen=True)
class SweepRow:
    problem_id: int
    seed: int
    n_c: int
    algo: str
    infidelity: float
    norm_rel_error: float
    p_success: float


def _problem_rows(config: SweepConfig, pid: int) -> list[SweepRow]:
    prepared = prepare(random_problem(config.seed, config.d, index=pid))
    rows = []
    for n_c in config.n_c_range:
        for algo in config.algos:
            params = build_params(
                n_c, config.t, k_min=config.k_min, clock_prep=config.clock_prep, postselect=ALGOS[algo]
            )
            m = solve_analytic(prepared, params)
            if pid < config.crosscheck_per_nc and n_c <= config.crosscheck_max_nc:
                sim = simulate_metrics(prepared, params)
                dev = abs(sim.infidelity - m.infidelity)
                if dev > config.crosscheck_tol:
                    raise NumericalError(
                        f"simulator disagrees with closed form: problem {pid}, n_c={n_c}, {algo}, |dev|={dev:.3g}"
                    )
                log.debug("crosscheck problem=%d n_c=%d %s dev=%.2e", pid, n_c, algo, dev)
            rows.append(
                SweepRow(pid, config.seed, n_c, algo, m.infidelity, m.norm_rel_error, m.p_success)
            )
    return rows


def random_sweep(config: SweepConfig = SweepConfig()) -> list[SweepRow]:
    """Closed-form errors for every (problem, n_c, algorithm), ordered by (problem_id, n_c).

    The first ``crosscheck_per_nc`` problems are also simulated for every
    ``n_c <= crosscheck_max_nc``; a disagreement above ``crosscheck_tol``
    raises :class:`NumericalError`.
    """
    for algo in config.algos:
        if algo not in ALGOS:
            raise ValidationError(f"unknown algorithm {algo!r}")
    pids = range(config.problems)
    if config.threads > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            chunks = list(pool.map(lambda i: _problem_rows(config, i), pids))
    else:
        chunks = [_problem_rows(config, i) for i in pids]
    return [row for chunk in chunks for row in chunk]


def geometric_mean(values: Iterable[float]) -> float:
    v = np.asarray(list(values), dtype=float)
    # exact zeros (resonant problems) would collapse the log-mean
    v = np.maximum(v, np.finfo(float).tiny)
    return float(np.exp(np.mean(np.log(v))))


def summarize(rows: Sequence[SweepRow], metric: str = "infidelity") -> dict[str, dict[int, dict[str, float]]]:
    """Per algorithm and ``n_c``: geometric and arithmetic means of ``metric``."""
    groups: dict[tuple[str, int], list[float]] = {}
    for r in rows:
        groups.setdefault((r.algo, r.n_c), []).append(getattr(r, metric))
    out: dict[str, dict[int, dict[str, float]]] = {}
    for (algo, n_c), vals in sorted(groups.items()):
        out.setdefault(algo, {})[n_c] = {"geo_mean": geometric_mean(vals), "mean": float(np.mean(vals))}
    return out


# -- artifacts ----------------------------------------------------------------


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [r.problem_id, r.seed, r.n_c, r.algo, repr(float(r.infidelity)),
             repr(float(r.norm_rel_error)), repr(float(r.p_success))]
        )
    return buf.getvalue()


def summary_to_csv(rows: Sequence[SweepRow]) -> str:
    inf = summarize(rows, "infidelity")
    ne = summarize(rows, "norm_rel_error")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algo", "n_c", "geo_mean_infidelity", "mean_infidelity",
                     "geo_mean_norm_rel_error", "mean_norm_rel_error"])
    for algo in inf:
        for n_c in inf[algo]:
            a, b = inf[algo][n_c], ne[algo][n_c]
            writer.writerow([algo, n_c, repr(a["geo_mean"]), repr(a["mean"]),
                             repr(b["geo_mean"]), repr(b["mean"])])
    return buf.getvalue()


def plot_sweep_svg(rows: Sequence[SweepRow]) -> str:
    """Log-linear plot of per-problem errors and geometric-mean curves, as SVG text."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    styles = {"variant_ancilla": ("tab:green", "o", "--"), "improved": ("tab:blue", "x", "-")}
    with matplotlib.rc_context({"svg.hashsalt": "hhl-lab", "svg.fonttype": "none"}):
        fig, axes = plt.subplots(1, 2, figsize=(10, 4))
        for ax, metric, label in zip(axes, ("infidelity", "norm_rel_error"), ("infidelity", "norm error")):
            summary = summarize(rows, metric)
            for algo, by_nc in summary.items():
                color, marker, line = styles.get(algo, ("k", ".", "-"))
                pts = [(r.n_c, max(getattr(r, metric), 1e-300)) for r in rows if r.algo == algo]
                if pts:
                    xs, ys = zip(*pts)
                    ax.scatter(xs, ys, s=8, color=color, marker=marker, alpha=0.4, linewidths=0.8)
                ncs = sorted(by_nc)
                ax.plot(ncs, [by_nc[n]["geo_mean"] for n in ncs], line, color=color, label=algo)
            ax.set_yscale("log")
            ax.set_xlabel("clock qubits n_c")
            ax.set_ylabel(label)
            ax.legend()
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()


def _write(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_artifacts(obj, path: str | Path, stem: str | None = None) -> list[Path]:
    """Write artifacts for sweep rows, a :class:`FitReport` or a :class:`BoundReport`.

    ``path`` is an output directory (created if needed). Sweep rows produce
    ``<stem>.csv``, ``<stem>_summary.csv`` and ``<stem>.svg``; reports
    produce ``<stem>.json``.
    """
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    if isinstance(obj, FitReport):
        return [_write(out / f"{stem or 'fit'}.json", obj.to_json() + "\n")]
    if isinstance(obj, BoundReport):
        return [_write(out / f"{stem or 'bounds'}.json", obj.to_json() + "\n")]
    rows = list(obj)
    stem = stem or "sweep"
    return [
        _write(out / f"{stem}.csv", rows_to_csv(rows)),
        _write(out / f"{stem}_summary.csv", summary_to_csv(rows)),
        _write(out / f"{stem}.svg", plot_sweep_svg(rows)),
    ]


def rows_to_json(rows: Sequence[SweepRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=1)
