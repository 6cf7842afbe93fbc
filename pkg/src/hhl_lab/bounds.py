"""Convergence-bound checks and complexity estimates.

Asymptotic statements ``f(T) = O(g(T))`` carry no constants, so they are
checked as bounded-ratio tests on the envelope of ``f/g`` over a range of
clock sizes: the largest ratio in the upper half of the range may not exceed
twice the largest ratio in the lower half (:func:`bounded_ratio`). The ratios
oscillate with ``sin^2(lambda t T / 2)``; comparing envelopes rather than a
median keeps those troughs from deciding the outcome.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .coeffs import epsilons, solve_analytic
from .errors import ValidationError
from .params import ClockPrep, build_params
from .problem import PreparedProblem

INV_E = math.exp(-1.0)


def lambert_w_minus1(z: float) -> float:
    """Lower real branch ``W_{-1}(z)`` for ``-1/e <= z < 0``.

    Bracketed bisection on the decreasing map ``w -> w e^w`` over
    ``(-inf, -1]``, followed by two Halley steps.

    >>> round(lambert_w_minus1(-0.1), 6)
    -3.577152
    """
    z = float(z)
    if not (-INV_E - 1e-15 <= z < 0.0):
        raise ValidationError(f"W_-1 is defined on [-1/e, 0), got z={z}")
    if z <= -INV_E:
        return -1.0

    def f(w: float) -> float:
        return w * math.exp(w) - z

    hi = -1.0  # f(hi) = -1/e - z < 0
    lo = -2.0
    while f(lo) <= 0.0:  # need f(lo) > 0, i.e. lo e^lo closer to zero than z
        lo *= 2.0
    while hi - lo > 1e-14 * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    w = 0.5 * (lo + hi)
    for _ in range(2):
        ew = math.exp(w)
        fw = w * ew - z
        if fw == 0.0 or w == -1.0:
            break
        wp1 = w + 1.0
        w_new = w - fw / (ew * wp1 - (w + 2.0) * fw / (2.0 * wp1))
        # Halley can overshoot right at the branch point; keep the bisection result then
        if not (w_new <= -1.0 and abs(w_new * math.exp(w_new) - z) <= abs(fw)):
            break
        w = w_new
    return w


@dataclass(frozen=True)
class ComplexityEstimate:
    """Clock size, query and gate counts with unit prefactors."""

    s: int
    d: int
    T: float
    kappa: float
    kappa_prime: float
    epsilon: float
    query_complexity: float
    gate_complexity: float
    aa_repetitions: float
    n_c: int
    algorithm: str

    def as_dict(self) -> dict:
        return asdict(self)


def gate_complexity(
    s: int,
    d: int,
    kappa: float,
    kappa_prime: float,
    epsilon: float,
    algorithm: str = "improved",
) -> ComplexityEstimate:
    """Invert the error-vs-clock relation and count queries and gates.

    ``improved`` uses ``eps = sqrt(kappa/T ln(T/kappa))``, inverted to
    ``T = -(kappa/eps^2) W_{-1}(-eps^2)``. ``hhl`` uses ``eps = kappa/T``.
    With ``M = T kappa'/kappa`` circuit-time units (clock length times the
    amplitude-amplification repetitions ``kappa'/kappa``)::

        Q = s M
        G = M (s log2 d + log2(M)^2)
    """
    if isinstance(s, bool) or int(s) != s or s < 1:
        raise ValidationError("s must be an integer >= 1")
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise ValidationError("d must be an integer >= 2")
    if not kappa >= 1:
        raise ValidationError("kappa must be >= 1")
    if not kappa_prime >= kappa:
        raise ValidationError("kappa_prime must be >= kappa")
    if not 0 < epsilon < 1:
        raise ValidationError("epsilon must lie in (0, 1)")
    if algorithm == "improved":
        z = -(epsilon**2)
        if z < -INV_E:
            raise ValidationError("epsilon^2 > 1/e: the error relation has no real inverse")
        T = -(kappa / epsilon**2) * lambert_w_minus1(z)
    elif algorithm == "hhl":
        T = kappa / epsilon
    else:
        raise ValidationError(f"unknown algorithm {algorithm!r}")
    reps = kappa_prime / kappa
    m = T * reps
    Q = s * m
    G = m * (s * math.log2(d) + math.log2(m) ** 2)
    return ComplexityEstimate(
        s=int(s),
        d=int(d),
        T=T,
        kappa=float(kappa),
        kappa_prime=float(kappa_prime),
        epsilon=float(epsilon),
        query_complexity=Q,
        gate_complexity=G,
        aa_repetitions=reps,
        n_c=max(1, math.ceil(math.log2(T))),
        algorithm=algorithm,
    )


# -- bounded-ratio checks -----------------------------------------------------


def bounded_ratio(series: Sequence[float], factor: float = 2.0) -> bool:
    """True iff ``max(upper half) <= factor * max(lower half)``.

    For odd lengths the middle element belongs to both halves. An all-zero
    series is bounded.
    """
    s = np.asarray(series, dtype=float)
    if s.size == 0 or not np.all(np.isfinite(s)):
        return False
    n = s.size
    lower = s[: (n + 1) // 2].max()
    upper = s[n // 2 :].max()
    return bool(upper <= factor * lower)


def _log_clamped(v):
    # ln(v) / v scales only make sense for v > e; clamp so they stay positive
    return np.log(np.maximum(v, math.e))


@dataclass
class BoundCheck:
    """One serialized check: ``ratio = value / scale`` per series point."""

    name: str
    inputs: dict
    value: list
    scale: list
    ratio: list
    holds: bool
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class BoundReport:
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def holds(self) -> dict[str, bool]:
        return {c.name: c.holds for c in self.checks}

    def add(self, check: BoundCheck) -> BoundCheck:
        self.checks.append(check)
        return check

    def to_json(self) -> str:
        return json.dumps([c.as_dict() for c in self.checks], indent=1, allow_nan=False)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def _check_range(n_c_range: Sequence[int]) -> list[int]:
    ncs = [int(n) for n in n_c_range]
    if not ncs or any(b <= a for a, b in zip(ncs, ncs[1:])):
        raise ValidationError("n_c_range must be non-empty and strictly ascending")
    return ncs


def check_eps1_scaling(
    lam: float,
    t: float,
    n_c_range: Sequence[int],
    clock_prep: ClockPrep = "uniform",
    k_min: int = 1,
) -> BoundCheck:
    """``|eps1| <= O(ln(lambda t T) / (lambda t T))`` as a bounded ratio over ``T``."""
    ncs = _check_range(n_c_range)
    values, scales = [], []
    for n_c in ncs:
        p = build_params(n_c, t, k_min=k_min, clock_prep=clock_prep)
        e1, _ = epsilons(lam, p)
        y = lam * t * p.T
        values.append(abs(e1))
        scales.append(float(_log_clamped(y) / y))
    ratios = [v / s for v, s in zip(values, scales)]
    return BoundCheck(
        name="eps1_scaling",
        inputs={"lambda": lam, "t": t, "T": [2**n for n in ncs], "clock_prep": clock_prep, "k_min": k_min},
        value=values,
        scale=scales,
        ratio=ratios,
        holds=bounded_ratio(ratios),
    )


def check_eps2_bounds(lam: float, t: float, n_c: int, k_min: int = 1, slack: float = 0.8) -> BoundCheck:
    """Compare ``|eps2|`` of the uniform clock with its explicit lower term.

    The lower term is ``sin^2(lambda t T / 2) (2 kappa'/(tT))^2`` with the
    effective ``kappa' = t0 / (4 pi k_min)``. ``holds`` is
    ``|eps2| >= slack * lower``; the slack absorbs the unspecified
    ``O(ln(lambda t T)/(lambda t T))`` term.
    """
    p = build_params(n_c, t, k_min=k_min, clock_prep="uniform")
    _, e2 = epsilons(lam, p)
    kp = p.kappa_prime_effective
    lower = math.sin(lam * p.t0 / 2) ** 2 * (2 * kp / p.t0) ** 2
    value = abs(e2)
    return BoundCheck(
        name="eps2_lower_bound",
        inputs={"lambda": lam, "t": t, "T": p.T, "k_min": k_min, "kappa_prime": kp, "slack": slack},
        value=[value],
        scale=[lower],
        ratio=[value / lower if lower > 0 else None],
        holds=bool(value >= slack * lower),
    )


def check_improved_error_scaling(
    problem: PreparedProblem,
    t: float,
    n_c_range: Sequence[int],
    postselect: str = "ancilla_and_zero_clock",
    k_min: int = 1,
) -> BoundCheck:
    """Distance divided by ``sqrt(kappa ln(tT/kappa) / (tT))``, bounded over ``T``."""
    ncs = _check_range(n_c_range)
    values, scales = [], []
    kappa = problem.kappa
    for n_c in ncs:
        p = build_params(n_c, t, k_min=k_min, clock_prep="uniform", postselect=postselect, mode=problem.mode)
        m = solve_analytic(problem, p)
        tT = t * p.T
        values.append(m.distance)
        scales.append(math.sqrt(kappa * float(_log_clamped(tT / kappa)) / tT))
    ratios = [v / s for v, s in zip(values, scales)]
    return BoundCheck(
        name="improved_error_scaling" if postselect == "ancilla_and_zero_clock" else "variant_error_scaling",
        inputs={"t": t, "T": [2**n for n in ncs], "kappa": kappa, "postselect": postselect, "k_min": k_min},
        value=values,
        scale=scales,
        ratio=ratios,
        holds=bounded_ratio(ratios),
    )


def check_norm_bound(problem: PreparedProblem, params) -> BoundCheck:
    """Squared-norm relative error of the improved variant at one parameter set.

    ``value = | ||x||^2 - ||x~||^2 | / ||x||^2 = |p - p~| / p`` and
    ``scale = ln(y) / y`` with ``y = lambda_min t T``.
    """
    p = params.replace(postselect="ancilla_and_zero_clock")
    m = solve_analytic(problem, p)
    value = abs(m.p_ideal - m.p_tilde) / m.p_ideal
    y = problem.lambda_min * p.t0
    scale = float(_log_clamped(y) / y)
    return BoundCheck(
        name="norm_bound",
        inputs={"t": p.t, "T": p.T, "lambda_min": problem.lambda_min, "k_min": p.k_min},
        value=[value],
        scale=[scale],
        ratio=[value / scale],
        holds=bool(np.isfinite(value / scale)),
    )


def check_norm_scaling(problem: PreparedProblem, t: float, n_c_range: Sequence[int], k_min: int = 1) -> BoundCheck:
    """:func:`check_norm_bound` over a range of clock sizes, as a bounded ratio."""
    ncs = _check_range(n_c_range)
    values, scales = [], []
    for n_c in ncs:
        p = build_params(n_c, t, k_min=k_min, clock_prep="uniform", mode=problem.mode)
        c = check_norm_bound(problem, p)
        values.append(c.value[0])
        scales.append(c.scale[0])
    ratios = [v / s for v, s in zip(values, scales)]
    return BoundCheck(
        name="norm_scaling",
        inputs={"t": t, "T": [2**n for n in ncs], "lambda_min": problem.lambda_min, "k_min": k_min},
        value=values,
        scale=scales,
        ratio=ratios,
        holds=bounded_ratio(ratios),
    )


def run_bound_suite(
    problems: Sequence[PreparedProblem],
    t: float,
    n_c_range: Sequence[int],
    k_min: int = 1,
    eps2_n_c: int = 11,
) -> BoundReport:
    """Every bound check over a set of problems.

    For each problem: ``eps1`` scaling at each eigenvalue, distance scaling of
    both postselection choices, squared-norm scaling, and the ``eps2`` lower
    term at the anti-resonant eigenvalue nearest ``lambda_min`` for a clock of
    ``eps2_n_c`` qubits.
    """
    report = BoundReport()
    T2 = 2**eps2_n_c
    for i, prob in enumerate(problems):
        for lam in prob.eigenvalues:
            c = report.add(check_eps1_scaling(float(abs(lam)), t, n_c_range, k_min=k_min))
            c.inputs["problem"] = i
        for post in ("ancilla_and_zero_clock", "ancilla"):
            c = report.add(check_improved_error_scaling(prob, t, n_c_range, postselect=post, k_min=k_min))
            c.inputs["problem"] = i
        c = report.add(check_norm_scaling(prob, t, n_c_range, k_min=k_min))
        c.inputs["problem"] = i
        # sin^2(lambda t T/2) = 1 at lambda = (2m+1) pi / (t T)
        m = max(0, round((abs(prob.lambda_min) * t * T2 / math.pi - 1) / 2))
        lam_ar = (2 * m + 1) * math.pi / (t * T2)
        if lam_ar <= 1:
            c = report.add(check_eps2_bounds(lam_ar, t, eps2_n_c, k_min=k_min))
            c.inputs["problem"] = i
    return report
