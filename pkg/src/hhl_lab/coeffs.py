"""Closed-form phase-estimation amplitudes and the error metrics built on them.

After phase estimation the clock holds ``sum_k alpha_{k|j} |k>`` for every
eigenvector ``u_j``. Both clock preparations give amplitudes that depend on
``lambda_j`` only through ``x = lambda_j t0 - 2 pi k``:

* uniform clock: ``alpha = e^{i phi} sin(x/2) / (T sin(x/(2T)))``
* sine clock:    ``alpha = e^{i phi} sqrt(2) cos(x/2) cos(x/(2T)) sin(pi/(2T))
  / (T sin((x+pi)/(2T)) sin((pi-x)/(2T)))``

with ``phi = x (1 - 1/T) / 2``. Every metric of the algorithms is a sum of
``|alpha|^2`` against powers of the eigenvalue-inverse estimate
``tT / (2 pi k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePostselection, ValidationError
from .params import ClockPrep, HHLParams
from .problem import PreparedProblem

SINGULAR_TOL = 1e-8
DEGENERATE_P = 1e-300
DEGENERATE_REL = 1e-24


def _wrap(x: np.ndarray, T: int) -> np.ndarray:
    """Reduce ``x`` to ``[-pi T, pi T)``; both amplitude forms have period ``2 pi T``."""
    period = 2 * math.pi * T
    return x - period * np.floor((x + math.pi * T) / period)


def _dirichlet(u: np.ndarray, T: int) -> np.ndarray:
    """``sin(u/2) / (T sin(u/(2T)))`` with its limit 1 at ``u = 0``."""
    u = np.asarray(u, dtype=float)
    out = np.ones_like(u)
    mask = np.abs(u) >= SINGULAR_TOL
    um = u[mask]
    out[mask] = np.sin(um / 2) / (T * np.sin(um / (2 * T)))
    return out


def _phase(x: np.ndarray, T: int) -> np.ndarray:
    return np.exp(0.5j * x * (1 - 1 / T))


def _uniform_from_x(x: np.ndarray, T: int) -> np.ndarray:
    x = _wrap(np.asarray(x, dtype=float), T)
    return _phase(x, T) * _dirichlet(x, T)


def _hhl_from_x(x: np.ndarray, T: int) -> np.ndarray:
    # cos(x/2) = sin((x+pi)/2) = -sin((x-pi)/2); pairing it with the vanishing
    # denominator factor leaves a Dirichlet ratio that is smooth at x = -pi or x = +pi
    x = _wrap(np.asarray(x, dtype=float), T)
    s = math.sin(math.pi / (2 * T))
    common = math.sqrt(2) * np.cos(x / (2 * T)) * s
    near_minus = np.abs(x + math.pi) <= np.abs(x - math.pi)
    out = np.empty_like(x)
    xm = x[near_minus]
    out[near_minus] = common[near_minus] * _dirichlet(xm + math.pi, T) / np.sin((math.pi - xm) / (2 * T))
    xp = x[~near_minus]
    out[~near_minus] = common[~near_minus] * _dirichlet(xp - math.pi, T) / np.sin((xp + math.pi) / (2 * T))
    return _phase(x, T) * out


def _x_grid(lam, params: HHLParams) -> np.ndarray:
    k = np.arange(params.T)
    return np.multiply.outer(np.asarray(lam, dtype=float) * params.t0, np.ones(params.T)) - 2 * math.pi * k


def alpha_uniform(lam: float, params: HHLParams) -> np.ndarray:
    """Phase-estimation amplitudes over ``k = 0..T-1`` for the Hadamard clock."""
    return _uniform_from_x(_x_grid(lam, params), params.T)


def alpha_hhl(lam: float, params: HHLParams) -> np.ndarray:
    """Phase-estimation amplitudes over ``k = 0..T-1`` for the sine-weighted clock."""
    return _hhl_from_x(_x_grid(lam, params), params.T)


def alpha(lam, params: HHLParams, clock_prep: ClockPrep | None = None) -> np.ndarray:
    """Amplitudes for ``params.clock_prep`` (or the override); ``lam`` may be an array."""
    prep = clock_prep or params.clock_prep
    if prep == "uniform":
        return alpha_uniform(lam, params)
    if prep == "hhl":
        return alpha_hhl(lam, params)
    raise ValidationError(f"unknown clock preparation {prep!r}")


def alpha_squared(lam, t, T: int, clock_prep: ClockPrep) -> np.ndarray:
    """``|alpha_{k|j}|^2`` for arrays of ``lam`` and ``t`` (broadcast), shape ``(..., T)``.

    Vectorized path used by the grid fit; skips the phase factor.
    """
    y = np.asarray(lam, dtype=float) * np.asarray(t, dtype=float) * T
    x = y[..., None] - 2 * math.pi * np.arange(T)
    if clock_prep == "uniform":
        amp = _dirichlet(_wrap(x, T).ravel(), T).reshape(x.shape)
    elif clock_prep == "hhl":
        amp = np.abs(_hhl_from_x(x.ravel(), T)).reshape(x.shape)
    else:
        raise ValidationError(f"unknown clock preparation {clock_prep!r}")
    return amp * amp


@dataclass(frozen=True)
class CoefficientTable:
    """``alpha[k, j]``: amplitude of clock value ``k`` given eigenvalue ``j``."""

    alpha: np.ndarray
    clock_prep: ClockPrep
    params: HHLParams

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.alpha) ** 2


def coefficient_table(problem: PreparedProblem, params: HHLParams) -> CoefficientTable:
    table = alpha(problem.eigenvalues, params).T.copy()
    table.setflags(write=False)
    return CoefficientTable(table, params.clock_prep, params)


def _moments(prob: np.ndarray, params: HHLParams) -> tuple[np.ndarray, np.ndarray]:
    """First and second inverse moments ``sum_k |alpha|^2 w_k`` and ``... w_k^2``."""
    w = params.inverse_weights()
    return prob @ w, prob @ (w * w)


def epsilons(lam, params: HHLParams, clock_prep: ClockPrep | None = None) -> tuple:
    """Relative deviations of the first and second inverse moments.

    ``eps1 = lam * sum_k |alpha|^2 w_k - 1`` and
    ``eps2 = lam^2 * sum_k |alpha|^2 w_k^2 - 1`` with ``w_k = tT/(2 pi k)``
    over the rotated clock values. Scalars in, scalars out; arrays broadcast.
    """
    lam_arr = np.asarray(lam, dtype=float)
    prob = np.abs(alpha(lam_arr, params, clock_prep)) ** 2
    m1, m2 = _moments(prob, params)
    eps1 = lam_arr * m1 - 1.0
    eps2 = lam_arr**2 * m2 - 1.0
    if eps1.ndim == 0:
        return float(eps1), float(eps2)
    return eps1, eps2


@dataclass(frozen=True)
class ErrorMetrics:
    """Closed-form figures of merit for one problem and parameter set.

    ``fidelity`` is the overlap with the ideal output for the postselection
    in ``postselect``: ancilla only (plain variant or original
    algorithm) or ancilla with the clock back in zero (improved variant).
    ``x_approx`` is ``sum_j beta_j / lambda_tilde_j u_j`` in the rescaled
    units of the prepared problem.
    """

    eps1: np.ndarray
    eps2: np.ndarray
    p_ideal: float
    p0: float
    p_tilde: float
    lambda_tilde: np.ndarray
    fidelity: float
    distance: float
    infidelity: float
    norm_rel_error: float
    x_approx: np.ndarray
    x_norm: float
    norm_estimate: float
    postselect: str
    norm_estimator: str

    @property
    def p_success(self) -> float:
        """Probability of the postselected outcome."""
        return self.p0 if self.postselect == "ancilla" else self.p_tilde

    @property
    def aa_repetitions(self) -> float:
        """Amplitude-amplification cost ``1/sqrt(p_success)``."""
        return 1.0 / math.sqrt(self.p_success)

    def as_dict(self) -> dict:
        def conv(v):
            if isinstance(v, np.ndarray):
                if np.iscomplexobj(v):
                    return [{"re": float(z.real), "im": float(z.imag)} for z in v]
                return [float(z) for z in v]
            return v

        out = {name: conv(getattr(self, name)) for name in self.__dataclass_fields__}
        out["p_success"] = self.p_success
        out["aa_repetitions"] = self.aa_repetitions
        return out


def solve_analytic(problem: PreparedProblem, params: HHLParams) -> ErrorMetrics:
    """Evaluate success probabilities, fidelity and norm error in closed form."""
    if problem.mode != params.mode:
        raise ValidationError(f"problem mode {problem.mode!r} != params mode {params.mode!r}")
    lam = problem.eigenvalues
    w2beta = np.abs(problem.betas) ** 2
    prob = np.abs(alpha(lam, params)) ** 2
    m1, m2 = _moments(prob, params)
    C = params.C

    p_ideal = C**2 * float(np.sum(w2beta / lam**2))
    p0 = C**2 * float(np.sum(w2beta * m2))
    p_tilde = C**2 * float(np.sum(w2beta * m1**2))
    # float rounding leaves ~1e-32 relative residue where the exact value is 0
    floor = max(DEGENERATE_P, DEGENERATE_REL * p_ideal)
    if params.postselect == "ancilla" and p0 < floor:
        raise DegeneratePostselection(f"p0={p0:.3g}: ancilla outcome 1 never occurs")
    if params.postselect == "ancilla_and_zero_clock" and p_tilde < floor:
        raise DegeneratePostselection(f"p_tilde={p_tilde:.3g}: outcome |1>|0> never occurs")

    # C^2 <x|x_out> numerators share sum_j |beta_j|^2 / lambda_j * m1_j
    overlap_num = C**2 * float(np.sum(w2beta / lam * m1))
    p_out = p0 if params.postselect == "ancilla" else p_tilde
    overlap = overlap_num / math.sqrt(p_ideal * p_out)
    fidelity = min(1.0, overlap * overlap)
    infidelity = 1.0 - fidelity

    with np.errstate(divide="ignore"):
        lambda_tilde = np.where(m1 != 0, 1.0 / m1, np.inf)
    x_approx = problem.eigenvectors @ (problem.betas * m1)
    x_norm = math.sqrt(p_ideal) / C
    if params.postselect == "ancilla":
        norm_estimate, estimator = math.sqrt(p0) / C, "sqrt(p0)/C"
    else:
        norm_estimate, estimator = math.sqrt(p_tilde) / C, "sqrt(p_tilde)/C"

    return ErrorMetrics(
        eps1=lam * m1 - 1.0,
        eps2=lam**2 * m2 - 1.0,
        p_ideal=p_ideal,
        p0=p0,
        p_tilde=p_tilde,
        lambda_tilde=lambda_tilde,
        fidelity=fidelity,
        distance=math.sqrt(infidelity),
        infidelity=infidelity,
        norm_rel_error=abs(norm_estimate - x_norm) / x_norm,
        x_approx=x_approx,
        x_norm=x_norm,
        norm_estimate=norm_estimate,
        postselect=params.postselect,
        norm_estimator=estimator,
    )


def distance_from_epsilons(betas, lam, eps1, eps2) -> float:
    """Distance of the ancilla-postselected output in terms of ``eps1``, ``eps2``.

    Second route to the same number ``solve_analytic`` gets from the overlap.
    """
    w = np.abs(np.asarray(betas)) ** 2 / np.asarray(lam, dtype=float) ** 2
    eps1 = np.asarray(eps1, dtype=float)
    eps2 = np.asarray(eps2, dtype=float)
    num = np.sum(np.outer(w, w) * (eps2[:, None] - eps1[:, None] - eps1[None, :] - np.outer(eps1, eps1)))
    den = np.sum(w) * np.sum(w * (1 + eps2))
    return math.sqrt(max(0.0, num / den))


def distance_improved(betas, lam, lambda_tilde) -> float:
    """Distance of the improved-variant output written through ``lambda_tilde``."""
    b2 = np.abs(np.asarray(betas)) ** 2
    lam = np.asarray(lam, dtype=float)
    lt = np.asarray(lambda_tilde, dtype=float)
    w = b2 / lam**2
    r = lam / lt
    inner = b2 / (lam * lt)
    num = np.sum(w[:, None] * inner[None, :] * (r[None, :] - r[:, None]))
    den = np.sum(w) * np.sum(b2 / lt**2)
    return math.sqrt(max(0.0, num / den))


def expectation_value(
    metrics: ErrorMetrics,
    m: np.ndarray,
    mu: int | None = None,
    seed: int | np.random.Generator | None = None,
) -> float:
    """Estimate ``x~^dagger M x~`` from the approximate solution.

    Without ``mu`` the exact value ``||x~||^2 <x~|M|x~>`` is returned. With
    ``mu`` measurement outcomes in the eigenbasis of ``M`` are drawn and the
    empirical frequencies replace the probabilities ``|<x~|m_j>|^2``.
    """
    m = np.asarray(m, dtype=complex)
    x = np.asarray(metrics.x_approx)
    if m.shape != (x.size, x.size):
        raise ValidationError(f"M must be {x.size}x{x.size}, got {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > 1e-12:
        raise ValidationError("M must be Hermitian")
    norm2 = float(np.vdot(x, x).real)
    if mu is None:
        return float(np.vdot(x, m @ x).real)
    if mu < 1:
        raise ValidationError("mu must be positive")
    vals, vecs = np.linalg.eigh(m)
    probs = np.abs(vecs.conj().T @ x) ** 2 / norm2
    probs = probs / probs.sum()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    counts = rng.multinomial(mu, probs)
    return norm2 * float(np.dot(vals, counts) / mu)
