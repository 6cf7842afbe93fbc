"""Exact statevector simulation of the HHL circuit.

Registers are ancilla ``a`` (1 qubit), clock ``c`` (``n_c`` qubits, ``T``
states) and ``r`` (``n`` qubits). The flat amplitude index is
``((a * T) + k) * 2**n + j``; the clock integer ``k`` is big-endian across
the clock qubits. Internally every stage works on the ``(2, T, 2**n)`` view.

The circuit is::

    C -> controlled exp(i A t0 tau / T) -> QFT^-1 -> rotation -> QFT
      -> controlled exp(-i A t0 tau / T) -> C^-1

with ``QFT |tau> = T^{-1/2} sum_k exp(+2 pi i tau k / T) |k>``, so that the
state after ``QFT^-1`` is ``sum_{k,j} beta_j alpha_{k|j} |k>|u_j>``.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import DegeneratePostselection, NumericalError, ValidationError
from .params import ClockPrep, HHLParams, Postselect
from .problem import PreparedProblem

SNAPSHOT_MAGIC = b"HHLSV\0"
_HEADER = struct.Struct("<6s2xHHI")  # magic, 2 pad bytes, n_c, n, reserved = 16 bytes


@dataclass(frozen=True)
class StateVector:
    amps: np.ndarray
    n_c: int
    n: int

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        expected = 2 * (2**self.n_c) * (2**self.n)
        if amps.size != expected:
            raise ValidationError(f"expected {expected} amplitudes, got {amps.size}")
        object.__setattr__(self, "amps", amps)

    @property
    def T(self) -> int:
        return 2**self.n_c

    @property
    def dim_r(self) -> int:
        return 2**self.n

    def tensor(self) -> np.ndarray:
        """Copy of the amplitudes as an ``(ancilla, clock, r)`` array."""
        return self.amps.reshape(2, self.T, self.dim_r).copy()

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    @classmethod
    def from_tensor(cls, psi: np.ndarray) -> "StateVector":
        _, T, dim_r = psi.shape
        return cls(psi.reshape(-1), int(round(math.log2(T))), int(round(math.log2(dim_r))))


@dataclass(frozen=True)
class CircuitTrace:
    psi0: StateVector | None = None
    psi1: StateVector | None = None
    psi2: StateVector | None = None
    psi3: StateVector | None = None
    psi4: StateVector | None = None
    psi_final: StateVector | None = None


def r_qubits(d: int) -> int:
    return max(0, math.ceil(math.log2(d)))


def _padded_spectrum(problem: PreparedProblem) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues/eigenvectors extended to ``2**n`` with zeros on the padding."""
    d = problem.d
    dim_r = 2 ** r_qubits(d)
    vecs = np.eye(dim_r, dtype=complex)
    vecs[:d, :d] = problem.eigenvectors
    lam = np.zeros(dim_r)
    lam[:d] = problem.eigenvalues
    return lam, vecs


def prepare_initial(problem: PreparedProblem, params: HHLParams) -> StateVector:
    """``|0>_a |0>_c |b>_r`` with ``b`` in the computational basis."""
    n = r_qubits(problem.d)
    psi = np.zeros((2, params.T, 2**n), dtype=complex)
    psi[0, 0, : problem.d] = problem.b
    return StateVector.from_tensor(psi)


# -- clock preparation --------------------------------------------------------


def sine_clock_state(T: int) -> np.ndarray:
    """``sqrt(2/T) sin(pi (2 tau + 1) / (2T))`` for ``tau = 0..T-1``."""
    tau = np.arange(T)
    return math.sqrt(2 / T) * np.sin(math.pi * (2 * tau + 1) / (2 * T))


def _householder_apply(psi: np.ndarray, target: np.ndarray) -> np.ndarray:
    # reflection swapping e_0 and `target` (real, unit norm); self-inverse
    v = -target.astype(complex)
    v[0] += 1.0
    vv = float(np.vdot(v, v).real)
    if vv < 1e-30:
        return psi.copy()
    proj = np.einsum("k,akr->ar", v.conj(), psi)
    return psi - (2.0 / vv) * np.einsum("k,ar->akr", v, proj)


@lru_cache(maxsize=8)
def _hadamard(T: int) -> np.ndarray:
    return scipy.linalg.hadamard(T).astype(float) / math.sqrt(T)


def apply_clock_prep(state: StateVector, clock_prep: ClockPrep, inverse: bool = False) -> StateVector:
    """Clock preparation ``C`` (or ``C^-1``).

    ``uniform`` is the Hadamard transform on every clock qubit. ``hhl`` is the
    Householder reflection mapping ``|0>`` to the sine-weighted clock state;
    only that column enters any postselected quantity. Both are self-inverse.
    """
    psi = state.tensor()
    if clock_prep == "uniform":
        out = np.einsum("kt,atr->akr", _hadamard(state.T), psi)
    elif clock_prep == "hhl":
        out = _householder_apply(psi, sine_clock_state(state.T))
    else:
        raise ValidationError(f"unknown clock preparation {clock_prep!r}")
    return StateVector.from_tensor(out)


def apply_controlled_evolution(
    state: StateVector,
    problem: PreparedProblem,
    params: HHLParams,
    direction: str = "forward",
) -> StateVector:
    """``|tau>|v> -> |tau> exp(+-i A t0 tau / T)|v>`` applied in the eigenbasis of ``A``."""
    sign = {"forward": 1.0, "inverse": -1.0}.get(direction)
    if sign is None:
        raise ValidationError("direction must be 'forward' or 'inverse'")
    lam, vecs = _padded_spectrum(problem)
    tau = np.arange(state.T)
    phases = np.exp(sign * 1j * params.t * np.outer(tau, lam))  # t0 tau / T = t tau
    psi = state.tensor()
    coeffs = psi @ vecs.conj()  # components along u_j
    coeffs *= phases[None, :, :]
    return StateVector.from_tensor(coeffs @ vecs.T)


@lru_cache(maxsize=4)
def qft_matrix(T: int) -> np.ndarray:
    """Dense ``F[k, tau] = exp(2 pi i tau k / T) / sqrt(T)``."""
    k = np.arange(T)
    # integer product mod T keeps the phases exact for large T
    return np.exp(2j * math.pi * (np.outer(k, k) % T) / T) / math.sqrt(T)


def apply_qft(state: StateVector, direction: str = "forward") -> StateVector:
    if direction == "forward":
        mat = qft_matrix(state.T)
    elif direction == "inverse":
        mat = qft_matrix(state.T).conj()  # symmetric, so the adjoint is the conjugate
    else:
        raise ValidationError("direction must be 'forward' or 'inverse'")
    psi = state.tensor()
    out = np.einsum("kt,atr->akr", mat, psi)
    return StateVector.from_tensor(out)


def apply_controlled_rotation(state: StateVector, params: HHLParams) -> StateVector:
    """Rotate the ancilla by ``theta(k)`` on every rotated clock value.

    ``|0>|k> -> cos(theta)|0>|k> + sin(theta)|1>|k>`` and
    ``|1>|k> -> -sin(theta)|0>|k> + cos(theta)|1>|k>``.
    """
    if state.T != params.T:
        raise ValidationError("state and params disagree on T")
    sin_t = params.sin_theta()
    if np.any(np.abs(sin_t) > 1 + 1e-12):
        raise NumericalError("|sin(theta(k))| > 1; C is too large for k_min")
    sin_t = np.clip(sin_t, -1.0, 1.0)
    cos_t = np.sqrt(1.0 - sin_t**2)
    psi = state.tensor()
    a0, a1 = psi[0], psi[1]
    out = np.empty_like(psi)
    out[0] = cos_t[:, None] * a0 - sin_t[:, None] * a1
    out[1] = sin_t[:, None] * a0 + cos_t[:, None] * a1
    return StateVector.from_tensor(out)


def run_circuit(
    problem: PreparedProblem,
    params: HHLParams,
    trace: bool = False,
    rotate: bool = True,
) -> tuple[StateVector, CircuitTrace]:
    """Run the full circuit; ``rotate=False`` replaces the rotation by identity."""
    if problem.mode != params.mode:
        raise ValidationError(f"problem mode {problem.mode!r} != params mode {params.mode!r}")
    psi0 = prepare_initial(problem, params)
    s = apply_clock_prep(psi0, params.clock_prep)
    psi1 = apply_controlled_evolution(s, problem, params, "forward")
    psi2 = apply_qft(psi1, "inverse")
    psi3 = apply_controlled_rotation(psi2, params) if rotate else psi2
    psi4 = apply_qft(psi3, "forward")
    s = apply_controlled_evolution(psi4, problem, params, "inverse")
    final = apply_clock_prep(s, params.clock_prep, inverse=True)
    if trace:
        return final, CircuitTrace(psi0, psi1, psi2, psi3, psi4, final)
    return final, CircuitTrace()


@dataclass(frozen=True)
class PostselectResult:
    """Outcome of projecting onto ``|1>_a`` or ``|1>_a|0>_c``.

    ``component`` is the renormalized selected component: shape ``(T, 2**n)``
    for the ancilla pattern, ``(2**n,)`` when the clock is fixed to zero.
    ``rho_r`` is the reduced r-register density matrix and ``r_state`` its
    leading eigenvector (the exact r-state when the clock factorizes out).
    """

    probability: float
    r_state: np.ndarray
    component: np.ndarray
    rho_r: np.ndarray


def postselect(state: StateVector, pattern: Postselect) -> PostselectResult:
    psi = state.amps.reshape(2, state.T, state.dim_r)
    if pattern == "ancilla":
        comp = psi[1]
    elif pattern == "ancilla_and_zero_clock":
        comp = psi[1, 0]
    else:
        raise ValidationError(f"unknown postselection pattern {pattern!r}")
    prob = float(np.vdot(comp, comp).real)
    if prob < 1e-300:
        raise DegeneratePostselection(f"postselection probability {prob:.3g}")
    comp = comp / math.sqrt(prob)
    mat = comp.reshape(-1, state.dim_r)
    rho = mat.T @ mat.conj()
    vals, vecs = np.linalg.eigh(rho)
    lead = vecs[:, -1]
    # fix the global phase: largest component real positive
    i = int(np.argmax(np.abs(lead)))
    lead = lead * (abs(lead[i]) / lead[i])
    return PostselectResult(prob, lead, comp, rho)


@dataclass(frozen=True)
class SimulatedMetrics:
    p0: float
    p_tilde: float
    fidelity: float
    infidelity: float


def simulate_metrics(problem: PreparedProblem, params: HHLParams) -> SimulatedMetrics:
    """Success probabilities and fidelity read off the simulated final state.

    The ideal state is ``|1>_a |0>_c x/||x||`` with ``x`` from a dense solve,
    so this route shares nothing with the closed-form coefficients.
    """
    final, _ = run_circuit(problem, params)
    psi = final.amps.reshape(2, final.T, final.dim_r)
    p0 = float(np.vdot(psi[1], psi[1]).real)
    sel = psi[1, 0]
    p_tilde = float(np.vdot(sel, sel).real)
    x = np.linalg.solve(problem.a, problem.b)
    x_hat = np.zeros(final.dim_r, dtype=complex)
    x_hat[: problem.d] = x / np.linalg.norm(x)
    amp = np.vdot(x_hat, sel)
    p_out = p0 if params.postselect == "ancilla" else p_tilde
    if p_out < 1e-300:
        raise DegeneratePostselection(f"postselection probability {p_out:.3g}")
    fidelity = min(1.0, abs(amp) ** 2 / p_out)
    return SimulatedMetrics(p0, p_tilde, fidelity, 1.0 - fidelity)


# -- snapshot files -----------------------------------------------------------


def dump_snapshot(state: StateVector, path: str | Path) -> None:
    """Write ``state`` as a 16-byte header plus little-endian (re, im) float64 pairs."""
    header = _HEADER.pack(SNAPSHOT_MAGIC, state.n_c, state.n, 0)
    body = state.amps.astype("<c16").tobytes()
    Path(path).write_bytes(header + body)


def load_snapshot(path: str | Path) -> StateVector:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValidationError(f"{path}: truncated snapshot header")
    magic, n_c, n, _ = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise ValidationError(f"{path}: bad magic {magic!r}")
    amps = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    return StateVector(amps.astype(complex), n_c, n)
