"""Linear problems, their reduction to canonical form, and seeded generation.

A :class:`LinearProblem` is a raw ``A x = b`` system. :func:`prepare` turns a
Hermitian problem into a :class:`PreparedProblem`: ``b`` normalized, ``A``
rescaled so that its spectrum lies in ``(0, 1]`` (or ``[-1, 1]`` without zero
in signed mode), and the spectral decomposition cached.

Random problems are drawn from counter-based Philox streams, one substream
per ``(seed, index)`` pair, so a sweep is reproducible regardless of the order
or parallelism in which its problems are generated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import NumericalError, ValidationError

Mode = Literal["positive", "signed"]

HERMITIAN_TOL = 1e-12
ZERO_EIGENVALUE_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LinearProblem:
    """A square linear system ``a @ x = b``."""

    a: np.ndarray
    b: np.ndarray
    d: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.a)
        b = np.asarray(self.b)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"a must be a square matrix, got shape {a.shape}")
        if b.ndim != 1 or b.shape[0] != a.shape[0]:
            raise ValidationError(
                f"dimension mismatch: a is {a.shape[0]}x{a.shape[1]} but b has shape {b.shape}"
            )
        object.__setattr__(self, "a", _frozen(a))
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "d", int(a.shape[0]))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return float(np.max(np.abs(self.a - self.a.conj().T), initial=0.0)) <= tol


@dataclass(frozen=True)
class PreparedProblem:
    """Hermitian, rescaled, spectrally decomposed linear system.

    Attributes
    ----------
    a : (d, d) complex
        ``A / lambda_scale``.
    b : (d,) complex
        ``b / b_scale``, unit norm.
    eigenvalues : (d,) float
        Ascending eigenvalues of ``a``.
    eigenvectors : (d, d) complex
        Unitary ``V`` whose columns are the eigenvectors ``u_j``.
    betas : (d,) complex
        ``V^dagger b``, the components of ``b`` in the eigenbasis.
    kappa : float
        ``max|lambda| / min|lambda|``.
    """

    a: np.ndarray
    b: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    betas: np.ndarray
    kappa: float
    b_scale: float
    lambda_scale: float
    mode: Mode = "positive"

    @property
    def d(self) -> int:
        return int(self.b.shape[0])

    @property
    def lambda_min(self) -> float:
        """Smallest eigenvalue magnitude."""
        return float(np.min(np.abs(self.eigenvalues)))

    def solution(self) -> np.ndarray:
        """Exact ``x = sum_j beta_j / lambda_j u_j`` of the prepared system."""
        return self.eigenvectors @ (self.betas / self.eigenvalues)

    def original_solution(self) -> np.ndarray:
        """Solution of the system before normalization and rescaling."""
        return self.solution() * (self.b_scale / self.lambda_scale)


def hermitize(problem: LinearProblem) -> LinearProblem:
    """Embed ``A x = b`` into the Hermitian system ``[[0, A], [A^dagger, 0]] y = (b, 0)``.

    The embedded solution is ``y = 0 (+) x``.
    """
    d = problem.d
    a = problem.a
    block = np.zeros((2 * d, 2 * d), dtype=complex)
    block[:d, d:] = a
    block[d:, :d] = a.conj().T
    rhs = np.concatenate([problem.b, np.zeros(d, dtype=complex)])
    return LinearProblem(block, rhs)


def prepare(
    problem: LinearProblem,
    lambda_max_estimate: float | None = None,
    mode: Mode = "positive",
) -> PreparedProblem:
    """Normalize ``b``, rescale ``A`` and compute its spectral decomposition.

    Parameters
    ----------
    problem
        Hermitian linear problem.
    lambda_max_estimate
        Upper estimate of the spectral radius of ``A``. ``A`` is divided by it.
        Defaults to the spectral radius rounded up to the next integer.
    mode
        ``"positive"`` requires all rescaled eigenvalues in ``(0, 1]``;
        ``"signed"`` allows ``[-1, 1]`` without zero.
    """
    if mode not in ("positive", "signed"):
        raise ValidationError(f"unknown mode {mode!r}")
    if not problem.is_hermitian():
        raise ValidationError("a is not Hermitian; use hermitize() first")
    b_norm = float(np.linalg.norm(problem.b))
    if b_norm == 0.0:
        raise ValidationError("b must be nonzero")

    raw_eigs = np.linalg.eigvalsh(problem.a)
    radius = float(np.max(np.abs(raw_eigs)))
    if lambda_max_estimate is None:
        lambda_max_estimate = float(max(1, math.ceil(radius)))
    if not lambda_max_estimate > 0:
        raise ValidationError("lambda_max_estimate must be positive")
    if lambda_max_estimate < radius * (1 - 1e-12):
        raise ValidationError(
            f"lambda_max_estimate={lambda_max_estimate} is below the spectral radius {radius}"
        )

    a = problem.a / lambda_max_estimate
    # exact Hermitian part; the input is Hermitian to 1e-12 already
    a = 0.5 * (a + a.conj().T)
    b = problem.b / b_norm
    eigs, vecs = np.linalg.eigh(a)
    small = np.abs(eigs) < ZERO_EIGENVALUE_TOL
    if np.any(small):
        raise ValidationError("a is singular (eigenvalue with |lambda| < 1e-12)")
    if mode == "positive" and np.any(eigs < 0):
        raise ValidationError("negative eigenvalue in positive mode; use mode='signed'")
    # an estimate equal to the radius can round the top eigenvalue just past 1
    eigs = np.clip(eigs, -1.0, 1.0)
    betas = vecs.conj().T @ b
    kappa = float(np.max(np.abs(eigs)) / np.min(np.abs(eigs)))

    for arr in (a, b, eigs, vecs, betas):
        arr.setflags(write=False)
    return PreparedProblem(
        a=a,
        b=b,
        eigenvalues=eigs,
        eigenvectors=vecs,
        betas=betas,
        kappa=kappa,
        b_scale=b_norm,
        lambda_scale=float(lambda_max_estimate),
        mode=mode,
    )


def classical_solve(problem: PreparedProblem | LinearProblem) -> np.ndarray:
    """Dense reference solution of the linear system."""
    if isinstance(problem, PreparedProblem):
        if np.any(np.abs(problem.eigenvalues) < ZERO_EIGENVALUE_TOL):
            raise NumericalError("singular matrix")
        return problem.solution()
    try:
        x = np.linalg.solve(problem.a, problem.b)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("singular matrix") from exc
    return x


def problem_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Philox generator for substream ``index`` of master ``seed``.

    The substream is keyed by ``SeedSequence(seed, spawn_key=(index,))``,
    which is what ``SeedSequence(seed).spawn(n)[index]`` would yield.
    """
    if seed < 0 or seed >= 2**64:
        raise ValidationError("seed must be an unsigned 64-bit integer")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary (Ginibre matrix, QR, phase fix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_problem(seed: int, d: int = 2, index: int = 0) -> LinearProblem:
    """Random Hermitian problem ``A = U diag(lambda) U^dagger`` with unit ``b``.

    Eigenvalues are uniform on ``(0, 1]``, ``U`` is Haar-random and ``b`` is
    uniform on the complex unit sphere. Draw order within the substream is
    eigenvalues, unitary, right-hand side.
    """
    if d < 2:
        raise ValidationError("d must be at least 2")
    rng = problem_rng(seed, index)
    lam = 1.0 - rng.random(d)
    u = haar_unitary(rng, d)
    b = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    b /= np.linalg.norm(b)
    a = (u * lam) @ u.conj().T
    a = 0.5 * (a + a.conj().T)
    return LinearProblem(a, b)


# -- JSON problem files -------------------------------------------------------


def _complex_to_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _complex_from_json(obj, where: str) -> complex:
    if not isinstance(obj, dict):
        raise ValidationError(f"field '{where}': expected an object with 're' and 'im'")
    for key in ("re", "im"):
        if key not in obj:
            raise ValidationError(f"field '{where}.{key}': missing")
        val = obj[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ValidationError(f"field '{where}.{key}': expected a number")
    return complex(obj["re"], obj["im"])


def problem_to_dict(problem: LinearProblem) -> dict:
    return {
        "d": problem.d,
        "a": [[_complex_to_json(z) for z in row] for row in problem.a],
        "b": [_complex_to_json(z) for z in problem.b],
    }


def problem_from_dict(data) -> LinearProblem:
    """Parse the JSON problem format, naming the offending field on error."""
    if not isinstance(data, dict):
        raise ValidationError("problem file: top level must be an object")
    for key in ("d", "a", "b"):
        if key not in data:
            raise ValidationError(f"field '{key}': missing")
    d = data["d"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ValidationError("field 'd': expected a positive integer")
    rows = data["a"]
    if not isinstance(rows, list) or len(rows) != d:
        raise ValidationError(f"field 'a': expected {d} rows")
    a = np.empty((d, d), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != d:
            raise ValidationError(f"field 'a[{i}]': expected {d} entries")
        for j, entry in enumerate(row):
            a[i, j] = _complex_from_json(entry, f"a[{i}][{j}]")
    entries = data["b"]
    if not isinstance(entries, list) or len(entries) != d:
        raise ValidationError(f"field 'b': expected {d} entries")
    b = np.array([_complex_from_json(e, f"b[{i}]") for i, e in enumerate(entries)])
    return LinearProblem(a, b)


def load_problem(path: str | Path) -> LinearProblem:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"problem file {path}: invalid JSON ({exc})") from exc
    return problem_from_dict(data)


def save_problem(problem: LinearProblem, path: str | Path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem), indent=1) + "\n", encoding="utf-8")
