"""Free parameters of the HHL circuit and the quantities derived from them."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ValidationError

ClockPrep = Literal["hhl", "uniform"]
Postselect = Literal["ancilla", "ancilla_and_zero_clock"]
Mode = Literal["positive", "signed"]

CLOCK_PREPS = ("hhl", "uniform")
POSTSELECTS = ("ancilla", "ancilla_and_zero_clock")
MODES = ("positive", "signed")


@dataclass(frozen=True)
class HHLParams:
    """All parameters of one circuit configuration.

    ``T = 2**n_c`` clock states, evolution time ``t0 = t * T``, rotation
    constant ``C`` and smallest rotated clock value ``k_min``. Build these with
    :func:`build_params` unless a non-maximal ``C`` is wanted.
    """

    n_c: int
    t: float
    k_min: int
    C: float
    kappa_prime: float | None = None
    clock_prep: ClockPrep = "uniform"
    postselect: Postselect = "ancilla_and_zero_clock"
    mode: Mode = "positive"
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not isinstance(self.n_c, (int, np.integer)) or self.n_c < 1:
            raise ValidationError("n_c must be an integer >= 1")
        if self.clock_prep not in CLOCK_PREPS:
            raise ValidationError(f"clock_prep must be one of {CLOCK_PREPS}")
        if self.postselect not in POSTSELECTS:
            raise ValidationError(f"postselect must be one of {POSTSELECTS}")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        t_max = 2 * math.pi if self.mode == "positive" else math.pi
        if not 0 < self.t < t_max:
            raise ValidationError(f"t must lie in (0, {t_max:.6g}) for mode {self.mode!r}")
        T = self.T
        if not 1 <= self.k_min < T:
            raise ValidationError(f"k_min must satisfy 1 <= k_min < T={T}")
        if self.mode == "signed" and self.k_min > T // 2:
            raise ValidationError("signed mode needs k_min <= T/2")
        if not self.C > 0:
            raise ValidationError("C must be positive")
        if self.C > 2 * math.pi * self.k_min / self.t0 * (1 + 1e-12):
            raise ValidationError("C exceeds 2*pi*k_min/t0; rotation angles would be invalid")
        if self.kappa_prime is not None and self.kappa_prime < 1:
            raise ValidationError("kappa_prime must be >= 1")

    @property
    def T(self) -> int:
        return 2 ** int(self.n_c)

    @property
    def t0(self) -> float:
        return self.t * self.T

    @property
    def kappa_prime_effective(self) -> float:
        """Condition-number bound implied by ``k_min``: ``t0 / (4 pi k_min)``."""
        return self.t0 / (4 * math.pi * self.k_min)

    def rotated(self) -> np.ndarray:
        """Boolean mask over ``k = 0..T-1`` of clock values that get a rotation.

        Positive mode rotates ``k_min <= k < T``. Signed mode rotates
        ``k_min <= k <= T - k_min``: values above ``T/2`` stand for negative
        eigenvalues, and ``|k - T| < k_min`` would need ``|sin(theta)| > 1``.
        """
        k = np.arange(self.T)
        if self.mode == "positive":
            return k >= self.k_min
        return (k >= self.k_min) & (k <= self.T - self.k_min)

    def signed_k(self) -> np.ndarray:
        """Clock value read as a signed integer: ``k`` up to ``T/2``, ``k - T`` above."""
        k = np.arange(self.T)
        if self.mode == "positive":
            return k
        return np.where(k <= self.T // 2, k, k - self.T)

    def inverse_weights(self) -> np.ndarray:
        """Eigenvalue-inverse estimate ``tT / (2 pi k)`` per clock value, zero if unrotated."""
        mask = self.rotated()
        ks = self.signed_k().astype(float)
        w = np.zeros(self.T)
        w[mask] = self.t0 / (2 * math.pi * ks[mask])
        return w

    def sin_theta(self) -> np.ndarray:
        """``sin(theta(k)) = C t0 / (2 pi k)`` on rotated clock values, 0 elsewhere."""
        return self.C * self.inverse_weights()

    def replace(self, **changes) -> "HHLParams":
        from dataclasses import replace

        return replace(self, **changes)


def k_min_from_kappa_prime(t0: float, kappa_prime: float) -> tuple[int, bool]:
    """``floor(t0 / (4 pi kappa'))`` clamped to 1; second value flags the clamp."""
    raw = math.floor(t0 / (4 * math.pi * kappa_prime))
    return max(1, raw), raw < 1


def build_params(
    n_c: int,
    t: float,
    kappa_prime: float | None = None,
    clock_prep: ClockPrep = "uniform",
    postselect: Postselect = "ancilla_and_zero_clock",
    mode: Mode = "positive",
    k_min: int | None = None,
) -> HHLParams:
    """Build parameters with the largest admissible ``C = 2 pi k_min / t0``.

    ``k_min`` comes from ``kappa_prime`` when given, from the explicit
    ``k_min`` argument otherwise, and defaults to 1.

    >>> p = build_params(5, math.pi, kappa_prime=2)
    >>> p.k_min, p.C
    (4, 0.25)
    """
    if isinstance(n_c, bool) or not isinstance(n_c, (int, np.integer)) or n_c < 1:
        raise ValidationError("n_c must be an integer >= 1")
    if kappa_prime is not None and k_min is not None:
        raise ValidationError("give kappa_prime or k_min, not both")
    if kappa_prime is not None and not kappa_prime >= 1:
        raise ValidationError("kappa_prime must be >= 1")
    T = 2 ** int(n_c)
    t0 = t * T
    notes: list[str] = []
    if kappa_prime is not None:
        k_min, clamped = k_min_from_kappa_prime(t0, kappa_prime)
        if clamped:
            msg = f"floor(t0/(4 pi kappa'))=0 for kappa'={kappa_prime}; k_min clamped to 1"
            notes.append(msg)
            warnings.warn(msg, stacklevel=2)
    elif k_min is None:
        k_min = 1
    C = 2 * math.pi * k_min / t0
    return HHLParams(
        n_c=int(n_c),
        t=float(t),
        k_min=int(k_min),
        C=C,
        kappa_prime=kappa_prime,
        clock_prep=clock_prep,
        postselect=postselect,
        mode=mode,
        notes=tuple(notes),
    )
