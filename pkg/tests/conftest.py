import math

import numpy as np
import pytest
from hypothesis import settings

from hhl_lab import LinearProblem, prepare

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")


def diag_problem(eigs, b, vecs=None):
    """Prepared problem with chosen spectrum and (optionally) eigenbasis."""
    eigs = np.asarray(eigs, dtype=float)
    v = np.eye(len(eigs)) if vecs is None else vecs
    a = (v * eigs) @ v.conj().T
    return prepare(LinearProblem(a, np.asarray(b, dtype=complex)), lambda_max_estimate=1.0)


@pytest.fixture
def resonant_lambda():
    """lambda with lambda*t*T = 2 pi k0 for t = pi, n_c = 5, k0 = 6."""
    t, T, k0 = math.pi, 32, 6
    return 2 * math.pi * k0 / (t * T)
