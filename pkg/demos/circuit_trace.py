"""
Walking through the circuit
===========================

Run the state-vector simulator with snapshots and compare each stage with
the closed-form coefficients.
"""

# %%
import math

import numpy as np

from hhl_lab import alpha, build_params, prepare, random_problem, run_circuit, solve_analytic
from hhl_lab.simulator import postselect

problem = prepare(random_problem(3, 2))
params = build_params(5, 8 * math.pi / 5)
final, trace = run_circuit(problem, params, trace=True)
for name in ("psi0", "psi1", "psi2", "psi3", "psi4", "psi_final"):
    print(name, "norm", getattr(trace, name).norm())

# %%
# After the inverse QFT the clock holds ``beta_j alpha_{k|j}`` per eigenvector.
a = alpha(problem.eigenvalues, params)
expected = (a * problem.betas[:, None]).T @ problem.eigenvectors.T
print("max deviation from closed form:", np.abs(trace.psi2.tensor()[0, :, :2] - expected).max())

# %%
# Read-outs agree with the analytic probabilities.
metrics = solve_analytic(problem, params)
for pattern, ref in (("ancilla", metrics.p0), ("ancilla_and_zero_clock", metrics.p_tilde)):
    res = postselect(final, pattern)
    print(f"{pattern:24s} simulated {res.probability:.12f} analytic {ref:.12f}")

# %%
# Without the rotation the circuit undoes itself.
undone, _ = run_circuit(problem, params, rotate=False)
print("uncompute residual:", np.abs(undone.amps - trace.psi0.amps).max())
