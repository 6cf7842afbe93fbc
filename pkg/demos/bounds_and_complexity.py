"""
Convergence rates and resource counts
=====================================

Bounded-ratio checks of the error scalings, and the clock size needed for a
target error.
"""

# %%
import math

from hhl_lab import gate_complexity, prepare, random_problem
from hhl_lab.bounds import check_eps2_bounds, check_improved_error_scaling

t = 8 * math.pi / 5
problem = prepare(random_problem(7, 2, index=4))
for post in ("ancilla_and_zero_clock", "ancilla"):
    check = check_improved_error_scaling(problem, t, range(4, 13), postselect=post)
    print(check.name, "bounded" if check.holds else "grows", [f"{r:.2f}" for r in check.ratio])

# %%
# At anti-resonant eigenvalues the plain variant keeps an ``eps2`` floor
# set by ``k_min`` alone.
T = 2**11
lam = 301 * math.pi / (t * T)
c = check_eps2_bounds(lam, t, 11)
print(f"|eps2| = {c.value[0]:.4f}, lower term = {c.scale[0]:.4f}")

# %%
# Clock size, queries and gates for a sparse system.
for algo in ("improved", "hhl"):
    est = gate_complexity(s=4, d=1024, kappa=8, kappa_prime=8, epsilon=0.05, algorithm=algo)
    print(f"{algo:9s} T = {est.T:10.1f}  n_c = {est.n_c:2d}  Q = {est.query_complexity:.3g}  G = {est.gate_complexity:.3g}")
