"""Error analysis of HHL linear-system solvers with shortened clock registers.

Closed-form phase-estimation coefficients, a dense state-vector simulator
used to cross-check them, convergence-bound checks and the numerical studies
built on top.
"""

from .bounds import BoundCheck, BoundReport, ComplexityEstimate, gate_complexity, lambert_w_minus1
from .coeffs import ErrorMetrics, alpha, coefficient_table, epsilons, solve_analytic
from .errors import DegeneratePostselection, HHLError, NumericalError, ValidationError
from .experiments import FitConfig, FitReport, SweepConfig, SweepRow, fit_epsilon_constants, random_sweep
from .params import HHLParams, build_params
from .problem import LinearProblem, PreparedProblem, classical_solve, load_problem, prepare, random_problem
from .simulator import StateVector, run_circuit, simulate_metrics

__version__ = "0.1.0"

__all__ = [
    "BoundCheck", "BoundReport", "ComplexityEstimate", "DegeneratePostselection", "ErrorMetrics",
    "FitConfig", "FitReport", "HHLError", "HHLParams", "LinearProblem", "NumericalError",
    "PreparedProblem", "StateVector", "SweepConfig", "SweepRow", "ValidationError", "alpha",
    "build_params", "classical_solve", "coefficient_table", "epsilons", "fit_epsilon_constants",
    "gate_complexity", "lambert_w_minus1", "load_problem", "prepare", "random_problem",
    "random_sweep", "run_circuit", "simulate_metrics", "solve_analytic",
]
