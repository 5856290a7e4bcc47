"""Quasi-concave function calculus, rearrangement norms and optimal-range
linear programs for rearrangement-invariant spaces on (0, inf)."""
from .errors import *  # noqa: F401,F403
from .expr import FnExpr, parse_function
from .grid import DEFAULT_GRID, GridSpec
from .kernels import BACKEND
from .lp import LPProblem, LPSolution, lp_solve
from .optrange import (RangeNormResult, fundamental_optimal_range, norm_optimal_banach,
                       norm_optimal_quasi, refinement_trend, w_optimal_banach, weak_L1_majorant)
from .qcf import (ConditionReport, IndexEstimate, QuasiConcaveFn, check_B1, check_condition3,
                  envelope, from_values, involution_i, involution_j, upper_fundamental_index,
                  validate_quasi_concave)
from .rearrange import (ClosedFormPiecewise, DecreasingStepFn, SimpleFn, conjugate_hardy,
                        decreasing_rearrangement, dilate, distribution, double_star, hardy,
                        iterated_hardy, norm_lambda, norm_marcinkiewicz, quasinorm_weak)
from .report import Check, ScenarioReport, emit_report
from .scenarios import run_scenario, scenario_names
from .transforms import (EquivalenceReport, LogAtomForm, MinAtomForm, bk_decompose, check_thm45,
                         delta, delta_delta, equivalence, hat, min_to_log_atoms,
                         synthesize_log_atoms, synthesize_min_atoms, tilde, w_lambda,
                         w_marcinkiewicz, w_weak)

__version__ = "0.1.0"
