"""Fractional-order lithium-ion cell model toolkit.

Mittag-Leffler evaluation with dynamic series truncation, the exact
constant-current closed form and its two-state discrete recursion, a
Grunwald-Letnikov finite-memory baseline, HPPC-style parameter
identification, and synthetic-data generation with error metrics.
"""

from .ecm import (CHARGE_POSITIVE, DISCHARGE_POSITIVE, CellModel, CellState,
                  DiscreteModel, FractionalBranch, SimTrace,
                  analytic_branch_response, discretize, observe, simulate_trace,
                  step)
from .errors import (DegenerateDataError, DomainError, EvaluationError,
                     FracbattError, NonFiniteError, RangeError)
from .glbaseline import GLBranchState, gl_simulate_trace, gl_step, gl_weights
from .ident import (FitConfig, FitResult, PulseSegment, extract_r0,
                    fit_relaxation, relax_model, segment_hppc)
from .mlfunc import (DEFAULT_MAX_TERMS, DEFAULT_TOL, Z_CUT, MLParams, MLResult,
                     gamma_fn, ml_e, ml_e_array, ml_one, ml_two, ml_two_from_one)
from .ocv import OCVTable, build_ocv, ocv_eval
from .report import BenchmarkReport, RunReport, benchmark, evaluate
from .synthgen import GenResult, ProtocolSpec, fuds_surrogate, generate

__version__ = "0.1.0"
