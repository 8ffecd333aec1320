"""Multi-objective tunneling: multi-start descent plus escape from local fronts."""
from .archive import (ArchiveEntry, ParetoArchive, Phase, dominates, filter_nondominated,
                      front_size, nondominated_mask)
from .corpus import CorpusEntry, get_problem, list_problems, register, uniform_starts
from .criticality import Classification, CriticalityCertificate, fj_certificate, mfcq_holds
from .descent import DescentOptions, DescentResult, Status, armijo_backtrack, minimize
from .driver import IoFailure, RunConfig, RunReport, emit_report, run_algorithm1
from .errors import (DimensionMismatch, MotunError, NonFiniteEvaluation, PerturbationFailure,
                     PoleViolation, SubproblemFailure, UnknownProblem, UnsupportedProblem)
from .problem import EvalRecord, ProblemSpec, clip_to_box, evaluate, fd_jacobians, max_violation
from .subproblem import DirectionResult, SimplexQP, solve_direction, solve_simplex_qp
from .tunneling import TunnelingParams, TunnelingProblem, build_tp, perturbed_start, tp_gradient

__version__ = "0.1.0"

__all__ = [
    "ArchiveEntry", "ParetoArchive", "Phase", "dominates", "filter_nondominated", "front_size",
    "nondominated_mask", "CorpusEntry", "get_problem", "list_problems", "register",
    "uniform_starts", "Classification", "CriticalityCertificate", "fj_certificate", "mfcq_holds",
    "DescentOptions", "DescentResult", "Status", "armijo_backtrack", "minimize", "IoFailure",
    "RunConfig", "RunReport", "emit_report", "run_algorithm1", "DimensionMismatch", "MotunError",
    "NonFiniteEvaluation", "PerturbationFailure", "PoleViolation", "SubproblemFailure",
    "UnknownProblem", "UnsupportedProblem", "EvalRecord", "ProblemSpec", "clip_to_box", "evaluate",
    "fd_jacobians", "max_violation", "DirectionResult", "SimplexQP", "solve_direction",
    "solve_simplex_qp", "TunnelingParams", "TunnelingProblem", "build_tp", "perturbed_start",
    "tp_gradient",
]
