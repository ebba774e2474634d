"""trihardy: three-party Hardy-type nonlocality toolkit.

Generates the closed-form Hardy behaviour family and its three-qubit
realisation, rules out fully-local and no-signalling-bilocal ontic models
by finite enumeration plus linear programming, maps the strict-concavity
and concave-cover (self-testing) structure of the Hardy probability over
its parameter cube, and certifies device-independent randomness both from
self-tested behaviours and from a moment-matrix semidefinite relaxation
solved by an embedded interior-point solver.
"""

from .behavior import (
    Behavior,
    HardyParams,
    ParameterError,
    check_behavior,
    check_hardy_constraints,
    check_no_signalling,
    hardy_behavior,
    hardy_probability,
    params_from_behavior,
)
from .quantum import (
    OPTIMAL_AMPLITUDE_SQUARED,
    MeasurementAngles,
    StateVector,
    angles_from_params,
    born_behavior,
    hardy_state,
    observable_set,
    optimal_construction,
    optimal_params,
    party_observables,
    rotated_basis,
)
from .ontic import (
    check_predictability_failure,
    enumerate_fully_local,
    enumerate_nsbl,
    max_hardy_over_model,
)
from .concavity import (
    GridSpec,
    classify_grid,
    classify_point,
    find_optimum,
    hessian,
    jacobi_eigenvalues,
    omega,
)
from .cover import cover_result_at, cover_value_at, hypograph_samples, self_test_region
from .randomness import (
    certified_bits,
    guessing_probability,
    iso_hardy_slice,
    params_for_delta,
    randomness_region,
    row_uniformity_analysis,
)
from .simplex import LPResult, solve_lp
from .sdp import IPMResult, solve_semidefinite
from .npa import (
    DELTA_CAP,
    CurvePoint,
    Monomial,
    MomentProblem,
    SDPSolution,
    build_basis,
    hardy_moment_problem,
    moment_id,
    moment_matrix,
    probability_functional,
    randomness_curve,
    solve_sdp,
)

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "HardyParams",
    "ParameterError",
    "check_behavior",
    "check_hardy_constraints",
    "check_no_signalling",
    "hardy_behavior",
    "hardy_probability",
    "params_from_behavior",
    "MeasurementAngles",
    "StateVector",
    "angles_from_params",
    "born_behavior",
    "hardy_state",
    "observable_set",
    "optimal_construction",
    "optimal_params",
    "party_observables",
    "rotated_basis",
    "OPTIMAL_AMPLITUDE_SQUARED",
    "check_predictability_failure",
    "enumerate_fully_local",
    "enumerate_nsbl",
    "max_hardy_over_model",
    "GridSpec",
    "classify_grid",
    "classify_point",
    "find_optimum",
    "hessian",
    "jacobi_eigenvalues",
    "omega",
    "cover_result_at",
    "cover_value_at",
    "hypograph_samples",
    "self_test_region",
    "certified_bits",
    "guessing_probability",
    "iso_hardy_slice",
    "params_for_delta",
    "randomness_region",
    "row_uniformity_analysis",
    "LPResult",
    "solve_lp",
    "IPMResult",
    "solve_semidefinite",
    "DELTA_CAP",
    "CurvePoint",
    "Monomial",
    "MomentProblem",
    "SDPSolution",
    "build_basis",
    "hardy_moment_problem",
    "moment_id",
    "moment_matrix",
    "probability_functional",
    "randomness_curve",
    "solve_sdp",
    "__version__",
]
