"""negcurve: geodesically convex optimization hardness on negatively curved spaces.

Library + CLI providing:

- numerically robust geometry kernels for the hyperboloid model of H^d and
  for SPD/symmetric-space manifolds (`hyperbolic`, `spd`, `flat`);
- smooth geodesically convex building blocks: squared distance, compactly
  supported bump perturbations, smooth radial extension (`functions`);
- a resisting first-order oracle that answers queries while keeping many
  candidate minimizers alive, with transcript verification (`oracle`);
- optimizer baselines and a run/sweep/verify experiment harness with a
  deterministic CLI (`optim`, `harness`, `cli`).
"""

__version__ = "0.1.0"

from .errors import (
    ArgumentError,
    BudgetError,
    ConfigError,
    InvariantError,
    NegcurveError,
    NumericError,
    OverflowRangeError,
    ResourceError,
    StateError,
    VerificationError,
)
from .flat import FlatSpace
from .functions import (
    BumpSpec,
    EmpiricalProfile,
    ExtensionSpec,
    HardFunction,
    PaperProfile,
    bump_from_gradient,
    bump_grad,
    bump_value,
    combined_bump,
    fd_check,
    g_norm,
    g_norm_inv,
    g_norm_sup,
    geodesic_second_diff,
    gradient_bump_center_value,
    hardfn_from_jsonable,
    hardfn_to_jsonable,
    make_profile,
    smooth_extension_grad,
    smooth_extension_value,
    smooth_step_derivs,
    smooth_step_t,
    space_from_descriptor,
    sqdist_grad,
    sqdist_smoothness,
    sqdist_value,
    t_inequality_check,
    value_bump,
)
from .harness import (
    ConstantsReport,
    ExperimentConfig,
    build_space,
    compute_constants,
    config_to_dict,
    negative_control,
    parse_config,
    replay_files,
    run_experiment,
    sweep,
    verify_all,
)
from .hyperbolic import HyperbolicSpace, hyperbolic_law_of_cosines
from .optim import (
    ProjectedRGD,
    RGDUnconstrained,
    RunResult,
    TangentNAG,
    run_against,
)
from .oracle import (
    OracleConfig,
    OracleState,
    Transcript,
    TranscriptRecord,
    candidate_argmax,
    check_state_consistency,
    enclosing_ball,
    oracle_answer,
    oracle_finalize,
    oracle_init,
    transcript_from_jsonable,
    transcript_to_jsonable,
    verify_transcript,
)
from .spd import SPDSpace

__all__ = [
    "ArgumentError", "BudgetError", "ConfigError", "InvariantError",
    "NegcurveError", "NumericError", "OverflowRangeError", "ResourceError",
    "StateError", "VerificationError",
    "FlatSpace", "HyperbolicSpace", "SPDSpace", "hyperbolic_law_of_cosines",
    "BumpSpec", "EmpiricalProfile", "ExtensionSpec", "HardFunction",
    "PaperProfile", "bump_from_gradient", "bump_grad", "bump_value",
    "combined_bump", "fd_check", "g_norm", "g_norm_inv", "g_norm_sup",
    "geodesic_second_diff", "gradient_bump_center_value",
    "hardfn_from_jsonable", "hardfn_to_jsonable", "make_profile",
    "smooth_extension_grad", "smooth_extension_value", "smooth_step_derivs",
    "smooth_step_t", "space_from_descriptor", "sqdist_grad",
    "sqdist_smoothness", "sqdist_value", "t_inequality_check", "value_bump",
    "OracleConfig", "OracleState", "Transcript", "TranscriptRecord",
    "candidate_argmax", "check_state_consistency", "enclosing_ball",
    "oracle_answer", "oracle_finalize", "oracle_init",
    "transcript_from_jsonable", "transcript_to_jsonable", "verify_transcript",
    "ProjectedRGD", "RGDUnconstrained", "RunResult", "TangentNAG",
    "run_against",
    "ConstantsReport", "ExperimentConfig", "build_space", "compute_constants",
    "config_to_dict", "negative_control", "parse_config", "replay_files",
    "run_experiment", "sweep", "verify_all",
    "__version__",
]
