"""Gaussian passivity, work extraction, and Fock-space verification tools."""

from .core import (
    DEFAULT_TOL,
    MomentState,
    ValidationReport,
    gaussian_entropy,
    mean_energy,
    occupation_entropy,
    purity,
    require_valid,
    state_entropy,
    symplectic_form,
    symplectic_spectrum,
    thermal_state,
    validate_state,
)
from .exceptions import (
    BudgetWarning,
    ConvergenceError,
    FileFormatError,
    OptimalityWarning,
    TruncationError,
    TruncationWarning,
    ValidationError,
)
from .extraction import (
    ExtractionReport,
    PassivityVerdict,
    StandardFormParams,
    all_pairs_gaussian_passive,
    bs_angle,
    gaussian_ergotropy,
    is_gaussian_passive,
    minimal_gaussian_energy,
    nmode_gaussian_ergotropy,
    reduce_to_standard_form,
    thermal_product_passivity,
    tms_parameter,
)
from .fileio import (
    load_protocol_steps,
    load_state,
    protocol_to_dict,
    save_protocol,
    save_state,
    state_from_dict,
    state_to_dict,
    steps_from_dict,
    write_trace_csv,
)
from .fock import (
    CUTOFF_CAP,
    TAIL_ERROR,
    TAIL_WARN,
    TruncatedDensityMatrix,
    apply_gaussian_unitary,
    brute_force_min_energy,
    density_matrix,
    energy_of,
    entropy_of,
    ergotropy_of,
    fock_state,
    gaussian_unitary_matrix,
    ladder,
    mixture,
    moments_of,
    pure_state,
    thermal_fock_state,
)
from .gap import (
    FixedEntropyConstruction,
    GapReport,
    PureMatch,
    SwapWitness,
    ergotropy_gap,
    fixed_entropy_state,
    match_pure_state,
    pure_match_for_state,
    pure_match_state,
    pure_match_two_mode,
    pure_match_vector,
    thermal_beta_for_entropy,
    thermal_swap_witness,
)
from .ops import (
    GaussianOp,
    ProtocolStep,
    PROTOCOL_STAGES,
    apply,
    beam_splitter,
    compose,
    describe,
    displacement,
    inverse,
    is_symplectic,
    op_from_label,
    rotation,
    squeeze,
    two_mode_squeeze,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DEFAULT_TOL",
    "MomentState",
    "ValidationReport",
    "gaussian_entropy",
    "mean_energy",
    "occupation_entropy",
    "purity",
    "require_valid",
    "state_entropy",
    "symplectic_form",
    "symplectic_spectrum",
    "thermal_state",
    "validate_state",
    "BudgetWarning",
    "ConvergenceError",
    "FileFormatError",
    "OptimalityWarning",
    "TruncationError",
    "TruncationWarning",
    "ValidationError",
    "ExtractionReport",
    "PassivityVerdict",
    "StandardFormParams",
    "all_pairs_gaussian_passive",
    "bs_angle",
    "gaussian_ergotropy",
    "is_gaussian_passive",
    "minimal_gaussian_energy",
    "nmode_gaussian_ergotropy",
    "reduce_to_standard_form",
    "thermal_product_passivity",
    "tms_parameter",
    "load_protocol_steps",
    "load_state",
    "protocol_to_dict",
    "save_protocol",
    "save_state",
    "state_from_dict",
    "state_to_dict",
    "steps_from_dict",
    "write_trace_csv",
    "CUTOFF_CAP",
    "TAIL_ERROR",
    "TAIL_WARN",
    "TruncatedDensityMatrix",
    "apply_gaussian_unitary",
    "brute_force_min_energy",
    "density_matrix",
    "energy_of",
    "entropy_of",
    "ergotropy_of",
    "fock_state",
    "gaussian_unitary_matrix",
    "ladder",
    "mixture",
    "moments_of",
    "pure_state",
    "thermal_fock_state",
    "FixedEntropyConstruction",
    "GapReport",
    "PureMatch",
    "SwapWitness",
    "ergotropy_gap",
    "fixed_entropy_state",
    "match_pure_state",
    "pure_match_for_state",
    "pure_match_state",
    "pure_match_two_mode",
    "pure_match_vector",
    "thermal_beta_for_entropy",
    "thermal_swap_witness",
    "GaussianOp",
    "ProtocolStep",
    "PROTOCOL_STAGES",
    "apply",
    "beam_splitter",
    "compose",
    "describe",
    "displacement",
    "inverse",
    "is_symplectic",
    "op_from_label",
    "rotation",
    "squeeze",
    "two_mode_squeeze",
]
