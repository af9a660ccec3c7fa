//! Truncated-Fock-space toolkit for quantum-enhanced Mach-Zehnder
//! interferometry: state preparation, beam-splitter/phase optics, quantum
//! and classical Fisher information for the differential phase, and
//! certification of optimal product inputs.

pub mod error;
pub mod fisher;
pub mod fock;
pub mod optics;
pub mod optimize;
pub mod states;
pub mod verify;

pub use error::{CoreError, Result};
pub use fisher::{
    cfi_photon_counting, moment_estimator_sensitivity, qcrb, qfi_entangled, qfi_product,
    qfi_variance, squared_count_cfi, FisherMethod, FisherReport,
};
pub use fock::{
    differenced_number_moments, moments, tensor, ModeMoments, SingleModeState, TwoModeState,
};
pub use optics::{
    beam_splitter_apply, inverse_beam_splitter_apply, mz_output_probs, mz_output_state,
    phase_shift_apply, MzConvention, PhaseSetting,
};
pub use optimize::{
    eq12_value, equal_split_is_best, fixed_total_best, mean_constrained_search,
    mean_constrained_search_with, quadrature_bound_check, QuadratureBound, SearchConfig,
    SearchOutcome, SplitReport,
};
pub use states::{
    coherent_state, noon_state, number_state, optimal_mean_input, squeezed_vacuum,
    twin_fock_input, BuiltState, CutoffPolicy, SqueezeSpec, StateSpec, CUTOFF_CAP,
};
pub use verify::{Check, CriterionResult, VerifyLevel, VerifyReport};
