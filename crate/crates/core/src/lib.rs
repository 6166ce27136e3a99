//! Numerical laboratory for spontaneous emission of a two-level atom into a
//! structured photon continuum.
//!
//! - [`model`]: coupling profiles, decay rate, level shift, frequency grids
//! - [`dynamics`]: memory kernel and the Volterra equations for the survival
//!   amplitude
//! - [`spectral`]: resolvents, the optimal recovery packet and fidelity bounds
//! - [`oracle`]: brute-force finite-mode diagonalization used to cross-check
//!   everything else

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod spectral;

pub use dynamics::{
    default_time_step, memory_kernel, solve_volterra, survival_probability, AmplitudeTrace,
    MemoryKernel,
};
pub use error::{Error, Result};
pub use model::{
    decay_rate, eval_form_factor, lamb_shift, make_grid, make_grid_to, make_mode_grid,
    make_mode_grid_to, AtomModel, FormFactor, FrequencyGrid, QuadratureScheme,
};
pub use oracle::{
    brute_force_max_fidelity, build_model, build_model_with, evolve, moller_apply,
    simulate_protocol, survival_exact, BruteForceFidelity, Certified, Counterterm,
    DiscretizedModel, Picture, StateVector,
};
pub use spectral::{
    boundary_resolvent, error_metrics, laplace_kernel, max_fidelity_exact, max_fidelity_markov,
    multicycle_fidelity, optimal_packet, recovery_report, resolvent_f, ErrorMetrics,
    FidelityEstimate, MulticycleFidelity, RecoveryReport, WavePacket,
};
