//! Steady states of a one-dimensional tight-binding lattice under
//! site-dependent, phase-modulated Lindblad dissipation.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: Hamiltonian, phase profile and two-site jump operators.
//! - [`state`]: density matrices and column-stacking vectorization.
//! - [`lindblad`]: the O(N²) generator and its sparse superoperator.
//! - [`solvers`]: steady states by null-space solve or time integration,
//!   plus a low-lying spectrum diagnostic.
//! - [`observables`]: coherence, purity, participation ratio and populations.

pub mod error;
pub mod lindblad;
pub mod model;
pub mod observables;
pub mod solvers;
pub mod state;

pub use error::{Error, Result};

/// Double-precision complex scalar used throughout.
pub type C64 = faer::c64;

pub use model::{
    analytic_spectrum, build_hamiltonian, build_jump_operators, build_phase_profile,
    inverse_golden_ratio, jump_matrix, Boundary, DissipationSpec, HamiltonianMatrix,
    JumpOperator, LatticeSpec, PhaseProfile,
};

pub use lindblad::{LindbladGenerator, SuperoperatorMatrix};
pub use solvers::{EvolutionConfig, InitialState, Method, SteadyStateResult, UniquenessReport};
pub use state::DensityMatrix;
pub use observables::{EigenBasis, Gauge, LogBase, ObservableSet};
