//! Dense complex linear algebra for small qubit registers.
//!
//! Qubit 0 is always the leftmost (most significant) tensor factor.

mod eigen;
mod matrix;
mod metrics;
mod symmetric;

pub use eigen::{hermitian_eigensystem, matrix_sqrt_psd, Eigensystem, HERMITIAN_TOL, PSD_TOL};
pub use matrix::{partial_trace, re, tensor, tensor_all, ComplexMatrix, Ket, C64, I, ONE, ZERO};
pub use metrics::{purity, state_fidelity, uhlmann_fidelity, validate_density, DENSITY_TRACE_TOL};
pub use symmetric::{symmetric_dim, symmetric_projector, MAX_PROJECTOR_QUBITS};

pub(crate) use matrix::check_targets;
