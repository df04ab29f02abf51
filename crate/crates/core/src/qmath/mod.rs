//! Dense complex linear algebra and quantum-state primitives for up to three
//! qubits.
//!
//! Qubit 0 is the most significant bit of every amplitude index, matching the
//! left-to-right order of tensor products.

mod eigen;
mod matrix;
mod state;
mod unitary;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, min_eigenvalue};
pub use matrix::{global_phase_fidelity, kron, ComplexMatrix, EXACT_TOL};
pub use state::{apply_gate, bell_state, BellKind, DensityMatrix, StateVector, MAX_QUBITS, PSD_TOL};
pub use unitary::{
    conjugate_partner, preset_u1, preset_u2, preset_u3, realize_unitary, unitary_inverse,
    UnitaryParams,
};

pub(crate) use matrix::c;
