//! Numerical toolkit for the symmetric Bell-diagonal qudit family `ρ_λ`.
//!
//! The crate builds the states (Weyl unitaries, Bell bases, twirls, the
//! entanglement-breaking map, tagged quasi-pure states), evaluates the
//! discrete position/Fourier uncertainty functionals and their minimizers,
//! and computes the entanglement quantities that bound the irreversibility
//! of distillation: the PPT-assisted distillable entanglement `E_D⁺`, the
//! pure-preimage function `ε`, its convex envelope along one-parameter
//! slices, and the resulting undistillable-entanglement gap.
//!
//! All entropies are in bits. Bipartite kets `|j⟩⊗|k⟩` live at slot
//! `j·d_B + k` everywhere.

pub mod error;
pub mod measures;
pub mod prob;
pub mod qcore;
pub mod symstates;
pub mod uncertainty;

pub use error::{Error, Result};
pub use prob::ProbVector;
pub use qcore::{CMatrix, CVector, Complex64, Side};

/// Default tolerance for equality assertions.
pub const ASSERT_TOL: f64 = 1e-9;
/// Default tolerance for normalization checks.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance used when a matrix is required to be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
