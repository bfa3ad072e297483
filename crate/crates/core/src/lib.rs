//! Numerical toolkit for operators that are self-adjoint up to an
//! antiunitary symmetry: `CHC⁻¹ = H†` for some antiunitary `C`, which need not
//! be an involution.
//!
//! - [`matrix`]: dense complex matrices, SVD, Hermitian eigensolver, kernels.
//! - [`antilinear`]: antiunitary operators `C = A∘K` and their calculus.
//! - [`csa`]: checking and generating C-self-adjoint matrices.
//! - [`decomp`]: polar and singular-value decompositions with the hidden
//!   antiunitary symmetry made explicit.
//! - [`antieig`]: antilinear eigenvalue problems and pseudospectra.
//! - [`pauli`]: a spin-½ Hamiltonian family that is only anti-involutively
//!   symmetric.
//! - [`modelspaces`]: conjugations and generalized Toeplitz operators on
//!   polynomial model spaces.

pub mod antieig;
pub mod antilinear;
pub mod csa;
pub mod decomp;
pub mod error;
pub mod matrix;
pub mod modelspaces;
pub mod pauli;

pub use antilinear::{AntilinearMap, AntiunitaryOp, InvolutionClass};
pub use csa::CsaReport;
pub use error::{Error, Result};
pub use matrix::{CMatrix, CVector, Tolerance};
