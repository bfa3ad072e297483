use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian: ‖M − M†‖ = {residual:e}")]
    NotHermitian { residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("unitary part is not unitary: ‖A†A − I‖ = {residual:e}")]
    NotUnitary { residual: f64 },
    #[error("operator is not C-self-adjoint: ‖CHC⁻¹ − H†‖ = {residual:e}")]
    NotCsa { residual: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("subspace is not invariant under the antilinear map (defect {defect:e})")]
    NotInvariant { defect: f64 },
    #[error("antilinear map is not involutive on the subspace (defect {defect:e})")]
    NotInvolutive { defect: f64 },
    #[error(
        "singular value {sigma} has multiplicity {multiplicity} and the conjugation is not involutive"
    )]
    UnsupportedDegeneracy { sigma: f64, multiplicity: usize },
    #[error("shift z = {re}{im:+}i lies in the spectrum (σ_min = {sigma_min:e})")]
    ZInSpectrum { re: f64, im: f64, sigma_min: f64 },
    #[error("momentum grid is not symmetric under k ↦ −k (no partner for k = {k})")]
    AsymmetricGrid { k: f64 },
    #[error("dimension {0} is odd, an even dimension is required")]
    OddDimension(usize),
    #[error("hypothesis violated: {what} (residual {residual:e})")]
    HypothesisViolated { what: String, residual: f64 },
    #[error("constraint admits only the zero solution")]
    EmptySolutionSpace,
    #[error("invalid tolerance: abs = {abs}, rel = {rel}")]
    InvalidTolerance { abs: f64, rel: f64 },
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
