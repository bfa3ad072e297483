//! Conjugations and generalized Toeplitz operators on the model spaces
//! `K_{z^N} = span{1, z, …, z^{N−1}}`, in the coefficient basis.

mod blocks;
mod toeplitz;

pub use blocks::{block_antiunitary_check, prop11_check, BlockAntilinear, BlockReport};
pub use toeplitz::{build_t, check_condition_and, theta_condition_check, SymbolCoeffs};

use num_complex::Complex64;

use crate::antilinear::AntiunitaryOp;
use crate::error::{Error, Result};
use crate::matrix::{c64, CMatrix};

fn antidiagonal(phases: impl Fn(usize) -> Complex64, n: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, n - 1 - i)] = phases(i);
    }
    a
}

fn build(a: CMatrix) -> AntiunitaryOp {
    AntiunitaryOp::new(a).expect("signed permutation matrices are unitary")
}

/// `C_γ f = γ·z̄·f̄` for `γ = z^N`: reverse the coefficients and conjugate.
pub fn conjugation_c_gamma(n: usize) -> AntiunitaryOp {
    build(antidiagonal(|_| c64(1.0, 0.0), n))
}

/// `C_{α,β}` on `K_{z^{p+q}}` for `α = z^p`, `β = z^q`. Writing the
/// coefficients as `f₁ = (a₀…a_{p−1})`, `f₂ = (a_p…a_{p+q−1})`, the output
/// starts with `e^{iξ}` times the reversed conjugate of `f₂`, followed by the
/// reversed conjugate of `f₁`.
pub fn conjugation_c_alphabeta(p: usize, q: usize, xi: f64) -> AntiunitaryOp {
    let phase = Complex64::from_polar(1.0, xi);
    build(antidiagonal(
        |i| if i < q { phase } else { c64(1.0, 0.0) },
        p + q,
    ))
}

/// The 4×4 pattern that is `C_{z²,z²}`-self-adjoint for `e^{iξ} = −1`.
pub fn example1_matrix(
    a11: Complex64,
    a12: Complex64,
    a13: Complex64,
    a21: Complex64,
    a22: Complex64,
    a31: Complex64,
) -> CMatrix {
    let z = c64(0.0, 0.0);
    CMatrix::from_row_slice(
        4,
        4,
        &[
            a11, a12, a13, z, //
            a21, a22, z, -a13, //
            a31, z, a22, a12, //
            z, -a31, a21, a11,
        ],
    )
}

/// Pairwise `(a_{2k}, a_{2k+1}) ↦ (−ā_{2k+1}, ā_{2k})`; squares to `−I`.
pub fn example2_conjugation(n: usize) -> Result<AntiunitaryOp> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let mut a = CMatrix::zeros(n, n);
    for k in 0..n / 2 {
        a[(2 * k, 2 * k + 1)] = c64(-1.0, 0.0);
        a[(2 * k + 1, 2 * k)] = c64(1.0, 0.0);
    }
    Ok(build(a))
}

/// The 4×4 pattern that is self-adjoint with respect to
/// [`example2_conjugation`]`(4)`.
pub fn example2_matrix(
    a11: Complex64,
    a13: Complex64,
    a14: Complex64,
    a23: Complex64,
    a24: Complex64,
    a33: Complex64,
) -> CMatrix {
    let z = c64(0.0, 0.0);
    CMatrix::from_row_slice(
        4,
        4,
        &[
            a11, z, a13, a14, //
            z, a11, a23, a24, //
            a24, -a14, a33, z, //
            -a23, a13, z, a33,
        ],
    )
}
