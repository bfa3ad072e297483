//! Complex-self-adjointness: verification, generation, and the spectral
//! pairing it forces between `H` and `H†`.
//!
//! In finite dimension every operator is everywhere defined, so
//! "C-symmetric" (`CHC⁻¹ ⊂ H*`) and "C-self-adjoint" (`CHC⁻¹ = H*`) are the
//! same property and are decided by the same check.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::antilinear::AntiunitaryOp;
use crate::error::{Error, Result};
use crate::matrix::{
    c64, ensure_dim, ensure_square, fro, near_null_vector, nullspace,
    CMatrix, CVector, Tolerance,
};

/// Outcome of a symmetry check. Serializes as `{"residual": r, "is_csa": b}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsaReport {
    pub residual: f64,
    pub is_csa: bool,
    #[serde(skip)]
    pub tol_used: Tolerance,
}

fn report(residual: f64, norm: f64, tol: Tolerance) -> CsaReport {
    CsaReport {
        residual,
        is_csa: tol.accepts(residual, norm),
        tol_used: tol,
    }
}

/// Residual `‖CHC⁻¹ − H†‖_F` of the complex-self-adjointness relation.
pub fn check_c_selfadjoint(h: &CMatrix, c: &AntiunitaryOp, tol: Tolerance) -> Result<CsaReport> {
    let n = ensure_square(h)?;
    ensure_dim(c.dim(), n)?;
    let residual = fro(&(c.conjugate_linear_map(h)? - h.adjoint()));
    Ok(report(residual, fro(h), tol))
}

/// Residual `‖CHC⁻¹ − H‖_F`, i.e. of the commutation `[C, H] = 0`.
pub fn check_c_real(h: &CMatrix, c: &AntiunitaryOp, tol: Tolerance) -> Result<CsaReport> {
    let n = ensure_square(h)?;
    ensure_dim(c.dim(), n)?;
    let residual = fro(&(c.conjugate_linear_map(h)? - h));
    Ok(report(residual, fro(h), tol))
}

fn require_csa(h: &CMatrix, c: &AntiunitaryOp, tol: Tolerance) -> Result<()> {
    let r = check_c_selfadjoint(h, c, tol)?;
    if r.is_csa {
        Ok(())
    } else {
        Err(Error::NotCsa {
            residual: r.residual,
        })
    }
}

/// Matrix of `L: H ↦ A·Hᵀ·A†` on row-major `vec(H)`.
///
/// Taking adjoints in `A·conj(H)·A† = H†` shows that the constraint is
/// equivalent to `H = L(H)`, which is complex-linear. `L` is unitary for the
/// Frobenius inner product.
fn transpose_conjugation(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    CMatrix::from_fn(n * n, n * n, |row, col| {
        let (r, s) = (row / n, row % n);
        let (i, j) = (col / n, col % n);
        a[(r, j)] * a[(s, i)].conj()
    })
}

/// Orthonormal real basis of all `H` with `CHC⁻¹ = H†`, each returned as a
/// complex matrix. The solution space is complex-linear, so the basis comes
/// in pairs `B, iB`.
pub fn csa_basis(c: &AntiunitaryOp) -> Result<Vec<CMatrix>> {
    let n = c.dim();
    let nn = n * n;
    let system = CMatrix::identity(nn, nn) - transpose_conjugation(c.unitary_part());
    let kernel = nullspace(&system, Tolerance::default())?;
    let mut basis = Vec::new();
    for col in kernel.column_iter() {
        let b = CMatrix::from_fn(n, n, |i, j| col[i * n + j]);
        basis.push(&b * c64(0.0, 1.0));
        basis.push(b);
    }
    Ok(basis)
}

/// A pseudo-random C-self-adjoint matrix: a standard-normal combination of a
/// basis of the real-linear solution space of `A·conj(H) = H†·A`.
///
/// The constraint is solved as a linear system rather than by symmetrizing a
/// random matrix, since `M ↦ (M + C⁻¹M*C)/2` is a projection only when
/// `C² = ±I`.
pub fn generate_csa(c: &AntiunitaryOp, seed: u64) -> Result<CMatrix> {
    let basis = csa_basis(c)?;
    if basis.is_empty() {
        return Err(Error::EmptySolutionSpace);
    }
    let n = c.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = CMatrix::zeros(n, n);
    for b in &basis {
        let w: f64 = rng.sample(StandardNormal);
        h += b * c64(w, 0.0);
    }
    Ok(h)
}

/// An eigenpair `(λ, ψ)` of `H` together with how well `Cψ` solves the
/// adjoint eigenproblem `(H† − λ̄)·Cψ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairing {
    pub lambda: Complex64,
    pub psi: CVector,
    pub residual: f64,
}

/// For each eigenvalue `λ` of `H` (with multiplicity), takes the unit vector
/// `ψ` minimizing `‖(H − λ)ψ‖` and reports `‖(H† − λ̄)·Cψ‖`.
pub fn eigen_pairing(
    h: &CMatrix,
    c: &AntiunitaryOp,
    tol: Tolerance,
) -> Result<Vec<EigenPairing>> {
    require_csa(h, c, tol)?;
    let n = h.nrows();
    let hstar = h.adjoint();
    let eye = CMatrix::identity(n, n);
    crate::matrix::eigenvalues(h)?
        .into_iter()
        .map(|lambda| {
            let (psi, _) = near_null_vector(h, lambda)?;
            let mapped = c.apply(&psi)?;
            let residual = ((&hstar - &eye * lambda.conj()) * mapped).norm();
            Ok(EigenPairing {
                lambda,
                psi,
                residual,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelPairing {
    pub nul_h: usize,
    pub nul_hstar: usize,
    pub mapped_ok: bool,
}

/// Compares `dim N(H − λ)` with `dim N(H† − λ̄)` and checks that `C` carries
/// the first kernel into the second.
pub fn kernel_pairing(
    h: &CMatrix,
    c: &AntiunitaryOp,
    lambda: Complex64,
    tol: Tolerance,
) -> Result<KernelPairing> {
    require_csa(h, c, tol)?;
    let n = h.nrows();
    let eye = CMatrix::identity(n, n);
    let shifted = h - &eye * lambda;
    let shifted_adj = h.adjoint() - &eye * lambda.conj();
    let ker = nullspace(&shifted, tol)?;
    let ker_adj = nullspace(&shifted_adj, tol)?;
    let limit = tol.threshold(fro(&shifted));
    let mut mapped_ok = true;
    for f in ker.column_iter() {
        let cf = c.apply(&f.into_owned())?;
        if (&shifted_adj * cf).norm() > limit {
            mapped_ok = false;
        }
    }
    Ok(KernelPairing {
        nul_h: ker.ncols(),
        nul_hstar: ker_adj.ncols(),
        mapped_ok,
    })
}
