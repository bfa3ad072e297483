//! Polar and singular-value decompositions of a C-self-adjoint `H` that
//! expose the antilinear symmetry `J = C∘U` commuting with `|H|`.
//!
//! `H = C⁻¹J|H|`, and when the relevant eigenspaces of `|H|` admit
//! `J`-fixed bases, `H = Σ σⱼ (C⁻¹φⱼ)⟨φⱼ, ·⟩` with `Jφⱼ = φⱼ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antilinear::{AntilinearMap, AntiunitaryOp, InvolutionClass, CLASSIFY_TOL};
use crate::csa::check_c_selfadjoint;
use crate::error::{Error, Result};
use crate::matrix::{
    c64, cluster_sorted, ensure_dim, fro, serde_matrix, serde_vectors, svd, CMatrix, CVector,
    Tolerance,
};

/// Relative gap below which singular values are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-6;

/// Loose tolerance for invariance checks on numerically computed
/// eigenspaces, whose accuracy degrades like `ε/gap`.
const SUBSPACE_TOL: Tolerance = Tolerance::absolute(1e-6);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedPolar {
    #[serde(rename = "absH", with = "serde_matrix")]
    pub abs_h: CMatrix,
    #[serde(rename = "U", with = "serde_matrix")]
    pub u: CMatrix,
    /// `J = C∘U`, partially antiunitary with initial and final space
    /// `range(|H|)`.
    #[serde(rename = "J")]
    pub j: AntilinearMap,
    /// Orthonormal basis of `range(|H|)`.
    #[serde(skip)]
    pub range: CMatrix,
}

impl RefinedPolar {
    /// `C⁻¹(J(|H|ψ))`, which equals `Hψ`.
    pub fn apply_factored(&self, c: &AntiunitaryOp, psi: &CVector) -> Result<CVector> {
        c.apply_inverse(&self.j.apply(&(&self.abs_h * psi))?)
    }

    /// `‖J·|H| − |H|·J‖_F`, computed on the matrices `B·conj(|H|)` and `|H|·B`.
    pub fn commutation_residual(&self) -> f64 {
        let b = self.j.matrix();
        fro(&(b * crate::matrix::conj(&self.abs_h) - &self.abs_h * b))
    }

    /// `‖J²P − sP‖_F` on `range(|H|)`, for `s = ±1`.
    pub fn square_residual(&self, sign: f64) -> f64 {
        fro(&(self.j.square() * &self.range - &self.range * c64(sign, 0.0)))
    }
}

fn require_csa(h: &CMatrix, c: &AntiunitaryOp, tol: Tolerance) -> Result<()> {
    let r = check_c_selfadjoint(h, c, tol)?;
    if !r.is_csa {
        return Err(Error::NotCsa {
            residual: r.residual,
        });
    }
    Ok(())
}

fn diag_scaled(v: &CMatrix, sigma: &[f64]) -> CMatrix {
    let mut vs = v.clone();
    for (j, s) in sigma.iter().enumerate() {
        vs.column_mut(j).scale_mut(*s);
    }
    vs * v.adjoint()
}

pub fn refined_polar(h: &CMatrix, c: &AntiunitaryOp, tol: Tolerance) -> Result<RefinedPolar> {
    require_csa(h, c, tol)?;
    let n = h.nrows();
    let norm = fro(h);
    let dec = svd(h)?;
    let rank = dec.sigma.iter().filter(|&&s| s > tol.threshold(norm)).count();
    let abs_h = diag_scaled(&dec.v, &dec.sigma);
    let range = dec.v.columns(0, rank).into_owned();
    let u = dec.u.columns(0, rank) * range.adjoint();
    let j = c.compose_antilinear(&u)?;
    let polar = RefinedPolar {
        abs_h,
        u,
        j,
        range,
    };

    let limit = tol.threshold(norm);
    let classical = fro(&(h - &polar.u * &polar.abs_h));
    let mut factored = CMatrix::zeros(n, n);
    for k in 0..n {
        let e = CVector::from_fn(n, |i, _| if i == k { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        factored.set_column(k, &polar.apply_factored(c, &e)?);
    }
    let refined = fro(&(h - factored));
    let commutation = polar.commutation_residual();
    for (what, r) in [
        ("classical polar", classical),
        ("refined polar", refined),
        ("commutation", commutation),
    ] {
        if r > limit {
            return Err(Error::NumericalFailure(format!(
                "{what} residual {r:e} exceeds {limit:e}"
            )));
        }
    }
    Ok(polar)
}

/// Rotates `ψ` (with `Jψ = e^{iα}ψ`) to `φ = e^{iα/2}ψ`, so that `Jφ = φ`.
pub fn phase_fix(j: &AntilinearMap, psi: &CVector, tol: Tolerance) -> Result<CVector> {
    ensure_dim(j.dim(), psi.len())?;
    let jpsi = j.apply(psi)?;
    let a = psi.dotc(&jpsi);
    let limit = tol.threshold(1.0);
    let defect = (a.norm() - 1.0).abs().max((&jpsi - psi * a).norm());
    if defect > limit {
        return Err(Error::NotInvariant { defect });
    }
    Ok(psi * Complex64::from_polar(1.0, a.arg() / 2.0))
}

/// Orthonormal basis of `span(E)` with the part along `φ` removed.
fn deflate(basis: &CMatrix, phi: &CVector) -> Result<CMatrix> {
    let m = basis.ncols();
    let projected = basis - phi * (phi.adjoint() * basis);
    let dec = svd(&projected)?;
    Ok(dec.u.columns(0, m - 1).into_owned())
}

/// A `J`-fixed orthonormal basis of the `J`-invariant span of the columns of
/// `e`, assuming `J² = I` there.
pub fn fix_basis_involutive(j: &AntilinearMap, e: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    ensure_dim(j.dim(), e.nrows())?;
    let m = e.ncols();
    let limit = tol.threshold(fro(e));
    let je = j.apply_columns(e)?;
    let invariance = fro(&(&je - e * (e.adjoint() * &je)));
    if invariance > limit {
        return Err(Error::NotInvariant { defect: invariance });
    }
    let involution = fro(&(j.apply_columns(&je)? - e));
    if involution > limit {
        return Err(Error::NotInvolutive { defect: involution });
    }

    let mut fixed = CMatrix::zeros(e.nrows(), m);
    let mut remaining = e.clone();
    for k in 0..m {
        let psi = remaining.column(0).into_owned();
        let jpsi = j.apply(&psi)?;
        let plus = &psi + &jpsi;
        let minus = &psi - &jpsi;
        // Both candidates are J-fixed; the longer one is better conditioned.
        // When ψ + Jψ vanishes, i(ψ − Jψ) = 2iψ.
        let v = if plus.norm() >= minus.norm() {
            plus
        } else {
            minus * c64(0.0, 1.0)
        };
        let phi = v.normalize();
        fixed.set_column(k, &phi);
        if k + 1 < m {
            remaining = deflate(&remaining, &phi)?;
        }
    }
    Ok(fixed)
}

/// Necessary condition `a₁₂ = a₂₁` with `aⱼₖ = ⟨ψⱼ, Jψₖ⟩` for the
/// two-dimensional `J`-invariant span of `ψ₁, ψ₂` to have a `J`-fixed
/// orthonormal basis.
pub fn check_fixable_2d(
    j: &AntilinearMap,
    psi1: &CVector,
    psi2: &CVector,
    tol: Tolerance,
) -> Result<bool> {
    ensure_dim(j.dim(), psi1.len())?;
    ensure_dim(j.dim(), psi2.len())?;
    let limit = tol.threshold(1.0);
    let j1 = j.apply(psi1)?;
    let j2 = j.apply(psi2)?;
    let a = |x: &CVector, y: &CVector| x.dotc(y);
    let (a11, a12, a21, a22) = (a(psi1, &j1), a(psi1, &j2), a(psi2, &j1), a(psi2, &j2));
    let defect = (&j1 - psi1 * a11 - psi2 * a21)
        .norm()
        .max((&j2 - psi1 * a12 - psi2 * a22).norm());
    if defect > limit {
        return Err(Error::NotInvariant { defect });
    }
    Ok((a12 - a21).norm() <= limit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedSvd {
    /// Nonzero singular values, nonincreasing.
    pub sigmas: Vec<f64>,
    /// Orthonormal `J`-fixed eigenvectors of `|H|`.
    #[serde(with = "serde_vectors")]
    pub phis: Vec<CVector>,
    /// `ηⱼ = C⁻¹φⱼ`.
    #[serde(with = "serde_vectors")]
    pub etas: Vec<CVector>,
}

impl RefinedSvd {
    /// `Σ σⱼ ηⱼ φⱼ†`, which equals `H`.
    pub fn reconstruct(&self, n: usize) -> CMatrix {
        self.sum(n, |eta, phi| eta * phi.adjoint())
    }

    /// `Σ σⱼ φⱼ ηⱼ†`, which equals `H†`.
    pub fn reconstruct_adjoint(&self, n: usize) -> CMatrix {
        self.sum(n, |eta, phi| phi * eta.adjoint())
    }

    fn sum(&self, n: usize, term: impl Fn(&CVector, &CVector) -> CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(n, n);
        for ((s, eta), phi) in self.sigmas.iter().zip(&self.etas).zip(&self.phis) {
            out += term(eta, phi) * c64(*s, 0.0);
        }
        out
    }
}

pub fn refined_svd(h: &CMatrix, c: &AntiunitaryOp, tol: Tolerance) -> Result<RefinedSvd> {
    let polar = refined_polar(h, c, tol)?;
    let dec = svd(h)?;
    let rank = polar.range.ncols();
    let sigma = &dec.sigma[..rank];
    let involutive = c.classify(CLASSIFY_TOL) == InvolutionClass::Involutive;

    let mut out = RefinedSvd {
        sigmas: Vec::with_capacity(rank),
        phis: Vec::with_capacity(rank),
        etas: Vec::with_capacity(rank),
    };
    for cluster in cluster_sorted(sigma, CLUSTER_GAP * dec.largest()) {
        let size = cluster.len();
        let mean = sigma[cluster.clone()].iter().sum::<f64>() / size as f64;
        let space = dec.v.columns(cluster.start, size).into_owned();
        let fixed = if size == 1 {
            let phi = phase_fix(&polar.j, &space.column(0).into_owned(), SUBSPACE_TOL)?;
            CMatrix::from_columns(&[phi])
        } else if involutive {
            fix_basis_involutive(&polar.j, &space, SUBSPACE_TOL)?
        } else {
            return Err(Error::UnsupportedDegeneracy {
                sigma: mean,
                multiplicity: size,
            });
        };
        for phi in fixed.column_iter() {
            let phi = phi.into_owned();
            out.etas.push(c.apply_inverse(&phi)?);
            out.phis.push(phi);
            out.sigmas.push(if size == 1 { sigma[cluster.start] } else { mean });
        }
    }
    debug_assert_eq!(out.phis.len(), rank);
    Ok(out)
}
