use serde::{Deserialize, Serialize};

use crate::antilinear::{AntilinearMap, AntiunitaryOp, InvolutionClass, CLASSIFY_TOL};
use crate::csa::{check_c_selfadjoint, CsaReport};
use crate::error::{Error, Result};
use crate::matrix::{conj, ensure_dim, ensure_square, fro, CMatrix, Tolerance};

/// `C = [[D₁₁, D₁₂], [D₂₁, D₂₂]]` on `H ⊕ H`, each block antilinear:
/// `C(f, g) = (D₁₁f + D₁₂g, D₂₁f + D₂₂g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockAntilinear {
    pub d11: AntilinearMap,
    pub d12: AntilinearMap,
    pub d21: AntilinearMap,
    pub d22: AntilinearMap,
}

/// Residuals of the block conditions, as Frobenius norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    /// Largest of the six `CC* = I`, `C*C = I` block residuals.
    pub unitarity: f64,
    /// Largest of the four `C² = −I` block residuals.
    pub anti_involution: f64,
}

// Matrix of D∘E* for D = B_D∘K, E = B_E∘K.
fn d_estar(d: &AntilinearMap, e: &AntilinearMap) -> CMatrix {
    d.matrix() * e.matrix().adjoint()
}

// Matrix of D*∘E.
fn dstar_e(d: &AntilinearMap, e: &AntilinearMap) -> CMatrix {
    d.matrix().transpose() * conj(e.matrix())
}

// Matrix of D∘E.
fn d_e(d: &AntilinearMap, e: &AntilinearMap) -> CMatrix {
    d.matrix() * conj(e.matrix())
}

impl BlockAntilinear {
    pub fn new(
        d11: AntilinearMap,
        d12: AntilinearMap,
        d21: AntilinearMap,
        d22: AntilinearMap,
    ) -> Result<Self> {
        let n = ensure_square(d11.matrix())?;
        for d in [&d12, &d21, &d22] {
            ensure_dim(n, ensure_square(d.matrix())?)?;
        }
        Ok(Self { d11, d12, d21, d22 })
    }

    /// All four blocks `s·D`.
    pub fn uniform(d: &AntilinearMap, signs: [f64; 4], scale: f64) -> Self {
        let b = |s: f64| d.scale((s * scale).into());
        Self {
            d11: b(signs[0]),
            d12: b(signs[1]),
            d21: b(signs[2]),
            d22: b(signs[3]),
        }
    }

    pub fn block_dim(&self) -> usize {
        self.d11.dim()
    }

    /// The `2n × 2n` matrix `B` with `C = B∘K`.
    pub fn assemble(&self) -> AntilinearMap {
        let n = self.block_dim();
        let mut b = CMatrix::zeros(2 * n, 2 * n);
        b.view_mut((0, 0), (n, n)).copy_from(self.d11.matrix());
        b.view_mut((0, n), (n, n)).copy_from(self.d12.matrix());
        b.view_mut((n, 0), (n, n)).copy_from(self.d21.matrix());
        b.view_mut((n, n), (n, n)).copy_from(self.d22.matrix());
        AntilinearMap::new(b).expect("blocks have matching dimensions")
    }

    pub fn report(&self) -> BlockReport {
        let n = self.block_dim();
        let eye = CMatrix::identity(n, n);
        let (a, b, c, d) = (&self.d11, &self.d12, &self.d21, &self.d22);
        let unitarity = [
            fro(&(d_estar(a, a) + d_estar(b, b) - &eye)),
            fro(&(d_estar(a, c) + d_estar(b, d))),
            fro(&(d_estar(c, c) + d_estar(d, d) - &eye)),
            fro(&(dstar_e(a, a) + dstar_e(c, c) - &eye)),
            fro(&(dstar_e(a, b) + dstar_e(c, d))),
            fro(&(dstar_e(b, b) + dstar_e(d, d) - &eye)),
        ];
        let anti_involution = [
            fro(&(d_e(a, a) + d_e(b, c) + &eye)),
            fro(&(d_e(a, b) + d_e(b, d))),
            fro(&(d_e(c, a) + d_e(d, c))),
            fro(&(d_e(c, b) + d_e(d, d) + &eye)),
        ];
        BlockReport {
            unitarity: unitarity.into_iter().fold(0.0, f64::max),
            anti_involution: anti_involution.into_iter().fold(0.0, f64::max),
        }
    }
}

/// `(antiunitary, anti_involutive)`, each judged against `tol` relative to
/// `‖I_n‖_F`.
pub fn block_antiunitary_check(b: &BlockAntilinear, tol: Tolerance) -> Result<(bool, bool)> {
    let n = ensure_square(b.d11.matrix())?;
    for d in [&b.d12, &b.d21, &b.d22] {
        ensure_dim(n, ensure_square(d.matrix())?)?;
    }
    let r = b.report();
    let scale = (n as f64).sqrt();
    Ok((tol.accepts(r.unitarity, scale), tol.accepts(r.anti_involution, scale)))
}

/// For a conjugation `D` with `DpD = −p*`, checks that
/// `T_α = [[p², αp], [p, p²]]` is self-adjoint with respect to
/// `[[0, D], [−D, 0]]`.
pub fn prop11_check(p: &CMatrix, d2: &AntiunitaryOp, alpha: f64, tol: Tolerance) -> Result<CsaReport> {
    let n = ensure_square(p)?;
    ensure_dim(d2.dim(), n)?;
    if d2.classify(CLASSIFY_TOL) != InvolutionClass::Involutive {
        let a = d2.unitary_part();
        return Err(Error::HypothesisViolated {
            what: "D₂ is not an involution".into(),
            residual: fro(&(a - a.transpose())),
        });
    }
    let residual = fro(&(d2.conjugate_linear_map(p)? + p.adjoint()));
    if residual > tol.threshold(fro(p)) {
        return Err(Error::HypothesisViolated {
            what: "D₂pD₂ ≠ −p*".into(),
            residual,
        });
    }
    let p2 = p * p;
    let mut t = CMatrix::zeros(2 * n, 2 * n);
    t.view_mut((0, 0), (n, n)).copy_from(&p2);
    t.view_mut((0, n), (n, n)).copy_from(&(p * crate::matrix::c64(alpha, 0.0)));
    t.view_mut((n, 0), (n, n)).copy_from(p);
    t.view_mut((n, n), (n, n)).copy_from(&p2);
    let a = d2.unitary_part();
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, n), (n, n)).copy_from(a);
    u.view_mut((n, 0), (n, n)).copy_from(&(-a));
    let c = AntiunitaryOp::new(u)?;
    check_c_selfadjoint(&t, &c, tol)
}
