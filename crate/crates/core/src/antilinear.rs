//! Antilinear and antiunitary operators on `Cⁿ`.
//!
//! Every antilinear map on a finite-dimensional space factors as `B∘K` with
//! `K` entrywise conjugation, so a map is stored as the matrix `B` alone and
//! acts by `ψ ↦ B·conj(ψ)`. The calculus follows from that action:
//!
//! | operation            | matrix            |
//! |----------------------|-------------------|
//! | adjoint `D*`         | `Bᵀ`              |
//! | square `D²`          | `B·conj(B)` (linear) |
//! | `D₁D₂`               | `B₁·conj(B₂)` (linear) |
//! | `D·L` (L linear)     | `B·conj(L)`       |
//! | `D·M·D⁻¹`            | `B·conj(M)·B†` when `B` is unitary |

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    c64, conj, conj_vec, direct_sum, ensure_dim, ensure_finite, ensure_square, fro, serde_matrix,
    CMatrix, CVector, Tolerance, ONE, ZERO,
};

/// Tolerance used to accept a matrix as unitary.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Default tolerance for [`AntiunitaryOp::classify`]. Classification gates
/// algorithm branches, so it is looser than arithmetic tolerances.
pub const CLASSIFY_TOL: Tolerance = Tolerance::absolute(1e-8);

/// A general antilinear map `ψ ↦ B·conj(ψ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntilinearMap {
    #[serde(with = "serde_matrix")]
    matrix: CMatrix,
}

impl AntilinearMap {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        ensure_finite(&matrix)?;
        Ok(Self { matrix })
    }

    pub fn conjugation(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(n, n),
        }
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn apply(&self, psi: &CVector) -> Result<CVector> {
        ensure_dim(self.matrix.ncols(), psi.len())?;
        Ok(&self.matrix * conj_vec(psi))
    }

    /// Columns of `m` mapped one by one: `B·conj(m)`.
    pub fn apply_columns(&self, m: &CMatrix) -> Result<CMatrix> {
        ensure_dim(self.matrix.ncols(), m.nrows())?;
        Ok(&self.matrix * conj(m))
    }

    /// The adjoint `D*`, defined by `(φ, Dψ) = conj((D*φ, ψ))`.
    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    /// Linear map `D²`.
    pub fn square(&self) -> CMatrix {
        &self.matrix * conj(&self.matrix)
    }

    /// Linear map `self ∘ other`.
    pub fn then_after(&self, other: &AntilinearMap) -> Result<CMatrix> {
        ensure_dim(self.matrix.ncols(), other.matrix.nrows())?;
        Ok(&self.matrix * conj(&other.matrix))
    }

    /// Antilinear map `self ∘ L` for a linear `L`.
    pub fn after_linear(&self, l: &CMatrix) -> Result<Self> {
        ensure_dim(self.matrix.ncols(), l.nrows())?;
        Ok(Self {
            matrix: &self.matrix * conj(l),
        })
    }

    /// Antilinear map `L ∘ self` for a linear `L`.
    pub fn before_linear(&self, l: &CMatrix) -> Result<Self> {
        ensure_dim(l.ncols(), self.matrix.nrows())?;
        Ok(Self {
            matrix: l * &self.matrix,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * s),
        }
    }
}

/// Whether `C² = I`, `C² = −I`, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvolutionClass {
    Involutive,
    AntiInvolutive,
    Neither,
}

/// An antiunitary operator `C = A∘K` with `A` unitary.
///
/// JSON form: `{"kind": "antiunitary", "unitary_part": <matrix>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiunitaryOp {
    unitary_part: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct AntiunitaryJson {
    kind: String,
    #[serde(with = "serde_matrix")]
    unitary_part: CMatrix,
}

impl Serialize for AntiunitaryOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AntiunitaryJson {
            kind: "antiunitary".into(),
            unitary_part: self.unitary_part.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AntiunitaryOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = AntiunitaryJson::deserialize(d)?;
        if raw.kind != "antiunitary" {
            return Err(serde::de::Error::custom(format!(
                "expected kind \"antiunitary\", found \"{}\"",
                raw.kind
            )));
        }
        AntiunitaryOp::new(raw.unitary_part).map_err(serde::de::Error::custom)
    }
}

impl AntiunitaryOp {
    /// Wraps a unitary matrix `A`; rejects non-unitary input instead of
    /// re-orthonormalizing it.
    pub fn new(unitary_part: CMatrix) -> Result<Self> {
        let n = ensure_square(&unitary_part)?;
        ensure_finite(&unitary_part)?;
        let eye = CMatrix::identity(n, n);
        let left = fro(&(unitary_part.adjoint() * &unitary_part - &eye));
        let right = fro(&(&unitary_part * unitary_part.adjoint() - &eye));
        let residual = left.max(right);
        if residual > UNITARITY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { unitary_part })
    }

    /// Plain complex conjugation `K` on `Cⁿ`.
    pub fn conjugation(n: usize) -> Self {
        Self {
            unitary_part: CMatrix::identity(n, n),
        }
    }

    /// Direct sum `C₁ ⊕ C₂ ⊕ …`.
    pub fn direct_sum(parts: &[AntiunitaryOp]) -> Self {
        let blocks: Vec<CMatrix> = parts.iter().map(|p| p.unitary_part.clone()).collect();
        Self {
            unitary_part: direct_sum(&blocks),
        }
    }

    #[inline]
    pub fn unitary_part(&self) -> &CMatrix {
        &self.unitary_part
    }

    pub fn dim(&self) -> usize {
        self.unitary_part.nrows()
    }

    pub fn as_antilinear(&self) -> AntilinearMap {
        AntilinearMap {
            matrix: self.unitary_part.clone(),
        }
    }

    /// `Cψ = A·conj(ψ)`.
    pub fn apply(&self, psi: &CVector) -> Result<CVector> {
        ensure_dim(self.dim(), psi.len())?;
        Ok(&self.unitary_part * conj_vec(psi))
    }

    /// `C⁻¹ψ = Aᵀ·conj(ψ)`.
    pub fn apply_inverse(&self, psi: &CVector) -> Result<CVector> {
        ensure_dim(self.dim(), psi.len())?;
        Ok(self.unitary_part.transpose() * conj_vec(psi))
    }

    /// The adjoint `C*`, which equals `C⁻¹`; its unitary part is `Aᵀ`.
    pub fn adjoint(&self) -> Self {
        Self {
            unitary_part: self.unitary_part.transpose(),
        }
    }

    pub fn inverse(&self) -> Self {
        self.adjoint()
    }

    /// `C₁∘C₂`, which is linear: `A₁·conj(A₂)`.
    pub fn compose(&self, other: &AntiunitaryOp) -> Result<CMatrix> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(&self.unitary_part * conj(&other.unitary_part))
    }

    /// `U∘C` for a unitary `U`, again antiunitary.
    pub fn premultiply(&self, u: &CMatrix) -> Result<Self> {
        ensure_dim(self.dim(), u.ncols())?;
        AntiunitaryOp::new(u * &self.unitary_part)
    }

    /// Classifies `C` from `‖A ∓ Aᵀ‖`, equivalently `‖C² ∓ I‖`.
    pub fn classify(&self, tol: Tolerance) -> InvolutionClass {
        let a = &self.unitary_part;
        let scale = fro(a);
        if tol.accepts(fro(&(a - a.transpose())), scale) {
            InvolutionClass::Involutive
        } else if tol.accepts(fro(&(a + a.transpose())), scale) {
            InvolutionClass::AntiInvolutive
        } else {
            InvolutionClass::Neither
        }
    }

    /// Matrix of the linear map `C·H·C⁻¹`, namely `A·conj(H)·A†`.
    pub fn conjugate_linear_map(&self, h: &CMatrix) -> Result<CMatrix> {
        let n = ensure_square(h)?;
        ensure_dim(self.dim(), n)?;
        Ok(&self.unitary_part * conj(h) * self.unitary_part.adjoint())
    }

    /// The antilinear map `C∘U` for a linear `U`: unitary part `A·conj(U)`.
    /// `U` need only be a partial isometry, so the result is a general
    /// antilinear map.
    pub fn compose_antilinear(&self, u: &CMatrix) -> Result<AntilinearMap> {
        ensure_square(u)?;
        ensure_dim(self.dim(), u.nrows())?;
        Ok(AntilinearMap {
            matrix: &self.unitary_part * conj(u),
        })
    }
}

/// Pauli matrices and the standard antiunitaries `K`, `σ₁K`, `−iσ₂K`, `σ₃K`
/// on `C²`.
pub mod pauli_ops {
    use super::*;

    pub fn sigma1() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn sigma2() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, c64(0.0, -1.0), c64(0.0, 1.0), ZERO])
    }

    pub fn sigma3() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    pub fn k() -> AntiunitaryOp {
        AntiunitaryOp::conjugation(2)
    }

    pub fn c1() -> AntiunitaryOp {
        AntiunitaryOp::new(sigma1()).expect("σ₁ is unitary")
    }

    /// Fermionic time reversal `−iσ₂K`; unitary part `[[0, −1], [1, 0]]`.
    pub fn c2() -> AntiunitaryOp {
        AntiunitaryOp::new(sigma2().map(|z| z * c64(0.0, -1.0))).expect("−iσ₂ is unitary")
    }

    pub fn c3() -> AntiunitaryOp {
        AntiunitaryOp::new(sigma3()).expect("σ₃ is unitary")
    }

    /// `C₂ ⊕ … ⊕ C₂` on `C^{2·blocks}`.
    pub fn c2_blocks(blocks: usize) -> AntiunitaryOp {
        AntiunitaryOp::direct_sum(&vec![c2(); blocks])
    }
}

#[cfg(test)]
mod tests {
    use super::pauli_ops::*;
    use super::*;
    use crate::matrix::{haar_unitary, random_complex_matrix, random_vector, I};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vec2(a: Complex64, b: Complex64) -> CVector {
        CVector::from_vec(vec![a, b])
    }

    #[test]
    fn apply_conjugation() {
        let k = AntiunitaryOp::conjugation(2);
        let out = k.apply(&vec2(c64(1.0, 1.0), c64(2.0, 0.0))).unwrap();
        assert_eq!(out, vec2(c64(1.0, -1.0), c64(2.0, 0.0)));
    }

    #[test]
    fn apply_time_reversal() {
        let c = c2();
        let e1 = vec2(ONE, ZERO);
        assert_eq!(c.apply(&e1).unwrap(), vec2(ZERO, ONE));
        let psi = vec2(c64(0.3, -1.2), c64(2.0, 0.5));
        let twice = c.apply(&c.apply(&psi).unwrap()).unwrap();
        assert!((twice + &psi).norm() < 1e-15);
    }

    #[test]
    fn apply_dimension_mismatch() {
        let err = c2().apply(&CVector::zeros(3)).unwrap_err();
        assert_eq!(err, Error::DimMismatch { expected: 2, actual: 3 });
    }

    #[test]
    fn constructor_rejects_non_unitary() {
        let m = CMatrix::identity(2, 2) * c64(2.0, 0.0);
        assert!(matches!(AntiunitaryOp::new(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(k().adjoint(), k());
        let a = c2().adjoint();
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO]);
        assert_eq!(a.unitary_part(), &expected);
        assert_eq!(a.unitary_part(), &(-c2().unitary_part()));
    }

    #[test]
    fn crucial_identity_for_time_reversal() {
        // (φ, Cψ) = (ψ, C⁻¹φ)
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = c2();
        for _ in 0..20 {
            let phi = random_vector(&mut rng, 2);
            let psi = random_vector(&mut rng, 2);
            let lhs = phi.dotc(&c.apply(&psi).unwrap());
            let rhs = psi.dotc(&c.apply_inverse(&phi).unwrap());
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn adjoint_identity_on_haar_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let c = AntiunitaryOp::new(haar_unitary(&mut rng, 5)).unwrap();
            let phi = random_vector(&mut rng, 5);
            let psi = random_vector(&mut rng, 5);
            let lhs = phi.dotc(&c.apply(&psi).unwrap());
            let rhs = c.adjoint().apply(&phi).unwrap().dotc(&psi).conj();
            assert!((lhs - rhs).norm() <= 1e-10);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(k().classify(CLASSIFY_TOL), InvolutionClass::Involutive);
        assert_eq!(c1().classify(CLASSIFY_TOL), InvolutionClass::Involutive);
        assert_eq!(c3().classify(CLASSIFY_TOL), InvolutionClass::Involutive);
        assert_eq!(c2().classify(CLASSIFY_TOL), InvolutionClass::AntiInvolutive);
        let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, w, ZERO]);
        let c = AntiunitaryOp::new(a).unwrap();
        assert_eq!(c.classify(CLASSIFY_TOL), InvolutionClass::Neither);
        let sq = c.compose(&c).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[w.conj(), ZERO, ZERO, w]);
        assert!(fro(&(sq - expected)) < 1e-15);
    }

    #[test]
    fn conjugate_linear_map_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_complex_matrix(&mut rng, 2, 2);
        assert_eq!(k().conjugate_linear_map(&h).unwrap(), conj(&h));

        let (a, b, c, d) = (h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);
        let expected =
            CMatrix::from_row_slice(2, 2, &[d.conj(), -c.conj(), -b.conj(), a.conj()]);
        assert!(fro(&(c2().conjugate_linear_map(&h).unwrap() - expected)) < 1e-15);

        let u = AntiunitaryOp::new(haar_unitary(&mut rng, 4)).unwrap();
        let eye = CMatrix::identity(4, 4);
        assert!(fro(&(u.conjugate_linear_map(&eye).unwrap() - &eye)) < 1e-12);
    }

    #[test]
    fn compose_antilinear_examples() {
        let swap = sigma1();
        assert_eq!(
            k().compose_antilinear(&CMatrix::identity(2, 2)).unwrap().matrix(),
            k().unitary_part()
        );
        assert_eq!(k().compose_antilinear(&swap).unwrap().matrix(), &swap);
        assert_eq!(
            c2().compose_antilinear(&CMatrix::identity(2, 2)).unwrap().matrix(),
            c2().unitary_part()
        );
        // Action check: (C∘U)ψ = C(Uψ).
        let u = CMatrix::from_row_slice(2, 2, &[ONE, I, I, ONE]).scale(0.5f64.sqrt());
        let psi = vec2(c64(1.0, 2.0), c64(-0.5, 0.25));
        let j = c2().compose_antilinear(&u).unwrap();
        let direct = c2().apply(&(&u * &psi)).unwrap();
        assert!((j.apply(&psi).unwrap() - direct).norm() < 1e-15);
    }

    #[test]
    fn json_round_trip_and_kind() {
        let c = c2();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"kind\":\"antiunitary\""));
        let back: AntiunitaryOp = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        let bad = text.replace("antiunitary", "linear");
        assert!(serde_json::from_str::<AntiunitaryOp>(&bad).is_err());
    }

    fn arb_antiunitary() -> impl Strategy<Value = (AntiunitaryOp, CVector, CVector, CMatrix)> {
        (1usize..8, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = AntiunitaryOp::new(haar_unitary(&mut rng, n)).unwrap();
            let a = random_vector(&mut rng, n);
            let b = random_vector(&mut rng, n);
            let h = random_complex_matrix(&mut rng, n, n);
            (c, a, b, h)
        })
    }

    proptest! {
        #[test]
        fn isometry_and_inverse((c, psi, phi, _h) in arb_antiunitary()) {
            let out = c.apply(&psi).unwrap();
            prop_assert!((out.norm() - psi.norm()).abs() <= 1e-12 * psi.norm());
            let back = c.adjoint().apply(&out).unwrap();
            prop_assert!((back - &psi).norm() <= 1e-10 * psi.norm().max(1.0));
            // (φ, Cψ) = (ψ, C⁻¹φ)
            let lhs = phi.dotc(&c.apply(&psi).unwrap());
            let rhs = psi.dotc(&c.apply_inverse(&phi).unwrap());
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + phi.norm() * psi.norm()));
        }

        #[test]
        fn antilinearity((c, psi, phi, _h) in arb_antiunitary(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
            let s = c64(re, im);
            let lhs = c.apply(&(psi.map(|z| z * s) + &phi)).unwrap();
            let rhs = c.apply(&psi).unwrap().map(|z| z * s.conj()) + c.apply(&phi).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + psi.norm() * 5.0 + phi.norm()));
        }

        #[test]
        fn adjoint_of_conjugated_map((c, _a, _b, h) in arb_antiunitary()) {
            // (CHC⁻¹)† = CH†C⁻¹
            let lhs = c.conjugate_linear_map(&h).unwrap().adjoint();
            let rhs = c.conjugate_linear_map(&h.adjoint()).unwrap();
            prop_assert!(fro(&(lhs - rhs)) <= 1e-10 * fro(&h).max(1.0));
        }

        #[test]
        fn classification_matches_square((c, psi, _b, _h) in arb_antiunitary()) {
            let twice = c.apply(&c.apply(&psi).unwrap()).unwrap();
            match c.classify(CLASSIFY_TOL) {
                InvolutionClass::Involutive => prop_assert!((twice - &psi).norm() < 1e-8 * psi.norm()),
                InvolutionClass::AntiInvolutive => prop_assert!((twice + &psi).norm() < 1e-8 * psi.norm()),
                InvolutionClass::Neither => {}
            }
        }
    }

    #[test]
    fn classification_of_structured_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..6 {
            // Symmetric unitaries give conjugations, A = UUᵀ.
            let u = haar_unitary(&mut rng, n);
            let a = &u * u.transpose();
            let c = AntiunitaryOp::new(a).unwrap();
            assert_eq!(c.classify(CLASSIFY_TOL), InvolutionClass::Involutive);
            let psi = random_vector(&mut rng, n);
            let twice = c.apply(&c.apply(&psi).unwrap()).unwrap();
            assert!((twice - &psi).norm() < 1e-10 * psi.norm());
        }
        let c = c2_blocks(3);
        assert_eq!(c.classify(CLASSIFY_TOL), InvolutionClass::AntiInvolutive);
    }
}
