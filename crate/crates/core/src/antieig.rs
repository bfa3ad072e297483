//! Antilinear eigenvalue problems `(H − zI)ψ = λ·Cψ` and pseudospectra.
//!
//! For `z` outside the spectrum, the resolvent `R(z) = (H − zI)⁻¹` is again
//! C-self-adjoint, and its refined SVD gives an orthonormal basis `ψⱼ` with
//! positive `λⱼ = 1/σⱼ(R(z))`. In particular `‖R(z)‖ = 1/λ₁`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antilinear::AntiunitaryOp;
use crate::csa::check_c_selfadjoint;
use crate::decomp::refined_svd;
use crate::error::{Error, Result};
use crate::matrix::{c64, ensure_square, fro, serde_vectors, svd, CMatrix, CVector, Tolerance};

/// `z` counts as a numerical eigenvalue when `σ_min(H − zI)` is at most this
/// fraction of `‖H − zI‖_F`.
pub const SPECTRUM_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntilinearEigenSystem {
    pub z: Complex64,
    /// Positive, nondecreasing.
    pub lambdas: Vec<f64>,
    #[serde(with = "serde_vectors")]
    pub psis: Vec<CVector>,
}

impl AntilinearEigenSystem {
    /// Largest `‖(H − zI)ψⱼ − λⱼCψⱼ‖ / (|λⱼ| + ‖H‖)`.
    pub fn max_residual(&self, h: &CMatrix, c: &AntiunitaryOp) -> Result<f64> {
        let shifted = shift(h, self.z);
        let norm = fro(h);
        let mut worst = 0f64;
        for (lambda, psi) in self.lambdas.iter().zip(&self.psis) {
            let r = (&shifted * psi - c.apply(psi)? * c64(*lambda, 0.0)).norm();
            worst = worst.max(r / (lambda.abs() + norm));
        }
        Ok(worst)
    }

    /// `‖Σ ψⱼψⱼ† − I‖_F`.
    pub fn completeness_defect(&self, n: usize) -> f64 {
        let mut sum = CMatrix::zeros(n, n);
        for psi in &self.psis {
            sum += psi * psi.adjoint();
        }
        fro(&(sum - CMatrix::identity(n, n)))
    }
}

fn shift(h: &CMatrix, z: Complex64) -> CMatrix {
    let n = h.nrows();
    h - CMatrix::identity(n, n) * z
}

pub fn antilinear_eigensystem(
    h: &CMatrix,
    c: &AntiunitaryOp,
    z: Complex64,
    tol: Tolerance,
) -> Result<AntilinearEigenSystem> {
    let report = check_c_selfadjoint(h, c, tol)?;
    if !report.is_csa {
        return Err(Error::NotCsa {
            residual: report.residual,
        });
    }
    let shifted = shift(h, z);
    let dec = svd(&shifted)?;
    let sigma_min = dec.smallest();
    if sigma_min <= SPECTRUM_CUTOFF * fro(&shifted) {
        return Err(Error::ZInSpectrum {
            re: z.re,
            im: z.im,
            sigma_min,
        });
    }
    // R = V·Σ⁻¹·U†.
    let mut v_scaled = dec.v.clone();
    for (j, s) in dec.sigma.iter().enumerate() {
        v_scaled.column_mut(j).scale_mut(1.0 / s);
    }
    let resolvent = v_scaled * dec.u.adjoint();

    let r_report = check_c_selfadjoint(&resolvent, c, tol)?;
    if !r_report.is_csa {
        return Err(Error::NumericalFailure(format!(
            "resolvent lost C-self-adjointness (residual {:e})",
            r_report.residual
        )));
    }
    let rs = refined_svd(&resolvent, c, tol)?;
    // Nonincreasing σⱼ give nondecreasing λⱼ.
    Ok(AntilinearEigenSystem {
        z,
        lambdas: rs.sigmas.iter().map(|s| 1.0 / s).collect(),
        psis: rs.etas,
    })
}

/// `‖(H − zI)⁻¹‖ = 1/σ_min(H − zI)`, or infinity when `z` is a numerical
/// eigenvalue.
pub fn resolvent_norm(h: &CMatrix, z: Complex64) -> Result<f64> {
    ensure_square(h)?;
    let shifted = shift(h, z);
    let sigma_min = svd(&shifted)?.smallest();
    if sigma_min <= SPECTRUM_CUTOFF * fro(&shifted) {
        Ok(f64::INFINITY)
    } else {
        Ok(1.0 / sigma_min)
    }
}

/// Rectangle `[re_min, re_max] × [im_min, im_max]` sampled at `res` points
/// per axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub res: usize,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<Complex64>> {
        let bounds = [self.re_min, self.re_max, self.im_min, self.im_max];
        if self.res < 2 || bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::Malformed(format!(
                "grid needs finite bounds and res >= 2, got {self:?}"
            )));
        }
        let axis = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (self.res - 1) as f64;
        let mut out = Vec::with_capacity(self.res * self.res);
        for i in 0..self.res {
            for j in 0..self.res {
                out.push(c64(
                    axis(self.re_min, self.re_max, i),
                    axis(self.im_min, self.im_max, j),
                ));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub z: Complex64,
    pub resolvent_norm: f64,
    pub in_pseudospectrum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudospectrumGrid {
    pub epsilon: f64,
    pub points: Vec<GridPoint>,
}

impl PseudospectrumGrid {
    pub fn marked(&self) -> usize {
        self.points.iter().filter(|p| p.in_pseudospectrum).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,resolvent_norm,in_pseudospectrum\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.z.re, p.z.im, p.resolvent_norm, p.in_pseudospectrum
            ));
        }
        out
    }
}

/// Marks `z` when `‖R(z)‖ > 1/ε` (strictly) or `z` is a numerical eigenvalue.
pub fn pseudospectrum(h: &CMatrix, epsilon: f64, grid: &GridSpec) -> Result<PseudospectrumGrid> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Malformed(format!("epsilon must be positive, got {epsilon}")));
    }
    ensure_square(h)?;
    let points = grid
        .points()?
        .into_par_iter()
        .map(|z| {
            let norm = resolvent_norm(h, z)?;
            Ok(GridPoint {
                z,
                resolvent_norm: norm,
                in_pseudospectrum: norm.is_infinite() || norm > 1.0 / epsilon,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PseudospectrumGrid { epsilon, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antilinear::pauli_ops::{c2, k};
    use crate::csa::generate_csa;
    use crate::matrix::{eigenvalues, ONE, ZERO};
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn scalar(x: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c64(x, 0.0))
    }

    #[test]
    fn one_by_one() {
        let h = scalar(3.0);
        let c = AntiunitaryOp::conjugation(1);
        let sys = antilinear_eigensystem(&h, &c, ONE, tol()).unwrap();
        assert_eq!(sys.lambdas.len(), 1);
        assert!((sys.lambdas[0] - 2.0).abs() < 1e-14);
        // ψ is real and of unit length; the sign is not determined.
        assert!((sys.psis[0][0].re.abs() - 1.0).abs() < 1e-14 && sys.psis[0][0].im.abs() < 1e-14);
        assert!((resolvent_norm(&h, ONE).unwrap() - 0.5).abs() < 1e-15);
        assert!((resolvent_norm(&scalar(0.0), c64(2.0, 0.0)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn diagonal_real() {
        let h = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, c64(4.0, 0.0)]));
        let sys = antilinear_eigensystem(&h, &k(), ZERO, tol()).unwrap();
        assert!((sys.lambdas[0] - 1.0).abs() < 1e-14 && (sys.lambdas[1] - 4.0).abs() < 1e-14);
        assert!((sys.psis[0][0].norm() - 1.0).abs() < 1e-14);
        assert!((sys.psis[1][1].norm() - 1.0).abs() < 1e-14);
        assert!(sys.max_residual(&h, &k()).unwrap() < 1e-15);
    }

    #[test]
    fn errors() {
        let h = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, c64(4.0, 0.0)]));
        assert!(matches!(
            antilinear_eigensystem(&h, &k(), c64(4.0, 0.0), tol()),
            Err(Error::ZInSpectrum { .. })
        ));
        let nil = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(
            antilinear_eigensystem(&nil, &k(), ONE, tol()),
            Err(Error::NotCsa { .. })
        ));
        // R(z) = I/(2 − z) is degenerate and C₂ is anti-involutive.
        let h = CMatrix::identity(2, 2) * c64(2.0, 0.0);
        assert!(matches!(
            antilinear_eigensystem(&h, &c2(), ZERO, tol()),
            Err(Error::UnsupportedDegeneracy { .. })
        ));
    }

    #[test]
    fn resolvent_of_jordan_block_matches_svd_oracle() {
        let h = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let z = c64(1e-3, 0.0);
        // σ_max·σ_min = |det| = |z|² and σ_max² + σ_min² = ‖H − z‖_F² = 1 + 2|z|².
        let (det, f2) = (z.norm_sqr(), 1.0 + 2.0 * z.norm_sqr());
        let s_max = ((f2 + (f2 * f2 - 4.0 * det * det).sqrt()) / 2.0).sqrt();
        let expected = s_max / det;
        let got = resolvent_norm(&h, z).unwrap();
        assert!((got - expected).abs() <= 1e-6 * expected, "{got} vs {expected}");
        assert!(resolvent_norm(&h, ZERO).unwrap().is_infinite());
    }

    #[test]
    fn zero_matrix_pseudospectrum_is_a_disk() {
        let g = GridSpec { re_min: -1.0, re_max: 1.0, im_min: -1.0, im_max: 1.0, res: 41 };
        let ps = pseudospectrum(&scalar(0.0), 0.5, &g).unwrap();
        assert_eq!(ps.points.len(), 41 * 41);
        for p in &ps.points {
            assert_eq!(p.in_pseudospectrum, p.z.norm() < 0.5, "{:?}", p.z);
        }
    }

    #[test]
    fn normal_matrix_gives_two_disks() {
        let h = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, c64(2.0, 0.0)]));
        let g = GridSpec { re_min: 0.0, re_max: 3.0, im_min: -1.0, im_max: 1.0, res: 61 };
        let ps = pseudospectrum(&h, 0.1, &g).unwrap();
        for p in &ps.points {
            let d = (p.z - ONE).norm().min((p.z - c64(2.0, 0.0)).norm());
            if (d - 0.1).abs() > 1e-9 {
                assert_eq!(p.in_pseudospectrum, d < 0.1, "{:?}", p.z);
            }
        }
    }

    #[test]
    fn non_normal_growth() {
        let g = GridSpec { re_min: -1.0, re_max: 1.0, im_min: -1.0, im_max: 1.0, res: 81 };
        let jordan = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let normal = CMatrix::zeros(2, 2);
        let a = pseudospectrum(&jordan, 0.1, &g).unwrap().marked();
        let b = pseudospectrum(&normal, 0.1, &g).unwrap().marked();
        assert!(a > 2 * b, "{a} vs {b}");
    }

    #[test]
    fn csv_shape_and_validation() {
        let g = GridSpec { re_min: -2.0, re_max: 2.0, im_min: -2.0, im_max: 2.0, res: 5 };
        let csv = pseudospectrum(&scalar(0.0), 0.1, &g).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "re,im,resolvent_norm,in_pseudospectrum");
        assert_eq!(lines.len(), 26);
        assert!(lines.contains(&"0,0,inf,true"));
        assert!(pseudospectrum(&scalar(0.0), 0.0, &g).is_err());
        assert!(pseudospectrum(&scalar(0.0), 0.1, &GridSpec { res: 1, ..g }).is_err());
    }

    fn symmetric(n: usize, seed: u64) -> CMatrix {
        generate_csa(&AntiunitaryOp::conjugation(n), seed).unwrap()
    }

    #[test]
    fn dim8_symmetric_at_3i() {
        let h = symmetric(8, 3);
        let sys = antilinear_eigensystem(&h, &k_n(8), c64(0.0, 3.0), tol()).unwrap();
        assert!(sys.max_residual(&h, &k_n(8)).unwrap() <= 1e-8);
        assert!(sys.completeness_defect(8) <= 1e-8);
        let rn = resolvent_norm(&h, c64(0.0, 3.0)).unwrap();
        assert!((rn - 1.0 / sys.lambdas[0]).abs() <= 1e-8 * rn);
    }

    fn k_n(n: usize) -> AntiunitaryOp {
        AntiunitaryOp::conjugation(n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn expansion_invariants(n in 1usize..10, seed in any::<u64>(), zi in 0usize..2) {
            let z = [c64(0.0, 3.0), c64(2.0, 1.0)][zi];
            let h = symmetric(n, seed);
            let sys = antilinear_eigensystem(&h, &k_n(n), z, tol()).unwrap();
            prop_assert!(sys.max_residual(&h, &k_n(n)).unwrap() <= 1e-8);
            prop_assert!(sys.completeness_defect(n) <= 1e-8);
            prop_assert!(sys.lambdas.windows(2).all(|w| w[0] <= w[1]));
            let rn = resolvent_norm(&h, z).unwrap();
            prop_assert!((rn - 1.0 / sys.lambdas[0]).abs() <= 1e-8 * rn);
        }

        #[test]
        fn monotone_in_epsilon(seed in any::<u64>(), e1 in 0.01f64..0.5, de in 0.0f64..0.5) {
            let h = symmetric(3, seed);
            let g = GridSpec { re_min: -3.0, re_max: 3.0, im_min: -3.0, im_max: 3.0, res: 12 };
            let small = pseudospectrum(&h, e1, &g).unwrap();
            let large = pseudospectrum(&h, e1 + de, &g).unwrap();
            for (a, b) in small.points.iter().zip(&large.points) {
                prop_assert!(!a.in_pseudospectrum || b.in_pseudospectrum);
            }
        }
    }

    #[test]
    fn eigenvalues_are_always_marked() {
        let h = symmetric(4, 77);
        for lambda in eigenvalues(&h).unwrap() {
            let g = GridSpec {
                re_min: lambda.re,
                re_max: lambda.re + 1.0,
                im_min: lambda.im,
                im_max: lambda.im + 1.0,
                res: 2,
            };
            for eps in [1e-6, 1e-3, 0.5] {
                let ps = pseudospectrum(&h, eps, &g).unwrap();
                assert!(ps.points[0].in_pseudospectrum);
            }
        }
    }

    #[test]
    fn grid_is_deterministic() {
        let h = symmetric(5, 1);
        let g = GridSpec { re_min: -2.0, re_max: 2.0, im_min: -2.0, im_max: 2.0, res: 30 };
        assert_eq!(
            pseudospectrum(&h, 0.1, &g).unwrap().to_csv(),
            pseudospectrum(&h, 0.1, &g).unwrap().to_csv()
        );
    }
}
