use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Tolerance, ZERO};

/// A trigonometric polynomial `φ(z) = Σ φ̂(n) zⁿ`, `|z| = 1`.
///
/// JSON form: `{"fourier": {"-2": [re, im], "0": [re, im]}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SymbolCoeffs {
    pub fourier: BTreeMap<i64, Complex64>,
}

impl SymbolCoeffs {
    pub fn new(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut fourier = BTreeMap::new();
        for (n, c) in terms {
            *fourier.entry(n).or_insert(ZERO) += c;
        }
        Self { fourier }
    }

    /// `c·zⁿ`; negative `n` gives powers of `z̄`.
    pub fn monomial(n: i64, c: Complex64) -> Self {
        Self::new([(n, c)])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, c)
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.fourier.get(&n).copied().unwrap_or(ZERO)
    }

    /// Largest `|n|` over the stored coefficients, 0 for the empty symbol.
    pub fn max_support(&self) -> u64 {
        self.fourier.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }

    /// `Σ |φ̂(n)|`, a bound for `sup_{|z|=1} |φ(z)|`.
    pub fn l1_norm(&self) -> f64 {
        self.fourier.values().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.fourier
            .iter()
            .map(|(&n, &c)| c * z.powi(n as i32))
            .sum()
    }
}

const REAL_TOL: f64 = 1e-12;

/// Whether `θ(z̄) = θ(−z̄) = conj(θ(z))` on the circle. For an analytic
/// polynomial this means the coefficients are real and only even powers
/// appear.
pub fn theta_condition_check(theta: &SymbolCoeffs) -> Result<bool> {
    if let Some((&n, _)) = theta.fourier.iter().find(|(&n, _)| n < 0) {
        return Err(Error::Malformed(format!(
            "θ must be analytic, found coefficient at index {n}"
        )));
    }
    let scale = theta.l1_norm().max(1.0);
    Ok(theta
        .fourier
        .iter()
        .all(|(&n, c)| c.im.abs() <= REAL_TOL * scale && (n % 2 == 0 || c.norm() <= REAL_TOL * scale)))
}

/// Compression of `T_{φ₁,φ₂}` to `span{1, z, …, z^{N−1}}`: even columns are
/// multiplied by `φ₁`, odd ones by `φ₂`.
pub fn build_t(phi1: &SymbolCoeffs, phi2: &SymbolCoeffs, n: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Malformed("model space dimension must be at least 1".into()));
    }
    Ok(CMatrix::from_fn(n, n, |row, col| {
        let symbol = if col % 2 == 0 { phi1 } else { phi2 };
        symbol.coeff(row as i64 - col as i64)
    }))
}

/// Evaluates both identities
///
/// ```text
/// −z̄φ₁(z) + zφ₂(z) = zφ₁(z̄) − z̄φ₂(z̄)
///  z̄φ₁(z) + zφ₂(z) = zφ₁(−z̄) + z̄φ₂(−z̄)
/// ```
///
/// at `2S + 4` equispaced points of the circle, `S` the largest support
/// index. Each side has degree at most `S + 1`, so agreement at that many
/// points is agreement everywhere.
pub fn check_condition_and(phi1: &SymbolCoeffs, phi2: &SymbolCoeffs, tol: Tolerance) -> bool {
    let s = phi1.max_support().max(phi2.max_support()) as usize;
    let m = 2 * s + 4;
    let scale = 2.0 * (phi1.l1_norm() + phi2.l1_norm());
    let threshold = tol.threshold(scale);
    (0..m).all(|j| {
        let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
        let zb = z.conj();
        let first = (-zb * phi1.eval(z) + z * phi2.eval(z)) - (z * phi1.eval(zb) - zb * phi2.eval(zb));
        let second =
            (zb * phi1.eval(z) + z * phi2.eval(z)) - (z * phi1.eval(-zb) + zb * phi2.eval(-zb));
        first.norm() <= threshold && second.norm() <= threshold
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csa::check_c_selfadjoint;
    use crate::matrix::{c64, fro, ONE};
    use crate::modelspaces::example2_conjugation;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn theta_by_sampling(theta: &SymbolCoeffs) -> bool {
        (0..64).all(|j| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.3) / 64.0);
            let a = theta.eval(z.conj());
            let b = theta.eval(-z.conj());
            let c = theta.eval(z).conj();
            (a - b).norm() < 1e-9 && (a - c).norm() < 1e-9
        })
    }

    #[test]
    fn theta_examples() {
        let cases = [
            (SymbolCoeffs::monomial(4, ONE), true),
            (SymbolCoeffs::monomial(3, ONE), false),
            (SymbolCoeffs::monomial(2, c64(0.0, 1.0)), false),
            (SymbolCoeffs::new([(0, c64(2.0, 0.0)), (2, c64(-1.0, 0.0)), (6, c64(0.5, 0.0))]), true),
            (SymbolCoeffs::default(), true),
        ];
        for (theta, expected) in cases {
            assert_eq!(theta_condition_check(&theta).unwrap(), expected, "{theta:?}");
            assert_eq!(theta_by_sampling(&theta), expected, "{theta:?}");
        }
        let bad = SymbolCoeffs::monomial(-2, ONE);
        assert!(matches!(theta_condition_check(&bad), Err(Error::Malformed(_))));
    }

    #[test]
    fn build_t_examples() {
        let phi = SymbolCoeffs::new([(-1, c64(2.0, 1.0)), (0, ONE), (2, c64(0.0, -3.0))]);
        let t = build_t(&phi, &phi, 5).unwrap();
        for r in 0..5 {
            for c in 0..5 {
                assert_eq!(t[(r, c)], phi.coeff(r as i64 - c as i64));
            }
        }

        let z2 = SymbolCoeffs::monomial(2, ONE);
        let zb2 = SymbolCoeffs::monomial(-2, ONE);
        let t = build_t(&z2, &zb2, 4).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(2, 0)] = ONE;
        expected[(1, 3)] = ONE;
        assert_eq!(t, expected);

        let t = build_t(&SymbolCoeffs::constant(ONE), &SymbolCoeffs::default(), 2).unwrap();
        assert_eq!(t, CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]));
        assert!(build_t(&z2, &zb2, 0).is_err());
    }

    #[test]
    fn condition_and_examples() {
        let z2 = SymbolCoeffs::monomial(2, ONE);
        let zb2 = SymbolCoeffs::monomial(-2, ONE);
        assert!(check_condition_and(&z2, &zb2, tol()));
        let one = SymbolCoeffs::constant(ONE);
        assert!(check_condition_and(&one, &one, tol()));
        assert!(!check_condition_and(&SymbolCoeffs::monomial(1, ONE), &SymbolCoeffs::default(), tol()));
        assert!(check_condition_and(&SymbolCoeffs::default(), &SymbolCoeffs::default(), tol()));
    }

    #[test]
    fn condition_and_implies_example2_self_adjoint_compression() {
        let pairs = [
            (SymbolCoeffs::monomial(2, ONE), SymbolCoeffs::monomial(-2, ONE)),
            (SymbolCoeffs::constant(ONE), SymbolCoeffs::constant(ONE)),
            (
                SymbolCoeffs::new([(2, c64(1.5, 0.0)), (-4, c64(-0.5, 0.0)), (0, c64(2.0, 0.0))]),
                SymbolCoeffs::new([(-2, c64(1.5, 0.0)), (4, c64(-0.5, 0.0)), (0, c64(2.0, 0.0))]),
            ),
        ];
        for (phi1, phi2) in pairs {
            assert!(check_condition_and(&phi1, &phi2, tol()));
            let s = phi1.max_support().max(phi2.max_support()) as usize;
            for n in ((2 * s + 2)..=(2 * s + 12)).step_by(2) {
                let t = build_t(&phi1, &phi2, n).unwrap();
                let c = example2_conjugation(n).unwrap();
                let r = check_c_selfadjoint(&t, &c, tol()).unwrap();
                assert!(r.residual <= 1e-10, "n={n} residual={}", r.residual);
            }
        }
    }

    #[test]
    fn json_shape() {
        let phi = SymbolCoeffs::new([(-2, c64(1.0, 0.5)), (0, c64(3.0, 0.0))]);
        let text = serde_json::to_string(&phi).unwrap();
        assert_eq!(text, r#"{"fourier":{"-2":[1.0,0.5],"0":[3.0,0.0]}}"#);
        let back: SymbolCoeffs = serde_json::from_str(&text).unwrap();
        assert_eq!(back, phi);
    }

    fn symbol_strategy(support: i64) -> impl Strategy<Value = SymbolCoeffs> {
        prop::collection::vec((-support..=support, -3.0f64..3.0, -3.0f64..3.0), 0..6).prop_map(
            |terms| SymbolCoeffs::new(terms.into_iter().map(|(n, re, im)| (n, c64(re, im)))),
        )
    }

    /// Reads `φ̂₁(k)` and `φ̂₂(k)` for `|k| < N − 1` back out of the columns.
    fn read_back(t: &CMatrix, k: i64) -> (Complex64, Complex64) {
        let n = t.nrows() as i64;
        let at = |col: i64| t[((col + k) as usize, col as usize)];
        let even = if k >= 0 { 0 } else { (-k + 1) / 2 * 2 };
        let odd = if k >= 0 { 1 } else { (-k) / 2 * 2 + 1 };
        assert!(even + k < n && odd + k < n);
        (at(even), at(odd))
    }

    proptest! {
        #[test]
        fn vanishing_compression_means_vanishing_symbols(
            phi1 in symbol_strategy(4), phi2 in symbol_strategy(4), extra in 0usize..4
        ) {
            let s = phi1.max_support().max(phi2.max_support()) as usize;
            let n = 2 * s + 2 + extra;
            let t = build_t(&phi1, &phi2, n).unwrap();
            for k in -(s as i64)..=(s as i64) {
                let (a, b) = read_back(&t, k);
                prop_assert_eq!(a, phi1.coeff(k));
                prop_assert_eq!(b, phi2.coeff(k));
            }
            let zero = fro(&t) == 0.0;
            let symbols_zero = phi1.fourier.values().chain(phi2.fourier.values()).all(|c| c.norm() == 0.0);
            prop_assert_eq!(zero, symbols_zero);
        }

        #[test]
        fn distinct_symbols_give_distinct_matrices(
            a1 in symbol_strategy(3), a2 in symbol_strategy(3),
            b1 in symbol_strategy(3), b2 in symbol_strategy(3),
        ) {
            let s = [&a1, &a2, &b1, &b2].iter().map(|p| p.max_support()).max().unwrap() as usize;
            let n = 2 * s + 2;
            let same_symbols = (-(s as i64)..=(s as i64))
                .all(|k| a1.coeff(k) == b1.coeff(k) && a2.coeff(k) == b2.coeff(k));
            let same_matrix = build_t(&a1, &a2, n).unwrap() == build_t(&b1, &b2, n).unwrap();
            prop_assert_eq!(same_symbols, same_matrix);
        }

        #[test]
        fn sampling_agrees_with_coefficient_identities(phi1 in symbol_strategy(3)) {
            // φ₂(z) = φ₁(z̄) with φ₁ even is sufficient for both identities.
            let even = SymbolCoeffs::new(phi1.fourier.iter().map(|(&n, &c)| (2 * n, c)));
            let mirrored = SymbolCoeffs::new(even.fourier.iter().map(|(&n, &c)| (-n, c)));
            prop_assert!(check_condition_and(&even, &mirrored, Tolerance::default()));
        }
    }
}
