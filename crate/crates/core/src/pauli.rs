//! Spin-½ toy Hamiltonian `H_α = diag(p², p²) + [[0, p], [αp, 0]]` on
//! `L²(ℝ; ℂ²)`, represented through its Fourier symbol
//! `h(k) = [[k², k], [αk, k²]]`.
//!
//! `H_α` is `C₂`-self-adjoint for every real `α` (with `C₂ = −iσ₂K`) and
//! commutes with `σ₁C₂`, but no constant involutive conjugation makes it
//! C-self-adjoint unless `|α| = 1`. Since `K` reflects momentum, every
//! antiunitary in the Fourier picture carries the reflection `k ↦ −k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antilinear::pauli_ops::{c2, sigma1};
use crate::antilinear::AntiunitaryOp;
use crate::error::{Error, Result};
use crate::matrix::{c64, conj, direct_sum, fro, kron, nullspace, CMatrix, Tolerance};

pub fn symbol(alpha: f64, k: f64) -> CMatrix {
    let k2 = c64(k * k, 0.0);
    CMatrix::from_row_slice(2, 2, &[k2, c64(k, 0.0), c64(alpha * k, 0.0), k2])
}

/// Eigenvalues `(mean + r, mean − r)` of a 2×2 matrix, with `r` the principal
/// square root of `((a − d)/2)² + bc`.
pub fn eig2(m: &CMatrix) -> (Complex64, Complex64) {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let mean = (a + d) * 0.5;
    let half = (a - d) * 0.5;
    let r = (half * half + b * c).sqrt();
    (mean + r, mean - r)
}

/// `n` points on `[−kmax, kmax]`, exactly symmetric under `k ↦ −k`.
pub fn symmetric_grid(kmax: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0; n];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|j| kmax * (2.0 * j as f64 - last) / last)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub alpha: f64,
    pub k_grid: Vec<f64>,
    /// `(λ₊, λ₋)` per grid point.
    pub eigenvalues: Vec<(Complex64, Complex64)>,
}

impl SpectrumSample {
    pub fn all(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.eigenvalues.iter().flat_map(|&(p, m)| [p, m])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,re_plus,im_plus,re_minus,im_minus\n");
        for (k, (p, m)) in self.k_grid.iter().zip(&self.eigenvalues) {
            out.push_str(&format!("{k},{},{},{},{}\n", p.re, p.im, m.re, m.im));
        }
        out
    }
}

pub fn spectrum_sample(alpha: f64, k_grid: &[f64]) -> SpectrumSample {
    SpectrumSample {
        alpha,
        k_grid: k_grid.to_vec(),
        eigenvalues: k_grid.iter().map(|&k| eig2(&symbol(alpha, k))).collect(),
    }
}

/// Real roots of `k³ + pk + q`.
fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()]
    } else if p == 0.0 {
        vec![0.0]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|j| m * (theta - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos())
            .collect()
    }
}

/// Euclidean distance from `λ` to the spectrum of `H_α`: the half-line
/// `[−α/4, ∞)` for `α ≥ 0`, and the parabola `{k² + i√|α|·k}` otherwise.
pub fn distance_to_closed_form(alpha: f64, lambda: Complex64) -> f64 {
    if alpha >= 0.0 {
        let left = -alpha / 4.0;
        return if lambda.re >= left {
            lambda.im.abs()
        } else {
            (lambda.re - left).hypot(lambda.im)
        };
    }
    let s = (-alpha).sqrt();
    let (x, y) = (lambda.re, lambda.im);
    let dist2 = |k: f64| (k * k - x).powi(2) + (s * k - y).powi(2);
    // Stationary points of dist2: 2k³ + (s² − 2x)k − sy = 0.
    let (p, q) = ((s * s - 2.0 * x) / 2.0, -s * y / 2.0);
    depressed_cubic_roots(p, q)
        .into_iter()
        .map(|mut k| {
            for _ in 0..3 {
                let d1 = k * k * k + p * k + q;
                let d2 = 3.0 * k * k + p;
                if d2.abs() > f64::EPSILON {
                    k -= d1 / d2;
                }
            }
            dist2(k)
        })
        .fold(dist2(0.0), f64::min)
        .sqrt()
}

/// Block-diagonal stack of symbols over a symmetric momentum grid, with the
/// lifted symmetries.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub h: CMatrix,
    /// `C₂` lifted: unitary part `R ⊗ (−iσ₂)`, `R` the reflection `k ↦ −k`.
    pub c2: AntiunitaryOp,
    /// `P = σ₁` acting on spin only.
    pub p: CMatrix,
    pub reflection: CMatrix,
}

impl Discretization {
    /// The antiunitary `P∘C₂`, with unitary part `R ⊗ σ₃`.
    pub fn pc2(&self) -> AntiunitaryOp {
        self.c2
            .premultiply(&self.p)
            .expect("P and C₂ are built with matching dimensions")
    }

    /// A constant spin antiunitary `a∘K` lifted to the grid.
    pub fn lift(&self, a: &CMatrix) -> Result<AntiunitaryOp> {
        AntiunitaryOp::new(kron(&self.reflection, a))
    }
}

fn reflection_index(k_grid: &[f64]) -> Result<Vec<usize>> {
    let scale = k_grid.iter().fold(1.0f64, |m, k| m.max(k.abs()));
    let tol = 1e-12 * scale;
    let index: Vec<usize> = k_grid
        .iter()
        .map(|&k| {
            k_grid
                .iter()
                .position(|&other| (other + k).abs() <= tol)
                .ok_or(Error::AsymmetricGrid { k })
        })
        .collect::<Result<_>>()?;
    for (j, &r) in index.iter().enumerate() {
        if index[r] != j {
            return Err(Error::AsymmetricGrid { k: k_grid[j] });
        }
    }
    Ok(index)
}

pub fn discretize(alpha: f64, k_grid: &[f64]) -> Result<Discretization> {
    if let Some(&k) = k_grid.iter().find(|k| !k.is_finite()) {
        return Err(Error::AsymmetricGrid { k });
    }
    let index = reflection_index(k_grid)?;
    let m = k_grid.len();
    let mut reflection = CMatrix::zeros(m, m);
    for (j, &r) in index.iter().enumerate() {
        reflection[(r, j)] = c64(1.0, 0.0);
    }
    let blocks: Vec<CMatrix> = k_grid.iter().map(|&k| symbol(alpha, k)).collect();
    Ok(Discretization {
        h: direct_sum(&blocks),
        c2: AntiunitaryOp::new(kron(&reflection, c2().unitary_part()))?,
        p: kron(&CMatrix::identity(m, m), &sigma1()),
        reflection,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugationSearch {
    pub exists: bool,
    #[serde(with = "crate::matrix::serde_matrix_opt")]
    pub witness: Option<CMatrix>,
}

/// Matrix of `X ↦ f(X)` on row-major `vec(X)` for 2×2 `X`.
fn linear_map_matrix(f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for col in 0..4 {
        let mut e = CMatrix::zeros(2, 2);
        e[(col / 2, col % 2)] = c64(1.0, 0.0);
        let image = f(&e);
        for row in 0..4 {
            out[(row, col)] = image[(row / 2, row % 2)];
        }
    }
    out
}

/// Rescales `n` to a unitary matrix if it is a multiple of one, with the
/// phase fixed so that the first nonzero entry is real and positive.
fn unitary_multiple(n: &CMatrix, tol: Tolerance) -> Option<CMatrix> {
    let s = fro(n).powi(2) / 2.0;
    if s == 0.0 {
        return None;
    }
    let gram = n.adjoint() * n / c64(s, 0.0);
    if !tol.accepts(fro(&(gram - CMatrix::identity(2, 2))), 1.0) {
        return None;
    }
    let lead = n.iter().copied().find(|z| z.norm() > 1e-12 * s.sqrt())?;
    Some(n * (lead.conj() / lead.norm()) / c64(s.sqrt(), 0.0))
}

/// Looks for a constant unitary `A` with `A·conj(A) = I` such that
/// `h(k)†A = A·conj(h(−k))` for every `k`, by matching the coefficients of
/// `1, k, k²` as a linear system in the entries of `A`.
pub fn constant_conjugation_search(alpha: f64, tol: Tolerance) -> Result<ConjugationSearch> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite);
    }
    let (h0, hp, hm) = (symbol(alpha, 0.0), symbol(alpha, 1.0), symbol(alpha, -1.0));
    let h1 = (&hp - &hm) * c64(0.5, 0.0);
    let h2 = (&hp + &hm) * c64(0.5, 0.0) - &h0;
    let mut rows: Vec<CMatrix> = Vec::new();
    for (j, hj) in [h0, h1, h2].iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        rows.push(linear_map_matrix(|a| {
            hj.adjoint() * a - a * conj(hj) * c64(sign, 0.0)
        }));
    }
    // For unitary A, A·conj(A) = I is the same as A = Aᵀ.
    rows.push(linear_map_matrix(|a| a - a.transpose()));
    let mut system = CMatrix::zeros(4 * rows.len(), 4);
    for (i, block) in rows.iter().enumerate() {
        system.view_mut((4 * i, 0), (4, 4)).copy_from(block);
    }
    let kernel = nullspace(&system, tol)?;
    let witness = kernel.column_iter().find_map(|v| {
        let n = CMatrix::from_row_slice(2, 2, v.as_slice());
        unitary_multiple(&n, tol)
    });
    Ok(ConjugationSearch {
        exists: witness.is_some(),
        witness,
    })
}

/// `‖h(k)†A − A·conj(h(−k))‖_F`.
pub fn intertwining_residual(alpha: f64, a: &CMatrix, k: f64) -> f64 {
    fro(&(symbol(alpha, k).adjoint() * a - a * conj(&symbol(alpha, -k))))
}
