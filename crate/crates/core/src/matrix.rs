//! Dense complex matrices and the baseline decompositions the rest of the
//! crate is built on.
//!
//! Matrices are plain `nalgebra` dense matrices over `Complex64`;
//! factorizations (SVD, Hermitian and general eigenproblems) go through
//! `faer`. All residuals in this crate are measured in the Frobenius norm.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Shorthand for `Complex64::new`.
#[inline]
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const ZERO: Complex64 = c64(0.0, 0.0);
pub const ONE: Complex64 = c64(1.0, 0.0);
pub const I: Complex64 = c64(0.0, 1.0);

/// Mixed absolute/relative tolerance: a quantity `r` measured against a
/// reference norm `n` passes when `r ≤ abs + rel·n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        let valid = abs.is_finite() && rel.is_finite() && abs >= 0.0 && rel >= 0.0;
        if !valid || (abs == 0.0 && rel == 0.0) {
            return Err(Error::InvalidTolerance { abs, rel });
        }
        Ok(Self { abs, rel })
    }

    pub const fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    /// Acceptance threshold for a residual measured against `norm`.
    #[inline]
    pub fn threshold(&self, norm: f64) -> f64 {
        self.abs + self.rel * norm
    }

    #[inline]
    pub fn accepts(&self, residual: f64, norm: f64) -> bool {
        residual <= self.threshold(norm)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-10,
        }
    }
}

/// Frobenius norm.
#[inline]
pub fn fro(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

pub fn ensure_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, actual })
    }
}

/// Entrywise complex conjugate (the action of `K`).
#[inline]
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

#[inline]
pub fn conj_vec(v: &CVector) -> CVector {
    v.map(|z| z.conj())
}

fn to_faer(m: &CMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin singular value decomposition `M = U·diag(σ)·V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
    /// Right singular vectors as columns (not `V†`).
    pub v: CMatrix,
}

impl Svd {
    pub fn largest(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `cutoff · σ_max`.
    pub fn rank(&self, cutoff: f64) -> usize {
        let limit = cutoff * self.largest();
        self.sigma.iter().filter(|&&s| s > limit).count()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.adjoint()
    }
}

pub fn svd(m: &CMatrix) -> Result<Svd> {
    ensure_finite(m)?;
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Ok(Svd {
            u: CMatrix::zeros(m.nrows(), 0),
            sigma: Vec::new(),
            v: CMatrix::zeros(m.ncols(), 0),
        });
    }
    let dec = to_faer(m).thin_svd().map_err(|e| Error::NumericalFailure(format!("SVD: {e:?}")))?;
    let s = dec.S().column_vector();
    Ok(Svd {
        u: from_faer(dec.U()),
        sigma: (0..k).map(|j| s[j].re).collect(),
        v: from_faer(dec.V()),
    })
}

/// Spectral decomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors as the columns of a unitary matrix.
pub fn hermitian_eig(m: &CMatrix, tol: Tolerance) -> Result<(Vec<f64>, CMatrix)> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let residual = fro(&(m - m.adjoint()));
    if !tol.accepts(residual, fro(m)) {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::NumericalFailure(format!("Hermitian eigensolver: {e:?}")))?;
    let s = eig.S().column_vector();
    Ok(((0..n).map(|j| s[j].re).collect(), from_faer(eig.U())))
}

/// Columns of the full right singular basis whose singular value is at most
/// `limit`; indices past the number of singular values are always kernel.
fn kernel_indices(sigma: impl Iterator<Item = f64>, cols: usize, limit: f64) -> Vec<usize> {
    let sigma: Vec<f64> = sigma.collect();
    (0..cols)
        .filter(|&j| sigma.get(j).is_none_or(|&s| s <= limit))
        .collect()
}

/// Orthonormal basis of the numerical kernel of `m`, as columns.
///
/// A right singular vector belongs to the kernel when its singular value is
/// at most `tol.abs + tol.rel·‖m‖`, which bounds `‖m·col‖` by the same
/// quantity.
pub fn nullspace(m: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    ensure_finite(m)?;
    let cols = m.ncols();
    if cols == 0 || m.nrows() == 0 {
        return Ok(CMatrix::identity(cols, cols));
    }
    let dec = to_faer(m).svd().map_err(|e| Error::NumericalFailure(format!("SVD: {e:?}")))?;
    let s = dec.S().column_vector();
    let keep = kernel_indices(s.iter().map(|z| z.re), cols, tol.threshold(fro(m)));
    let v = dec.V();
    Ok(CMatrix::from_fn(cols, keep.len(), |i, j| v[(i, keep[j])]))
}

/// Eigenvalues of a general square matrix from its complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    to_faer(m)
        .eigenvalues()
        .map_err(|e| Error::NumericalFailure(format!("eigenvalues: {e:?}")))
}

/// Unit vector minimizing `‖(m − λI)ψ‖`: the right singular vector of the
/// smallest singular value. Returns the vector and that singular value.
pub fn near_null_vector(m: &CMatrix, lambda: Complex64) -> Result<(CVector, f64)> {
    let n = ensure_square(m)?;
    let shifted = m - CMatrix::identity(n, n) * lambda;
    let d = svd(&shifted)?;
    Ok((d.v.column(n - 1).into_owned(), d.smallest()))
}

/// Groups sorted (nonincreasing) values into runs whose consecutive gaps are
/// at most `gap`. Returns index ranges into the input.
pub fn cluster_sorted(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for j in 1..=values.len() {
        if j == values.len() || (values[j - 1] - values[j]).abs() > gap {
            if j > start {
                out.push(start..j);
            }
            start = j;
        }
    }
    out
}

fn single_linkage(values: &[Complex64], tol: f64) -> Vec<usize> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &[usize], mut i: usize) -> usize {
        while label[i] != i {
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (root(&label, i), root(&label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|i| root(&label, i)).collect()
}

/// Multiplicities of complex values under single-linkage clustering with
/// absolute radius `tol`. Each cluster is reported by its centroid.
pub fn cluster_complex(values: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let labels = single_linkage(values, tol);
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for (z, &l) in values.iter().zip(&labels) {
        match groups.iter_mut().find(|g| g.0 == l) {
            Some(g) => {
                g.1 += z;
                g.2 += 1;
            }
            None => groups.push((l, *z, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| (sum / count as f64, count))
        .collect()
}

/// Whether two multisets of complex numbers coincide up to `tol`: every
/// cluster of their union holds equally many points from each side.
pub fn same_multiset(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let all: Vec<Complex64> = a.iter().chain(b).copied().collect();
    let labels = single_linkage(&all, tol);
    let mut balance = std::collections::HashMap::new();
    for (i, l) in labels.into_iter().enumerate() {
        *balance.entry(l).or_insert(0i64) += if i < a.len() { 1 } else { -1 };
    }
    balance.values().all(|&b| b == 0)
}

pub fn random_complex_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary matrix (QR of a Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_complex_matrix(rng, n, n);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Block-diagonal direct sum of square matrices.
pub fn direct_sum(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Wire format of a matrix: `{"rows": n, "cols": m, "data": [[re, im], ...]}`
/// with `data` in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.data.len() != j.rows * j.cols {
            return Err(Error::Malformed(format!(
                "matrix declares {}x{} but carries {} entries",
                j.rows,
                j.cols,
                j.data.len()
            )));
        }
        let m = CMatrix::from_fn(j.rows, j.cols, |r, c| {
            let [re, im] = j.data[r * j.cols + c];
            c64(re, im)
        });
        ensure_finite(&m)?;
        Ok(m)
    }
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("matrix serializes")
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let j: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    CMatrix::try_from(j)
}

/// `#[serde(with = "serde_matrix")]` adapter for matrix-valued fields.
pub mod serde_matrix {
    use super::{CMatrix, MatrixJson};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        CMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "serde_matrix_opt")]` adapter: `null` or a matrix.
pub mod serde_matrix_opt {
    use super::{CMatrix, MatrixJson};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Option<CMatrix>, s: S) -> Result<S::Ok, S::Error> {
        m.as_ref().map(MatrixJson::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CMatrix>, D::Error> {
        Option::<MatrixJson>::deserialize(d)?
            .map(CMatrix::try_from)
            .transpose()
            .map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "serde_vectors")]` adapter: a list of vectors, each a list
/// of `[re, im]` pairs.
pub mod serde_vectors {
    use super::{c64, CVector};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(vs: &[CVector], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Vec<[f64; 2]>> = vs
            .iter()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CVector>, D::Error> {
        let raw = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|v| CVector::from_iterator(v.len(), v.into_iter().map(|[re, im]| c64(re, im))))
            .collect())
    }
}
