//! Dense linear algebra shared by all design criteria: ridge inverses,
//! log-determinants, eigenvalue extremes, orthogonal projections and
//! pairwise distances.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! many worker threads at once. Symmetric positive-definite solves go
//! through a Cholesky factorization; eigen decompositions are only used
//! where a criterion explicitly needs eigenvalues.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Relative tolerance used when validating that a matrix is symmetric.
const SYMMETRY_RTOL: f64 = 1e-10;

/// Dense real matrix with row-major construction semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    inner: DMatrix<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Fails on empty dimensions,
    /// length mismatch or non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput);
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::Dimension("non-finite matrix entry".into()));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &data),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::EmptyInput);
        }
        let cols = rows[0].len();
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_row_major(rows.len(), cols, data)
    }

    pub(crate) fn from_dmatrix(inner: DMatrix<f64>) -> Self {
        Self { inner }
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    /// Row-major copy of the data.
    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    /// New matrix holding the given rows, in the order given.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_dmatrix(self.inner.select_rows(rows.iter()))
    }

    pub(crate) fn dmat(&self) -> &DMatrix<f64> {
        &self.inner
    }
}

/// Symmetric dense matrix. Construction checks symmetry to within a
/// relative tolerance of 1e-10 of the largest entry magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    pub fn from_row_major(order: usize, data: Vec<f64>) -> Result<Self> {
        let m = Matrix::from_row_major(order, order, data)?;
        Self::from_matrix(&m)
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Dimension(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let a = m.dmat();
        let scale = a.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        for i in 0..a.nrows() {
            for j in (i + 1)..a.ncols() {
                if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_RTOL * scale {
                    return Err(Error::Dimension(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { inner: a.clone() })
    }

    /// Wraps a matrix that is symmetric by construction, averaging the
    /// off-diagonal pairs so the stored form is exactly symmetric.
    pub(crate) fn from_product(mut inner: DMatrix<f64>) -> Self {
        for i in 0..inner.nrows() {
            for j in (i + 1)..inner.ncols() {
                let v = 0.5 * (inner[(i, j)] + inner[(j, i)]);
                inner[(i, j)] = v;
                inner[(j, i)] = v;
            }
        }
        Self { inner }
    }

    pub fn order(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        Matrix::from_dmatrix(self.inner.clone()).to_row_major()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub(crate) fn dmat(&self) -> &DMatrix<f64> {
        &self.inner
    }
}

/// Cholesky factorization of S + lambda I.
pub(crate) fn ridge_cholesky(s: &DMatrix<f64>, lambda: f64) -> Result<Cholesky<f64, Dyn>> {
    let mut shifted = s.clone();
    for i in 0..shifted.nrows() {
        shifted[(i, i)] += lambda;
    }
    Cholesky::new(shifted).ok_or(Error::NotPositiveDefinite)
}

/// (S + lambda I)^{-1} for symmetric S via Cholesky.
pub fn ridge_inverse(s: &SymmetricMatrix, lambda: f64) -> Result<SymmetricMatrix> {
    let chol = ridge_cholesky(s.dmat(), lambda)?;
    Ok(SymmetricMatrix::from_product(chol.inverse()))
}

/// log det(S + lambda I) as twice the sum of log Cholesky pivots.
pub fn log_det_psd(s: &SymmetricMatrix, lambda: f64) -> Result<f64> {
    log_det_dmat(s.dmat(), lambda)
}

pub(crate) fn log_det_dmat(s: &DMatrix<f64>, lambda: f64) -> Result<f64> {
    let chol = ridge_cholesky(s, lambda)?;
    let mut acc = 0.0;
    for v in chol.l_dirty().diagonal().iter() {
        acc += v.ln();
    }
    Ok(2.0 * acc)
}

/// Largest eigenvalue and arithmetic mean of all eigenvalues of a
/// symmetric matrix.
pub fn eigen_extremes(s: &SymmetricMatrix) -> Result<(f64, f64)> {
    let eigs = symmetric_eigenvalues(s.dmat())?;
    let max = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = eigs.iter().sum::<f64>() / eigs.len() as f64;
    Ok((max, mean))
}

pub(crate) fn symmetric_eigenvalues(s: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = nalgebra::SymmetricEigen::try_new(s.clone(), f64::EPSILON, 10_000)
        .ok_or(Error::ConvergenceFailure)?;
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// M = I - W (W'W)^- W', the projector onto the orthogonal complement of
/// the column space of W. Rank deficiency is handled by a spectral cutoff:
/// singular values below max(rows, cols) * eps * sigma_max count as zero.
pub fn orthogonal_projection_complement(w: &Matrix) -> SymmetricMatrix {
    SymmetricMatrix::from_product(projection_complement_dmat(w.dmat()))
}

pub(crate) fn projection_complement_dmat(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    let svd = w.clone().svd(true, false);
    let u = svd.u.as_ref().expect("svd computed with u");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = spectral_cutoff(n, w.ncols(), sigma_max);
    let mut m = DMatrix::identity(n, n);
    for (k, sv) in svd.singular_values.iter().enumerate() {
        if *sv > cutoff {
            let uk = u.column(k);
            // m -= uk uk'
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] -= uk[i] * uk[j];
                }
            }
        }
    }
    m
}

pub(crate) fn spectral_cutoff(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Euclidean distance matrix over the rows of X.
pub fn pairwise_distances(x: &Matrix) -> SymmetricMatrix {
    let a = x.dmat();
    let n = a.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut acc = 0.0;
            for k in 0..a.ncols() {
                let diff = a[(i, k)] - a[(j, k)];
                acc += diff * diff;
            }
            let dist = acc.sqrt();
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    SymmetricMatrix { inner: d }
}

/// Least-squares solution of X b = y through the SVD pseudo-inverse with
/// the spectral cutoff rule above.
pub(crate) fn pinv_lstsq(x: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let svd = x.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = spectral_cutoff(x.nrows(), x.ncols(), sigma_max);
    let uty = u.transpose() * y;
    let mut scaled = DVector::zeros(svd.singular_values.len());
    for (k, sv) in svd.singular_values.iter().enumerate() {
        if *sv > cutoff {
            scaled[k] = uty[k] / sv;
        }
    }
    vt.transpose() * scaled
}

/// Least-squares fit where each reciprocal singular value d is replaced by
/// d / (d^2 + shift), a ridge-regularized pseudo-inverse.
pub(crate) fn ridge_shift_lstsq(x: &DMatrix<f64>, y: &DVector<f64>, shift: f64) -> DVector<f64> {
    let svd = x.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let uty = u.transpose() * y;
    let mut scaled = DVector::zeros(svd.singular_values.len());
    for (k, sv) in svd.singular_values.iter().enumerate() {
        scaled[k] = uty[k] * sv / (sv * sv + shift);
    }
    vt.transpose() * scaled
}

/// Number of eigenvalues of X'X above the spectral cutoff, plus the log
/// determinant when full rank. Used by fit criteria that penalize by
/// log |X'X| and fall back to a sentinel on singularity.
pub(crate) fn logdet_crossprod(xtx: &DMatrix<f64>) -> Result<Option<f64>> {
    let eigs = symmetric_eigenvalues(xtx)?;
    let max = eigs.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = spectral_cutoff(xtx.nrows(), xtx.ncols(), max);
    if eigs.iter().any(|&e| e <= cutoff) {
        return Ok(None);
    }
    Ok(Some(eigs.iter().map(|e| e.ln()).sum()))
}
