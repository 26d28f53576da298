//! Criteria beyond the design-matrix catalog: space-filling selection,
//! marker-panel alignment, regression model selection, influence-based row
//! selection and the gain/inbreeding trade-off.

use nalgebra::{DMatrix, DVector};

use super::{AlignMode, CriterionContext, DfbetasCache};
use crate::data::LabeledMatrix;
use crate::error::{Error, Result};
use crate::linalg::{
    logdet_crossprod, pinv_lstsq, ridge_cholesky, ridge_shift_lstsq, SymmetricMatrix,
};

/// Sentinel returned by FITLOGDET when the information matrix is singular
/// beyond the spectral cutoff.
pub const SINGULAR_SENTINEL: f64 = 1e300;

/// Internal ridge shift applied to squared singular values in the
/// FITLOGDET fit, separate from the criterion weight.
const FIT_SHIFT: f64 = 1e-7;

const VARIANCE_FLOOR: f64 = 1e-14;

// ---------------------------------------------------------------------
// MAXIMIN
// ---------------------------------------------------------------------

/// Negated minimum pairwise distance among the selected rows, so that
/// minimizing spreads the design out. Always <= 0; exactly 0 only when two
/// selected points coincide.
pub(super) fn maximin(rows: &[usize], ctx: &CriterionContext) -> Result<f64> {
    let d = ctx.cache.distances.as_ref().expect("distances cached");
    let mut min = f64::INFINITY;
    for (a, &ia) in rows.iter().enumerate() {
        for &ib in rows.iter().skip(a + 1) {
            let v = d.get(ia, ib);
            if v < min {
                min = v;
            }
        }
    }
    Ok(-min)
}

// ---------------------------------------------------------------------
// Relationship matrix and kernel alignment
// ---------------------------------------------------------------------

/// Relationship matrix A = W W' / k from allele counts coded 0/1/2, where
/// W centers each marker column and k is twice the summed marker
/// heterozygosities. Row order matches the input rows.
pub fn vanraden_amat(m: &LabeledMatrix) -> Result<SymmetricMatrix> {
    check_marker_coding(m.values().dmat(), 0, 0.0, 2.0)?;
    let a = vanraden_from_dmatrix(m.values().dmat())?;
    Ok(SymmetricMatrix::from_product(a))
}

pub(super) fn vanraden_from_dmatrix(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, cols) = (m.nrows(), m.ncols());
    let mut k = 0.0;
    let mut means = Vec::with_capacity(cols);
    for j in 0..cols {
        let mean = m.column(j).sum() / n as f64;
        let p = mean / 2.0;
        k += 2.0 * p * (1.0 - p);
        means.push(mean);
    }
    if k <= VARIANCE_FLOOR {
        return Err(Error::MonomorphicData);
    }
    let mut w = m.clone();
    for j in 0..cols {
        for i in 0..n {
            w[(i, j)] -= means[j];
        }
    }
    Ok(&w * w.transpose() / k)
}

/// Verifies that matrix columns from `first_col` on hold only the coding
/// values lo, lo+1, ..., hi.
pub(super) fn check_marker_coding(
    m: &DMatrix<f64>,
    first_col: usize,
    lo: f64,
    hi: f64,
) -> Result<()> {
    for j in first_col..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v < lo || v > hi || v.fract() != 0.0 {
                return Err(Error::Dimension(format!(
                    "marker entry {v} at ({i},{j}) outside coding {lo}..{hi}"
                )));
            }
        }
    }
    Ok(())
}

/// Kernel built from all features of a feature-transposed matrix (rows are
/// selectable features, columns are observations): the alignment target
/// when selecting a representative feature subset.
pub fn alignment_target_kernel(features: &LabeledMatrix) -> Result<SymmetricMatrix> {
    let mode = detect_align_mode(features.values().dmat());
    let all: Vec<usize> = (0..features.nrows()).collect();
    let k = subset_kernel(features.values().dmat(), &all, mode)?;
    Ok(SymmetricMatrix::from_product(k))
}

pub(super) fn detect_align_mode(p: &DMatrix<f64>) -> AlignMode {
    let is_marker = p
        .iter()
        .all(|&v| v == 0.0 || v == 1.0 || v == 2.0);
    if is_marker {
        AlignMode::Markers
    } else {
        AlignMode::Continuous
    }
}

/// Kernel over observations from the selected feature rows: the
/// relationship matrix for 0/1/2 markers, or the standardized
/// cross-product Z Z' / k for continuous features.
fn subset_kernel(p: &DMatrix<f64>, rows: &[usize], mode: AlignMode) -> Result<DMatrix<f64>> {
    let nobs = p.ncols();
    let k = rows.len();
    // observations x selected features
    let mut f = DMatrix::zeros(nobs, k);
    for (j, &r) in rows.iter().enumerate() {
        for i in 0..nobs {
            f[(i, j)] = p[(r, i)];
        }
    }
    match mode {
        AlignMode::Markers => vanraden_from_dmatrix(&f),
        AlignMode::Continuous => {
            for j in 0..k {
                let mean = f.column(j).sum() / nobs as f64;
                let mut ss = 0.0;
                for i in 0..nobs {
                    f[(i, j)] -= mean;
                    ss += f[(i, j)] * f[(i, j)];
                }
                let sd = (ss / (nobs as f64 - 1.0)).sqrt();
                if sd < VARIANCE_FLOOR {
                    return Err(Error::MonomorphicData);
                }
                for i in 0..nobs {
                    f[(i, j)] /= sd;
                }
            }
            Ok(&f * f.transpose() / k as f64)
        }
    }
}

pub(super) fn lower_triangle(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Mean squared difference between the lower triangles (with diagonal) of
/// the subset kernel and the target kernel.
pub(super) fn kernel_alignment(rows: &[usize], ctx: &CriterionContext) -> Result<f64> {
    let mode = ctx.cache.align_mode.expect("mode cached");
    let target = ctx.cache.target_lower.as_ref().expect("target cached");
    let a = subset_kernel(ctx.p().values().dmat(), rows, mode)?;
    let lower = lower_triangle(&a);
    let mut acc = 0.0;
    for (s, t) in lower.iter().zip(target.iter()) {
        let d = s - t;
        acc += d * d;
    }
    Ok(acc / lower.len() as f64)
}

// ---------------------------------------------------------------------
// AIC variable selection
// ---------------------------------------------------------------------

/// Gaussian AIC of the least-squares fit of the response on an intercept
/// plus the selected predictor columns:
/// n (log 2 pi + log(RSS/n) + 1) + 2 (k + 2). Rank deficiency is absorbed
/// by the pseudo-inverse fit rather than raised as an error.
pub(super) fn aic_ols(rows: &[usize], ctx: &CriterionContext) -> Result<f64> {
    let y = ctx.cache.response.as_ref().expect("response cached");
    let p = ctx.p().values().dmat();
    let n = p.ncols();
    let k = rows.len();
    let mut x = DMatrix::zeros(n, k + 1);
    for i in 0..n {
        x[(i, 0)] = 1.0;
    }
    for (j, &r) in rows.iter().enumerate() {
        for i in 0..n {
            x[(i, j + 1)] = p[(r, i)];
        }
    }
    let beta = pinv_lstsq(&x, y);
    let resid = y - &x * beta;
    let rss: f64 = resid.iter().map(|v| v * v).sum();
    let nf = n as f64;
    Ok(nf * ((2.0 * std::f64::consts::PI).ln() + (rss / nf).ln() + 1.0) + 2.0 * (k as f64 + 2.0))
}

// ---------------------------------------------------------------------
// DFBETAS group influence
// ---------------------------------------------------------------------

pub(super) fn dfbetas_cache(p: &DMatrix<f64>, lambda: f64) -> Result<DfbetasCache> {
    let n = p.nrows();
    let m = p.ncols(); // intercept + (ncols - 1) predictors
    let mut design = DMatrix::zeros(n, m);
    for i in 0..n {
        design[(i, 0)] = 1.0;
        for j in 1..m {
            design[(i, j)] = p[(i, j)];
        }
    }
    let xtx = design.tr_mul(&design);
    let y = p.column(0).clone_owned();
    let xty = design.tr_mul(&y);
    let beta_full = ridge_cholesky(&xtx, lambda)?.solve(&xty);
    Ok(DfbetasCache {
        design_full: design,
        beta_full,
    })
}

/// Negated, scaled coefficient displacement when the model is refitted on
/// the selected rows only. Minimizing keeps the rows most consistent with
/// the full-data fit.
pub(super) fn dfbetas(rows: &[usize], ctx: &CriterionContext) -> Result<f64> {
    let cache = ctx.cache.dfb.as_ref().expect("dfbetas cached");
    let p = ctx.p().values().dmat();
    let lambda = ctx.spec().lambda;

    let x_sub = cache.design_full.select_rows(rows.iter());
    let y_sub = DVector::from_fn(rows.len(), |i, _| p[(rows[i], 0)]);
    let mut gram = x_sub.tr_mul(&x_sub);
    for i in 0..gram.nrows() {
        gram[(i, i)] += lambda;
    }
    let chol = ridge_cholesky(&gram, 0.0)?;
    let beta_sub = chol.solve(&x_sub.tr_mul(&y_sub));

    let resid = &y_sub - &x_sub * &beta_sub;
    let nf = resid.len() as f64;
    let mean = resid.sum() / nf;
    let ss: f64 = resid.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (nf - 1.0)).sqrt();
    if sd < VARIANCE_FLOOR {
        return Err(Error::DegenerateVariance);
    }

    let delta = &cache.beta_full - beta_sub;
    let quad = delta.dot(&(&gram * &delta));
    Ok(-(quad / sd))
}

// ---------------------------------------------------------------------
// Gain / inbreeding trade-off
// ---------------------------------------------------------------------

/// -(1-w) mean(g) + w mean(lower triangle of A) over the selected rows,
/// with g the first column and A the relationship matrix of the remaining
/// marker columns (coded -1/0/1, shifted to allele counts).
pub(super) fn gain_inbreeding(rows: &[usize], ctx: &CriterionContext) -> Result<f64> {
    let w = ctx.spec().weight.expect("validated");
    let p = ctx.p().values().dmat();
    let n = rows.len();
    let gmean = rows.iter().map(|&r| p[(r, 0)]).sum::<f64>() / n as f64;

    let mut markers = DMatrix::zeros(n, p.ncols() - 1);
    for (i, &r) in rows.iter().enumerate() {
        for j in 1..p.ncols() {
            markers[(i, j - 1)] = p[(r, j)] + 1.0;
        }
    }
    let a = vanraden_from_dmatrix(&markers)?;
    let lower = lower_triangle(&a);
    let amean = lower.iter().sum::<f64>() / lower.len() as f64;
    Ok(-(1.0 - w) * gmean + w * amean)
}

// ---------------------------------------------------------------------
// Fit + log-determinant variable selection
// ---------------------------------------------------------------------

/// (1-w) mean squared residual of a ridge-shifted pseudo-inverse fit minus
/// w logdet(X'X); returns [`SINGULAR_SENTINEL`] when the information
/// matrix is singular and the penalty is active.
pub(super) fn fit_logdet(rows: &[usize], ctx: &CriterionContext) -> Result<f64> {
    let y = ctx.cache.response.as_ref().expect("response cached");
    let w = ctx.spec().weight.expect("validated");
    let p = ctx.p().values().dmat();
    let n = p.ncols();
    let k = rows.len();
    let mut x = DMatrix::zeros(n, k);
    for (j, &r) in rows.iter().enumerate() {
        for i in 0..n {
            x[(i, j)] = p[(r, i)];
        }
    }
    let coef = ridge_shift_lstsq(&x, y, FIT_SHIFT);
    let resid = y - &x * coef;
    let msr = resid.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if w == 0.0 {
        return Ok(msr);
    }
    let xtx = x.tr_mul(&x);
    match logdet_crossprod(&xtx)? {
        Some(ld) => Ok((1.0 - w) * msr - w * ld),
        None => Ok(SINGULAR_SENTINEL),
    }
}
