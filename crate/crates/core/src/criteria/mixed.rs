//! Mixed-model criteria on kernel-typed inputs.
//!
//! The selected rows play the role of observed individuals: the incidence
//! matrices reduce to row selections, so the coefficient system
//! Z'MZ + lambda Kinv is assembled by scattering the small projector block
//! of the selected rows into the shifted inverse kernel.

use nalgebra::DMatrix;

use super::{Builtin, CriterionContext};
use crate::error::{Error, Result};
use crate::linalg::{projection_complement_dmat, ridge_cholesky};

const DENOM_FLOOR: f64 = 1e-14;

pub(super) fn evaluate(kind: Builtin, rows: &[usize], ctx: &CriterionContext) -> Result<f64> {
    let test_owned;
    let test: &[usize] = match &ctx.cache.test_rows {
        Some(t) => t,
        None => {
            test_owned = ctx.complement_rows(rows);
            &test_owned
        }
    };
    if test.is_empty() {
        return Err(Error::DegenerateTarget);
    }

    match kind {
        Builtin::GaussMeanMM => gauss_posterior(rows, test, ctx),
        Builtin::PevMeanMM | Builtin::CdMeanMM => {
            let h = coefficient_inverse(rows, ctx)?;
            match kind {
                Builtin::PevMeanMM => {
                    let ht = block(&h, test, test);
                    Ok(mean_diag(&apply_contrast(ctx, &ht)))
                }
                Builtin::CdMeanMM => {
                    let k = ctx.cache.kernel.as_ref().expect("kernel cached");
                    let lambda = ctx.spec().lambda;
                    let kt = block(k, test, test);
                    let bt = {
                        let ht = block(&h, test, test);
                        &kt - ht * lambda
                    };
                    let num = apply_contrast(ctx, &bt);
                    let den = apply_contrast(ctx, &kt);
                    let mut acc = 0.0;
                    for i in 0..num.nrows() {
                        let d = den[(i, i)];
                        if d.abs() < DENOM_FLOOR {
                            return Err(Error::DegenerateTarget);
                        }
                        acc += num[(i, i)] / d;
                    }
                    Ok(-(acc / num.nrows() as f64))
                }
                _ => unreachable!(),
            }
        }
        _ => unreachable!(),
    }
}

/// (Z'MZ + lambda Kinv)^{-1} with M the projector orthogonal to the fixed
/// design of the selected rows.
fn coefficient_inverse(rows: &[usize], ctx: &CriterionContext) -> Result<DMatrix<f64>> {
    let kinv = ctx.cache.kinv.as_ref().expect("kinv cached");
    let w_full = ctx.cache.fixed_full.as_ref().expect("fixed design cached");
    let w_train = w_full.select_rows(rows.iter());
    let m = projection_complement_dmat(&w_train);

    let mut system = kinv * ctx.spec().lambda;
    for (a, &ia) in rows.iter().enumerate() {
        for (b, &ib) in rows.iter().enumerate() {
            system[(ia, ib)] += m[(a, b)];
        }
    }
    Ok(ridge_cholesky(&system, 0.0)?.inverse())
}

/// -mean of the Gaussian-process posterior variances of the target rows.
fn gauss_posterior(rows: &[usize], test: &[usize], ctx: &CriterionContext) -> Result<f64> {
    let k = ctx.cache.kernel.as_ref().expect("kernel cached");
    let ktt = block(k, test, test);
    let ktr = block(k, test, rows);
    let krr = block(k, rows, rows);
    let chol = ridge_cholesky(&krr, ctx.spec().lambda)?;
    let solved = chol.solve(&ktr.transpose());
    let mut acc = 0.0;
    for i in 0..test.len() {
        acc += ktt[(i, i)] - ktr.row(i).dot(&solved.column(i).transpose());
    }
    Ok(-(acc / test.len() as f64))
}

/// Gaussian kernel over the rows of P with bandwidth equal to the column
/// count: K_ij = exp(-||x_i - x_j||^2 / m).
pub(super) fn gaussian_kernel(p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.nrows();
    let m = p.ncols() as f64;
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 1.0;
        for j in (i + 1)..n {
            let mut acc = 0.0;
            for c in 0..p.ncols() {
                let d = p[(i, c)] - p[(j, c)];
                acc += d * d;
            }
            let v = (-acc / m).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

fn block(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn apply_contrast(ctx: &CriterionContext, block: &DMatrix<f64>) -> DMatrix<f64> {
    match &ctx.cache.contrast {
        Some(c) => c * block * c.transpose(),
        None => block.clone(),
    }
}

fn mean_diag(m: &DMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        acc += m[(i, i)];
    }
    acc / m.nrows() as f64
}
