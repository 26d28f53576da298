//! Design-matrix criteria: information-matrix scalarizations and
//! prediction-error-variance forms.
//!
//! All share the shifted information matrix X'X + lambda I of the selected
//! rows. The "0" variants aim the prediction-error forms at the selected
//! rows themselves, the "2" variants insert X'X between two ridge
//! inverses, and the CD variants divide elementwise by the target's own
//! cross-product diagonal.

use nalgebra::{Cholesky, DMatrix, Dyn};

use super::{Builtin, CriterionContext};
use crate::error::{Error, Result};
use crate::linalg::{ridge_cholesky, symmetric_eigenvalues};

const DENOM_FLOOR: f64 = 1e-14;

pub(super) fn evaluate(kind: Builtin, rows: &[usize], ctx: &CriterionContext) -> Result<f64> {
    let p = ctx.p().values().dmat();
    let x_train = p.select_rows(rows.iter());
    let xtx = x_train.tr_mul(&x_train);
    let chol = ridge_cholesky(&xtx, ctx.spec().lambda)?;

    match kind {
        Builtin::Aopt | Builtin::Dopt | Builtin::Eopt => {
            information_form(kind, &chol, ctx)
        }
        _ => {
            let inv = chol.inverse();
            let target_owned;
            let target: &DMatrix<f64> = match kind {
                Builtin::PevMean0 | Builtin::PevMax0 | Builtin::CdMean0 | Builtin::CdMax0 => {
                    &x_train
                }
                _ => match &ctx.cache.x_test {
                    Some(t) => t,
                    None => {
                        let comp = ctx.complement_rows(rows);
                        if comp.is_empty() {
                            return Err(Error::DegenerateTarget);
                        }
                        target_owned = p.select_rows(comp.iter());
                        &target_owned
                    }
                },
            };
            let contrasted_owned;
            let t: &DMatrix<f64> = match &ctx.cache.contrast {
                Some(c) => {
                    contrasted_owned = c * target;
                    &contrasted_owned
                }
                None => target,
            };
            prediction_form(kind, &inv, &xtx, t)
        }
    }
}

/// AOPT / DOPT / EOPT on C (X'X + lambda I)^{-1} C'.
fn information_form(
    kind: Builtin,
    chol: &Cholesky<f64, Dyn>,
    ctx: &CriterionContext,
) -> Result<f64> {
    match &ctx.cache.contrast {
        None => match kind {
            Builtin::Aopt => Ok(chol.inverse().trace()),
            // logdet of the inverse is minus the logdet of the factorized
            // matrix; read it off the Cholesky pivots.
            Builtin::Dopt => {
                let mut acc = 0.0;
                for v in chol.l_dirty().diagonal().iter() {
                    acc += v.ln();
                }
                Ok(-2.0 * acc)
            }
            Builtin::Eopt => {
                let eigs = symmetric_eigenvalues(&chol.inverse())?;
                Ok(eigs.into_iter().fold(f64::NEG_INFINITY, f64::max))
            }
            _ => unreachable!(),
        },
        Some(c) => {
            let g = c * chol.inverse() * c.transpose();
            match kind {
                Builtin::Aopt => Ok(g.trace()),
                Builtin::Dopt => crate::linalg::log_det_dmat(&g, 0.0),
                Builtin::Eopt => {
                    let eigs = symmetric_eigenvalues(&g)?;
                    Ok(eigs.into_iter().fold(f64::NEG_INFINITY, f64::max))
                }
                _ => unreachable!(),
            }
        }
    }
}

/// PEV / CD / GOPT forms on T R T' with R = (X'X + lambda I)^{-1}, or
/// T R X'X R T' for the "2" variants. T already carries the contrast.
fn prediction_form(
    kind: Builtin,
    inv: &DMatrix<f64>,
    xtx: &DMatrix<f64>,
    t: &DMatrix<f64>,
) -> Result<f64> {
    let middle = match kind {
        Builtin::PevMean2 | Builtin::PevMax2 | Builtin::CdMean2 | Builtin::CdMax2 => {
            inv * xtx * inv
        }
        _ => inv.clone(),
    };

    match kind {
        Builtin::GoptPev | Builtin::GoptPev2 => {
            let pev = t * middle * t.transpose();
            let eigs = symmetric_eigenvalues(&pev)?;
            let max = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = eigs.iter().sum::<f64>() / eigs.len() as f64;
            Ok(if kind == Builtin::GoptPev { max } else { mean })
        }
        _ => {
            let tm = t * middle;
            let nrows = t.nrows();
            let mut vals = Vec::with_capacity(nrows);
            for i in 0..nrows {
                let q = tm.row(i).dot(&t.row(i));
                let v = if is_cd(kind) {
                    let d = t.row(i).dot(&t.row(i));
                    if d < DENOM_FLOOR {
                        return Err(Error::DegenerateTarget);
                    }
                    q / d
                } else {
                    q
                };
                vals.push(v);
            }
            Ok(reduce(kind, &vals))
        }
    }
}

fn is_cd(kind: Builtin) -> bool {
    matches!(
        kind,
        Builtin::CdMean
            | Builtin::CdMean0
            | Builtin::CdMean2
            | Builtin::CdMax
            | Builtin::CdMax0
            | Builtin::CdMax2
    )
}

fn reduce(kind: Builtin, vals: &[f64]) -> f64 {
    match kind {
        Builtin::PevMean
        | Builtin::PevMean0
        | Builtin::PevMean2
        | Builtin::CdMean
        | Builtin::CdMean0
        | Builtin::CdMean2 => vals.iter().sum::<f64>() / vals.len() as f64,
        _ => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}
