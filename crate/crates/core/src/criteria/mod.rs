//! Optimization criteria: the built-in design-criterion catalog, example
//! criteria for regression and marker data, and a registry for user
//! defined criteria.
//!
//! Every criterion returns a scalar that the optimizer MINIMIZES. Criteria
//! whose tabulated form carries a leading minus sign (CDMEANMM,
//! GAUSSMEANMM) keep it verbatim; for GAUSSMEANMM that means minimization
//! maximizes the posterior variance of the target block, which is the
//! printed convention.
//!
//! Evaluation is pure: a [`CriterionContext`] is immutable after
//! construction and all per-run precomputation (distance matrices, kernel
//! inverses, full-data fits, target-kernel triangles) happens once, up
//! front. Parameter checks also run at construction, never per evaluation.

mod extras;
mod mixed;
mod xfamily;

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use extras::{alignment_target_kernel, vanraden_amat};

use crate::data::{LabeledMatrix, PartitionPlan};
use crate::error::{Error, Result};
use crate::linalg::{pairwise_distances, Matrix, SymmetricMatrix};
use crate::solution::SubsetSolution;

/// Built-in criteria, dispatched by their exact catalog names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Aopt,
    Dopt,
    Eopt,
    PevMean,
    PevMean0,
    PevMean2,
    PevMax,
    PevMax0,
    PevMax2,
    CdMean,
    CdMean0,
    CdMean2,
    CdMax,
    CdMax0,
    CdMax2,
    GoptPev,
    GoptPev2,
    PevMeanMM,
    CdMeanMM,
    GaussMeanMM,
    Maximin,
    KernelAlign,
    AicOls,
    Dfbetas,
    GainInb,
    FitLogdet,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Aopt => "AOPT",
            Builtin::Dopt => "DOPT",
            Builtin::Eopt => "EOPT",
            Builtin::PevMean => "PEVMEAN",
            Builtin::PevMean0 => "PEVMEAN0",
            Builtin::PevMean2 => "PEVMEAN2",
            Builtin::PevMax => "PEVMAX",
            Builtin::PevMax0 => "PEVMAX0",
            Builtin::PevMax2 => "PEVMAX2",
            Builtin::CdMean => "CDMEAN",
            Builtin::CdMean0 => "CDMEAN0",
            Builtin::CdMean2 => "CDMEAN2",
            Builtin::CdMax => "CDMAX",
            Builtin::CdMax0 => "CDMAX0",
            Builtin::CdMax2 => "CDMAX2",
            Builtin::GoptPev => "GOPTPEV",
            Builtin::GoptPev2 => "GOPTPEV2",
            Builtin::PevMeanMM => "PEVMEANMM",
            Builtin::CdMeanMM => "CDMEANMM",
            Builtin::GaussMeanMM => "GAUSSMEANMM",
            Builtin::Maximin => "MAXIMIN",
            Builtin::KernelAlign => "KERNELALIGN",
            Builtin::AicOls => "AICOLS",
            Builtin::Dfbetas => "DFBETAS",
            Builtin::GainInb => "GAININB",
            Builtin::FitLogdet => "FITLOGDET",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        ALL_BUILTINS.iter().copied().find(|b| b.name() == name)
    }
}

pub const ALL_BUILTINS: [Builtin; 26] = [
    Builtin::Aopt,
    Builtin::Dopt,
    Builtin::Eopt,
    Builtin::PevMean,
    Builtin::PevMean0,
    Builtin::PevMean2,
    Builtin::PevMax,
    Builtin::PevMax0,
    Builtin::PevMax2,
    Builtin::CdMean,
    Builtin::CdMean0,
    Builtin::CdMean2,
    Builtin::CdMax,
    Builtin::CdMax0,
    Builtin::CdMax2,
    Builtin::GoptPev,
    Builtin::GoptPev2,
    Builtin::PevMeanMM,
    Builtin::CdMeanMM,
    Builtin::GaussMeanMM,
    Builtin::Maximin,
    Builtin::KernelAlign,
    Builtin::AicOls,
    Builtin::Dfbetas,
    Builtin::GainInb,
    Builtin::FitLogdet,
];

/// Input interpretation of a criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    /// P is a design/data matrix.
    DesignMatrix,
    /// P is kernel-typed (a similarity matrix, its inverse, or data a
    /// kernel is derived from).
    Kernel,
}

/// Catalog metadata for one criterion.
#[derive(Debug, Clone)]
pub struct CriterionInfo {
    pub name: &'static str,
    pub input: InputKind,
    pub required: &'static [&'static str],
    pub optional: &'static [&'static str],
    pub formula: &'static str,
}

/// The full built-in catalog, in listing order.
pub fn catalog() -> Vec<CriterionInfo> {
    use InputKind::*;
    let x = |name, formula| CriterionInfo {
        name,
        input: DesignMatrix,
        required: &["lambda"],
        optional: &["contrast"],
        formula,
    };
    vec![
        x("AOPT", "trace(C (X'X + l I)^-1 C')"),
        x("DOPT", "logdet(C (X'X + l I)^-1 C')"),
        x("EOPT", "max eigenvalue(C (X'X + l I)^-1 C')"),
        x("PEVMEAN", "mean diag(C Xt (X'X + l I)^-1 Xt' C')"),
        x("PEVMEAN0", "mean diag(C X (X'X + l I)^-1 X' C')"),
        x(
            "PEVMEAN2",
            "mean diag(C Xt (X'X + l I)^-1 X'X (X'X + l I)^-1 Xt' C')",
        ),
        x("PEVMAX", "max diag(C Xt (X'X + l I)^-1 Xt' C')"),
        x("PEVMAX0", "max diag(C X (X'X + l I)^-1 X' C')"),
        x(
            "PEVMAX2",
            "max diag(C Xt (X'X + l I)^-1 X'X (X'X + l I)^-1 Xt' C')",
        ),
        x(
            "CDMEAN",
            "mean[diag(C Xt (X'X + l I)^-1 Xt' C') / diag(C Xt Xt' C')]",
        ),
        x(
            "CDMEAN0",
            "mean[diag(C X (X'X + l I)^-1 X' C') / diag(C X X' C')]",
        ),
        x(
            "CDMEAN2",
            "mean[diag(C Xt (X'X + l I)^-1 X'X (X'X + l I)^-1 Xt' C') / diag(C Xt Xt' C')]",
        ),
        x(
            "CDMAX",
            "max[diag(C Xt (X'X + l I)^-1 Xt' C') / diag(C Xt Xt' C')]",
        ),
        x(
            "CDMAX0",
            "max[diag(C X (X'X + l I)^-1 X' C') / diag(C X X' C')]",
        ),
        x(
            "CDMAX2",
            "max[diag(C Xt (X'X + l I)^-1 X'X (X'X + l I)^-1 Xt' C') / diag(C Xt Xt' C')]",
        ),
        x(
            "GOPTPEV",
            "max eigenvalue(C Xt (X'X + l I)^-1 Xt' C')",
        ),
        x(
            "GOPTPEV2",
            "mean eigenvalue(C Xt (X'X + l I)^-1 Xt' C')",
        ),
        CriterionInfo {
            name: "PEVMEANMM",
            input: Kernel,
            required: &["lambda"],
            optional: &["contrast", "kernel_inverse", "fixed_design"],
            formula: "mean diag(C Zt (Z'MZ + l Kinv)^-1 Zt' C'), M = I - W(W'W)^- W'",
        },
        CriterionInfo {
            name: "CDMEANMM",
            input: Kernel,
            required: &["lambda"],
            optional: &["contrast", "kernel_inverse", "fixed_design"],
            formula: "-mean[diag(C Zt (K - l (Z'MZ + l Kinv)^-1) Zt' C') / diag(C Zt K Zt' C')]",
        },
        CriterionInfo {
            name: "GAUSSMEANMM",
            input: Kernel,
            required: &["lambda"],
            optional: &[],
            formula: "-mean diag(Zt K Zt' - Zt K Z' (Z K Z' + l I)^-1 Z K Zt')",
        },
        CriterionInfo {
            name: "MAXIMIN",
            input: DesignMatrix,
            required: &[],
            optional: &[],
            formula: "-min distance between selected rows",
        },
        CriterionInfo {
            name: "KERNELALIGN",
            input: DesignMatrix,
            required: &["target_kernel"],
            optional: &[],
            formula: "mean squared difference of kernel lower triangles vs target",
        },
        CriterionInfo {
            name: "AICOLS",
            input: DesignMatrix,
            required: &["response"],
            optional: &[],
            formula: "gaussian AIC of least-squares fit of y on selected columns",
        },
        CriterionInfo {
            name: "DFBETAS",
            input: DesignMatrix,
            required: &["lambda"],
            optional: &[],
            formula: "-(1/sd) (b - b_sub)' (Xs'Xs + l I) (b - b_sub), group deletion influence",
        },
        CriterionInfo {
            name: "GAININB",
            input: DesignMatrix,
            required: &["weight"],
            optional: &[],
            formula: "-(1-w) mean(g) + w mean(lower triangle of relationship matrix)",
        },
        CriterionInfo {
            name: "FITLOGDET",
            input: DesignMatrix,
            required: &["response", "weight"],
            optional: &[],
            formula: "(1-w) mean squared residual - w logdet(X'X)",
        },
    ]
}

/// Criterion selection plus its parameters.
#[derive(Clone)]
pub struct CriterionSpec {
    pub name: String,
    pub lambda: f64,
    pub contrast: Option<Matrix>,
    pub kernel_inverse: Option<LabeledMatrix>,
    pub fixed_design: Option<Matrix>,
    pub target_kernel: Option<SymmetricMatrix>,
    pub response: Option<Vec<f64>>,
    pub weight: Option<f64>,
    /// Trait covariance inputs of the multi-trait mixed-model variant.
    /// Accepted here but rejected at validation; the single-trait formulas
    /// are the only supported ones.
    pub multi_trait_vg: Option<Matrix>,
    pub multi_trait_ve: Option<Matrix>,
}

impl std::fmt::Debug for CriterionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CriterionSpec")
            .field("name", &self.name)
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

impl CriterionSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            lambda: 1e-6,
            contrast: None,
            kernel_inverse: None,
            fixed_design: None,
            target_kernel: None,
            response: None,
            weight: None,
            multi_trait_vg: None,
            multi_trait_ve: None,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_contrast(mut self, c: Matrix) -> Self {
        self.contrast = Some(c);
        self
    }

    pub fn with_kernel_inverse(mut self, kinv: LabeledMatrix) -> Self {
        self.kernel_inverse = Some(kinv);
        self
    }

    pub fn with_fixed_design(mut self, w: Matrix) -> Self {
        self.fixed_design = Some(w);
        self
    }

    pub fn with_target_kernel(mut self, k: SymmetricMatrix) -> Self {
        self.target_kernel = Some(k);
        self
    }

    pub fn with_response(mut self, y: Vec<f64>) -> Self {
        self.response = Some(y);
        self
    }

    pub fn with_weight(mut self, w: f64) -> Self {
        self.weight = Some(w);
        self
    }
}

/// Signature of a user-defined criterion.
pub type CustomCriterion =
    dyn Fn(&SubsetSolution, &CriterionContext) -> Result<f64> + Send + Sync;

/// Registry of user-defined criteria. Registration happens in setup; the
/// registry is then only read, so runs can share it freely.
#[derive(Default, Clone)]
pub struct Registry {
    custom: HashMap<String, Arc<CustomCriterion>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a criterion under a new name. Built-ins cannot be
    /// shadowed and names cannot be reused.
    pub fn register<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: Fn(&SubsetSolution, &CriterionContext) -> Result<f64> + Send + Sync + 'static,
    {
        if Builtin::from_name(name).is_some() {
            return Err(Error::ShadowingBuiltin(name.to_string()));
        }
        if self.custom.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.custom.insert(name.to_string(), Arc::new(f));
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.custom.keys().map(String::as_str)
    }

    fn resolve(&self, name: &str) -> Result<Resolved> {
        if let Some(b) = Builtin::from_name(name) {
            return Ok(Resolved::Builtin(b));
        }
        match self.custom.get(name) {
            Some(f) => Ok(Resolved::Custom(Arc::clone(f))),
            None => Err(Error::UnknownCriterion(name.to_string())),
        }
    }
}

#[derive(Clone)]
enum Resolved {
    Builtin(Builtin),
    Custom(Arc<CustomCriterion>),
}

/// How the kernel-alignment criterion builds its subset kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AlignMode {
    /// Entries are allele counts in {0,1,2}: relationship-matrix kernel.
    Markers,
    /// Continuous features: standardized cross-product kernel.
    Continuous,
}

/// Per-run precomputed state shared by all evaluations.
pub(crate) struct Cache {
    /// P row id -> row index.
    pub row_index: HashMap<String, usize>,
    /// P row index per candidate, in candidate (canonical) order.
    pub candidate_rows: Vec<usize>,
    /// P row indices of the explicit test set, if any.
    pub test_rows: Option<Vec<usize>>,
    pub contrast: Option<DMatrix<f64>>,
    /// Explicit-test design rows, X family.
    pub x_test: Option<DMatrix<f64>>,
    pub distances: Option<SymmetricMatrix>,
    /// Lower-triangle-with-diagonal of the alignment target kernel.
    pub target_lower: Option<Vec<f64>>,
    pub align_mode: Option<AlignMode>,
    /// Inverse kernel for the mixed-model criteria.
    pub kinv: Option<DMatrix<f64>>,
    /// Kernel K: inverse of Kinv (CDMEANMM) or derived Gaussian kernel
    /// (GAUSSMEANMM).
    pub kernel: Option<DMatrix<f64>>,
    /// Fixed-effect design over all rows of P; defaults to a ones column.
    pub fixed_full: Option<DMatrix<f64>>,
    pub response: Option<DVector<f64>>,
    /// Full-data ridge fit for the influence criterion.
    pub dfb: Option<DfbetasCache>,
}

pub(crate) struct DfbetasCache {
    /// [1 | predictors] over all rows.
    pub design_full: DMatrix<f64>,
    pub beta_full: DVector<f64>,
}

impl Cache {
    fn empty() -> Self {
        Self {
            row_index: HashMap::new(),
            candidate_rows: Vec::new(),
            test_rows: None,
            contrast: None,
            x_test: None,
            distances: None,
            target_lower: None,
            align_mode: None,
            kinv: None,
            kernel: None,
            fixed_full: None,
            response: None,
            dfb: None,
        }
    }
}

/// Immutable evaluation context: data, partition, criterion parameters and
/// the per-run cache. Criterion evaluation never mutates it, so it can be
/// shared across worker threads.
pub struct CriterionContext {
    p: LabeledMatrix,
    plan: PartitionPlan,
    spec: CriterionSpec,
    resolved: Resolved,
    pub(crate) cache: Cache,
}

impl std::fmt::Debug for CriterionContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CriterionContext")
            .field("criterion", &self.spec.name)
            .field("rows", &self.p.nrows())
            .field("ntoselect", &self.plan.ntoselect())
            .finish_non_exhaustive()
    }
}

impl CriterionContext {
    /// Builds and validates the context. Every parameter required by the
    /// named criterion is checked here, before any run starts.
    pub fn new(
        p: &LabeledMatrix,
        plan: &PartitionPlan,
        spec: &CriterionSpec,
        registry: &Registry,
    ) -> Result<Self> {
        let resolved = registry.resolve(&spec.name)?;

        if spec.multi_trait_vg.is_some() || spec.multi_trait_ve.is_some() {
            return Err(Error::UnsupportedCriterion(format!(
                "multi-trait variant of {} (Vg/Ve supplied)",
                spec.name
            )));
        }

        let mut cache = Cache::empty();
        for (i, id) in p.row_ids().iter().enumerate() {
            cache.row_index.insert(id.clone(), i);
        }
        cache.candidate_rows = plan
            .candidates()
            .iter()
            .map(|id| cache.row_index[id])
            .collect();
        cache.test_rows = plan
            .test()
            .map(|t| t.iter().map(|id| cache.row_index[id]).collect());

        let mut ctx = Self {
            p: p.clone(),
            plan: plan.clone(),
            spec: spec.clone(),
            resolved,
            cache,
        };
        if let Resolved::Builtin(b) = ctx.resolved {
            ctx.prepare_builtin(b)?;
        }
        Ok(ctx)
    }

    pub fn p(&self) -> &LabeledMatrix {
        &self.p
    }

    pub fn plan(&self) -> &PartitionPlan {
        &self.plan
    }

    pub fn spec(&self) -> &CriterionSpec {
        &self.spec
    }

    /// Number of rows a criterion's implicit target has when no test set
    /// is given: everything in P outside the trained subset.
    fn implicit_target_len(&self) -> usize {
        self.p.nrows() - self.plan.ntoselect()
    }

    fn prepare_builtin(&mut self, b: Builtin) -> Result<()> {
        if self.spec.lambda <= 0.0 {
            return Err(Error::Config("criterion lambda must be positive".into()));
        }
        if let Some(w) = self.spec.weight {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::Config("weight must be in [0, 1]".into()));
            }
        }
        if let Some(c) = &self.spec.contrast {
            self.cache.contrast = Some(c.dmat().clone());
        }
        match b {
            Builtin::Aopt | Builtin::Dopt | Builtin::Eopt => {
                self.check_contrast_cols(self.p.ncols(), "columns of P")?;
            }
            Builtin::PevMean
            | Builtin::PevMean2
            | Builtin::PevMax
            | Builtin::PevMax2
            | Builtin::CdMean
            | Builtin::CdMean2
            | Builtin::CdMax
            | Builtin::CdMax2
            | Builtin::GoptPev
            | Builtin::GoptPev2 => {
                let t = match &self.cache.test_rows {
                    Some(rows) => {
                        let x_test = self.p.values().dmat().select_rows(rows.iter());
                        let t = rows.len();
                        self.cache.x_test = Some(x_test);
                        t
                    }
                    None => self.implicit_target_len(),
                };
                if t == 0 {
                    return Err(Error::DegenerateTarget);
                }
                self.check_contrast_cols(t, "target rows")?;
            }
            Builtin::PevMean0 | Builtin::PevMax0 | Builtin::CdMean0 | Builtin::CdMax0 => {
                self.check_contrast_cols(self.plan.ntoselect(), "selected rows")?;
            }
            Builtin::PevMeanMM | Builtin::CdMeanMM => {
                let kinv = match &self.spec.kernel_inverse {
                    Some(k) => {
                        if k.row_ids() != self.p.row_ids() {
                            return Err(Error::Dimension(
                                "kernel inverse row ids must match P".into(),
                            ));
                        }
                        SymmetricMatrix::from_matrix(k.values())?
                    }
                    None => SymmetricMatrix::from_matrix(self.p.values()).map_err(|_| {
                        Error::MissingParameter {
                            criterion: b.name().into(),
                            parameter: "kernel_inverse (P is not a symmetric matrix)",
                        }
                    })?,
                };
                let n = self.p.nrows();
                let w = match &self.spec.fixed_design {
                    Some(w) => {
                        if w.rows() != n {
                            return Err(Error::Dimension(
                                "fixed_design must have one row per row of P".into(),
                            ));
                        }
                        w.dmat().clone()
                    }
                    None => DMatrix::from_element(n, 1, 1.0),
                };
                let t = self
                    .cache
                    .test_rows
                    .as_ref()
                    .map_or(self.implicit_target_len(), Vec::len);
                if t == 0 {
                    return Err(Error::DegenerateTarget);
                }
                self.check_contrast_cols(t, "target rows")?;
                if b == Builtin::CdMeanMM {
                    // K = Kinv^{-1}, computed once.
                    let k = crate::linalg::ridge_cholesky(kinv.dmat(), 0.0)?.inverse();
                    self.cache.kernel = Some(k);
                }
                self.cache.kinv = Some(kinv.dmat().clone());
                self.cache.fixed_full = Some(w);
            }
            Builtin::GaussMeanMM => {
                let t = self
                    .cache
                    .test_rows
                    .as_ref()
                    .map_or(self.implicit_target_len(), Vec::len);
                if t == 0 {
                    return Err(Error::DegenerateTarget);
                }
                self.cache.kernel = Some(mixed::gaussian_kernel(self.p.values().dmat()));
            }
            Builtin::Maximin => {
                if self.plan.ntoselect() < 2 {
                    return Err(Error::Size {
                        ntoselect: self.plan.ntoselect(),
                        navail: self.plan.candidates().len(),
                    });
                }
                self.cache.distances = Some(pairwise_distances(self.p.values()));
            }
            Builtin::KernelAlign => {
                let target = self.spec.target_kernel.as_ref().ok_or({
                    Error::MissingParameter {
                        criterion: "KERNELALIGN".into(),
                        parameter: "target_kernel",
                    }
                })?;
                let nobs = self.p.ncols();
                if target.order() != nobs {
                    return Err(Error::Dimension(format!(
                        "target kernel order {} != {} observations",
                        target.order(),
                        nobs
                    )));
                }
                self.cache.align_mode = Some(extras::detect_align_mode(self.p.values().dmat()));
                self.cache.target_lower = Some(extras::lower_triangle(target.dmat()));
            }
            Builtin::AicOls | Builtin::FitLogdet => {
                let y = self.spec.response.as_ref().ok_or(Error::MissingParameter {
                    criterion: b.name().into(),
                    parameter: "response",
                })?;
                if y.len() != self.p.ncols() {
                    return Err(Error::Dimension(format!(
                        "response length {} != {} observations (columns of P)",
                        y.len(),
                        self.p.ncols()
                    )));
                }
                if b == Builtin::FitLogdet && self.spec.weight.is_none() {
                    return Err(Error::MissingParameter {
                        criterion: "FITLOGDET".into(),
                        parameter: "weight",
                    });
                }
                self.cache.response = Some(DVector::from_column_slice(y));
            }
            Builtin::Dfbetas => {
                if self.p.ncols() < 2 {
                    return Err(Error::Dimension(
                        "DFBETAS needs a response column plus at least one predictor".into(),
                    ));
                }
                self.cache.dfb = Some(extras::dfbetas_cache(
                    self.p.values().dmat(),
                    self.spec.lambda,
                )?);
            }
            Builtin::GainInb => {
                if self.spec.weight.is_none() {
                    return Err(Error::MissingParameter {
                        criterion: "GAININB".into(),
                        parameter: "weight",
                    });
                }
                if self.p.ncols() < 2 {
                    return Err(Error::Dimension(
                        "GAININB needs a value column plus marker columns".into(),
                    ));
                }
                extras::check_marker_coding(self.p.values().dmat(), 1, -1.0, 1.0)?;
            }
        }
        Ok(())
    }

    fn check_contrast_cols(&self, expected: usize, what: &str) -> Result<()> {
        if let Some(c) = &self.cache.contrast {
            if c.ncols() != expected {
                return Err(Error::Dimension(format!(
                    "contrast has {} columns, expected {expected} ({what})",
                    c.ncols()
                )));
            }
        }
        Ok(())
    }

    /// Evaluates the criterion for a solution. Members must be row ids of
    /// P.
    pub fn evaluate(&self, train: &SubsetSolution) -> Result<f64> {
        match &self.resolved {
            Resolved::Custom(f) => f(train, self),
            Resolved::Builtin(b) => {
                let mut rows = Vec::with_capacity(train.len());
                for id in train.members() {
                    match self.cache.row_index.get(id) {
                        Some(&i) => rows.push(i),
                        None => return Err(Error::UnknownId(id.clone())),
                    }
                }
                self.evaluate_rows(*b, &rows)
            }
        }
    }

    /// Evaluates from indices into the candidate list (canonical order),
    /// avoiding id lookups on hot paths.
    pub(crate) fn evaluate_candidate_indices(&self, cand_idx: &[usize]) -> Result<f64> {
        match &self.resolved {
            Resolved::Builtin(b) => {
                let rows: Vec<usize> = cand_idx
                    .iter()
                    .map(|&c| self.cache.candidate_rows[c])
                    .collect();
                self.evaluate_rows(*b, &rows)
            }
            Resolved::Custom(f) => {
                let ids: Vec<String> = cand_idx
                    .iter()
                    .map(|&c| self.plan.candidates()[c].clone())
                    .collect();
                let solution = SubsetSolution::new(ids)?;
                f(&solution, self)
            }
        }
    }

    fn evaluate_rows(&self, b: Builtin, rows: &[usize]) -> Result<f64> {
        match b {
            Builtin::Aopt
            | Builtin::Dopt
            | Builtin::Eopt
            | Builtin::PevMean
            | Builtin::PevMean0
            | Builtin::PevMean2
            | Builtin::PevMax
            | Builtin::PevMax0
            | Builtin::PevMax2
            | Builtin::CdMean
            | Builtin::CdMean0
            | Builtin::CdMean2
            | Builtin::CdMax
            | Builtin::CdMax0
            | Builtin::CdMax2
            | Builtin::GoptPev
            | Builtin::GoptPev2 => xfamily::evaluate(b, rows, self),
            Builtin::PevMeanMM | Builtin::CdMeanMM | Builtin::GaussMeanMM => {
                mixed::evaluate(b, rows, self)
            }
            Builtin::Maximin => extras::maximin(rows, self),
            Builtin::KernelAlign => extras::kernel_alignment(rows, self),
            Builtin::AicOls => extras::aic_ols(rows, self),
            Builtin::Dfbetas => extras::dfbetas(rows, self),
            Builtin::GainInb => extras::gain_inbreeding(rows, self),
            Builtin::FitLogdet => extras::fit_logdet(rows, self),
        }
    }

    /// Rows of P outside `rows`, in P order: the implicit target when no
    /// test set was given.
    pub(crate) fn complement_rows(&self, rows: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.p.nrows()];
        for &r in rows {
            member[r] = true;
        }
        (0..self.p.nrows()).filter(|&i| !member[i]).collect()
    }
}
