//! Parallel subset selection by a look-ahead genetic algorithm with tabu
//! memory, plus a catalog of experimental-design criteria and an
//! exhaustive oracle for verification.
//!
//! The optimizer searches for a fixed-size subset of labeled rows (a
//! training set, a variable panel, a parent set) minimizing a criterion.
//! Built-in criteria cover information-matrix scalarizations (A-, D-,
//! E-optimality), prediction-error-variance and coefficient-of-
//! determination forms, their mixed-model analogues on kernels, maximin
//! distance designs, marker-kernel alignment, AIC variable selection,
//! group-deletion influence and a gain/inbreeding trade-off. User-defined
//! criteria plug in through [`criteria::Registry`].
//!
//! Runs are reproducible: all randomness flows from one seeded coordinator
//! stream, and worker counts never change results.

pub mod criteria;
pub mod data;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod solution;

pub use criteria::{
    alignment_target_kernel, catalog, vanraden_amat, Builtin, CriterionContext, CriterionInfo,
    CriterionSpec, InputKind, Registry,
};
pub use data::{
    load_labeled_matrix, read_labeled_matrix, subset_rows, validate_partition,
    write_labeled_matrix, LabeledMatrix, PartitionPlan, RankedSolution, RunConfig, RunResult,
};
pub use engine::{
    crossover, derive_seed, evaluate_population, init_population, lookahead_solution, mutate,
    run_islands, run_lagat, run_with_context, select_elites, tabu_filter, GenerationView,
    Population, Provenance, RngStream, TabuMemory,
};
pub use error::{Error, Result};
pub use linalg::{
    eigen_extremes, log_det_psd, orthogonal_projection_complement, pairwise_distances,
    ridge_inverse, Matrix, SymmetricMatrix,
};
pub use oracle::{
    enumerate_best, random_baseline, BaselineStats, EnumerateOptions, EnumerationResult,
};
pub use solution::SubsetSolution;
