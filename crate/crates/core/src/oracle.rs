//! Ground truth for small instances: exhaustive enumeration over all
//! subsets of the candidate set, and random-subset baselines.
//!
//! Enumeration walks combinations in lexicographic order over the
//! candidate indices. Work is split into rank ranges that are unranked
//! independently, so the parallel result is bit-identical to the serial
//! one for any worker count.

use rayon::prelude::*;

use crate::criteria::{CriterionContext, CriterionSpec, Registry};
use crate::data::{LabeledMatrix, PartitionPlan};
use crate::engine::RngStream;
use crate::error::{Error, Result};
use crate::solution::SubsetSolution;

#[derive(Debug, Clone)]
pub struct EnumerateOptions {
    /// Solutions within this absolute distance of the minimum are reported
    /// as tied argmins.
    pub tie_tolerance: f64,
    /// Refuse to enumerate more subsets than this.
    pub cap: u64,
    pub workers: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            tie_tolerance: 1e-9,
            cap: 10_000_000,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub min_value: f64,
    /// All solutions within the tie tolerance of the minimum, in
    /// lexicographic enumeration order.
    pub argmin_solutions: Vec<SubsetSolution>,
    pub subsets_evaluated: u64,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Combination of `k` indices with the given lexicographic rank.
fn unrank(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut combo = Vec::with_capacity(k);
    let mut x = 0usize;
    for pos in 0..k {
        let remaining = k - pos - 1;
        loop {
            let with_x = binomial(n - x - 1, remaining);
            if rank < with_x {
                break;
            }
            rank -= with_x;
            x += 1;
        }
        combo.push(x);
        x += 1;
    }
    combo
}

/// Advances to the next combination in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct ChunkBest {
    min: f64,
    ties: Vec<(f64, Vec<usize>)>,
}

fn scan_chunk(
    ctx: &CriterionContext,
    n: usize,
    k: usize,
    start: u128,
    len: u128,
    tol: f64,
) -> Result<ChunkBest> {
    let mut combo = unrank(start, n, k);
    let mut best = ChunkBest {
        min: f64::INFINITY,
        ties: Vec::new(),
    };
    let mut i: u128 = 0;
    loop {
        let value = ctx.evaluate_candidate_indices(&combo)?;
        if value < best.min {
            best.min = value;
            best.ties.retain(|(v, _)| *v <= value + tol);
        }
        if value <= best.min + tol {
            best.ties.push((value, combo.clone()));
        }
        i += 1;
        if i >= len || !next_combination(&mut combo, n) {
            break;
        }
    }
    Ok(best)
}

/// Evaluates the criterion on every size-`ntoselect` subset of the
/// candidates and reports the minimum with all tied argmins.
pub fn enumerate_best(
    p: &LabeledMatrix,
    plan: &PartitionPlan,
    spec: &CriterionSpec,
    registry: &Registry,
    opts: &EnumerateOptions,
) -> Result<EnumerationResult> {
    let ctx = CriterionContext::new(p, plan, spec, registry)?;
    let n = plan.candidates().len();
    let k = plan.ntoselect();
    let total = binomial(n, k);
    if total > opts.cap as u128 {
        return Err(Error::TooLarge {
            subsets: total,
            cap: opts.cap,
        });
    }

    let workers = opts.workers.max(1);
    let nchunks = if workers == 1 {
        1u128
    } else {
        (workers as u128 * 8).min(total.max(1))
    };
    let chunk_len = total.div_ceil(nchunks);
    let mut chunks = Vec::new();
    let mut start = 0u128;
    while start < total {
        let len = chunk_len.min(total - start);
        chunks.push((start, len));
        start += len;
    }

    let tol = opts.tie_tolerance;
    let results: Vec<Result<ChunkBest>> = if workers == 1 {
        chunks
            .iter()
            .map(|&(s, l)| scan_chunk(&ctx, n, k, s, l, tol))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
        pool.install(|| {
            chunks
                .par_iter()
                .map(|&(s, l)| scan_chunk(&ctx, n, k, s, l, tol))
                .collect()
        })
    };

    let mut min = f64::INFINITY;
    let mut collected: Vec<ChunkBest> = Vec::with_capacity(results.len());
    for r in results {
        let r = r?;
        if r.min < min {
            min = r.min;
        }
        collected.push(r);
    }

    let candidates = plan.candidates();
    let mut argmin_solutions = Vec::new();
    for chunk in collected {
        for (v, combo) in chunk.ties {
            if v <= min + tol {
                let ids: Vec<String> = combo.iter().map(|&c| candidates[c].clone()).collect();
                argmin_solutions.push(SubsetSolution::new(ids)?);
            }
        }
    }

    Ok(EnumerationResult {
        min_value: min,
        argmin_solutions,
        subsets_evaluated: total as u64,
    })
}

#[derive(Debug, Clone)]
pub struct BaselineStats {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub values: Vec<f64>,
}

/// Criterion summary over uniformly drawn random subsets.
pub fn random_baseline(
    p: &LabeledMatrix,
    plan: &PartitionPlan,
    spec: &CriterionSpec,
    registry: &Registry,
    reps: usize,
    rng: &mut RngStream,
) -> Result<BaselineStats> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    let ctx = CriterionContext::new(p, plan, spec, registry)?;
    let n = plan.candidates().len();
    let k = plan.ntoselect();
    let mut values = Vec::with_capacity(reps);
    for _ in 0..reps {
        let mut idx: Vec<usize> = rand::seq::index::sample(rng.rng_mut(), n, k).into_vec();
        idx.sort_unstable();
        values.push(ctx.evaluate_candidate_indices(&idx)?);
    }
    let mean = values.iter().sum::<f64>() / reps as f64;
    let sd = if reps == 1 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (reps as f64 - 1.0)).sqrt()
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(BaselineStats {
        mean,
        sd,
        min,
        values,
    })
}
