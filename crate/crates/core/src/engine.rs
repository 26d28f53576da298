//! The population-based subset optimizer: initialization, parallel
//! evaluation, elite selection, ridge look-ahead, frequency-distribution
//! crossover, Poisson mutation, tabu memory, convergence control, and the
//! island-model orchestrator.
//!
//! Determinism contract: every stochastic choice is drawn on the single
//! coordinator stream; worker threads only evaluate, so a fixed seed and
//! configuration produce identical results for any worker count.

use std::collections::{HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::criteria::{CriterionContext, CriterionSpec, Registry};
use crate::data::{LabeledMatrix, PartitionPlan, RankedSolution, RunConfig, RunResult};
use crate::error::{Error, Result};
use crate::linalg::ridge_cholesky;
use crate::solution::SubsetSolution;

/// Internal shrinkage applied to the normalized membership Gram matrix in
/// the look-ahead fit, independent of the criterion lambda.
const LOOKAHEAD_SHRINKAGE: f64 = 1e-6;

/// After this many consecutive tabu rejections the next offspring is
/// force-accepted with one extra swap, so small search spaces cannot
/// livelock.
const TABU_REGEN_CAP: usize = 50;

/// Seeded random stream for one run.
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub(crate) fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// One generation of solutions. Duplicates are permitted.
#[derive(Debug, Clone)]
pub struct Population {
    pub solutions: Vec<SubsetSolution>,
    pub generation: usize,
}

/// Queue of the most recent generations, tested by exact set equality.
pub struct TabuMemory {
    generations: VecDeque<HashSet<SubsetSolution>>,
    capacity: usize,
}

impl TabuMemory {
    pub fn new(capacity: usize) -> Self {
        Self {
            generations: VecDeque::new(),
            capacity,
        }
    }

    pub fn remember_generation(&mut self, solutions: &[SubsetSolution]) {
        if self.capacity == 0 {
            return;
        }
        self.generations
            .push_back(solutions.iter().cloned().collect());
        while self.generations.len() > self.capacity {
            self.generations.pop_front();
        }
    }

    pub fn contains(&self, solution: &SubsetSolution) -> bool {
        self.generations.iter().any(|g| g.contains(solution))
    }
}

/// Accept an offspring unless it is remembered in tabu memory.
pub fn tabu_filter(child: &SubsetSolution, memory: &TabuMemory) -> bool {
    !memory.contains(child)
}

/// Where a population member came from. Elitism copies and the look-ahead
/// solution bypass the tabu filter; forced offspring passed it through the
/// regeneration cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Initial,
    LookAhead,
    Elite,
    Offspring,
    Forced,
}

/// Snapshot handed to run observers after each evaluation.
pub struct GenerationView<'a> {
    /// 1-based iteration index.
    pub iteration: usize,
    pub population: &'a Population,
    pub provenance: &'a [Provenance],
    pub fitness: &'a [f64],
    pub best_value: f64,
}

/// Builds the initial population: validated user-provided solutions first,
/// the remainder drawn uniformly without replacement from the candidates.
pub fn init_population(
    plan: &PartitionPlan,
    config: &RunConfig,
    rng: &mut RngStream,
) -> Result<Population> {
    let candidates = plan.candidates();
    let candidate_set: HashSet<&str> = candidates.iter().map(String::as_str).collect();
    let mut solutions = Vec::with_capacity(config.npop);

    if let Some(init) = &config.init_pop {
        for s in init.iter().take(config.npop) {
            if s.len() != plan.ntoselect() {
                return Err(Error::InvalidInitPop(format!(
                    "solution has {} members, expected {}",
                    s.len(),
                    plan.ntoselect()
                )));
            }
            if let Some(bad) = s.members().iter().find(|m| !candidate_set.contains(m.as_str())) {
                return Err(Error::InvalidInitPop(format!(
                    "member {bad} is not a candidate"
                )));
            }
            solutions.push(s.clone());
        }
    }

    while solutions.len() < config.npop {
        let picks = rand::seq::index::sample(rng.rng_mut(), candidates.len(), plan.ntoselect());
        let ids: Vec<String> = picks.iter().map(|i| candidates[i].clone()).collect();
        solutions.push(SubsetSolution::new(ids)?);
    }

    Ok(Population {
        solutions,
        generation: 0,
    })
}

/// Evaluates every solution, in order, optionally across a worker pool.
/// Results are identical for any worker count.
pub fn evaluate_population(
    pop: &Population,
    ctx: &CriterionContext,
    workers: usize,
) -> Result<Vec<f64>> {
    let pool = build_pool(workers)?;
    evaluate_solutions(pool.as_ref(), &pop.solutions, ctx)
}

fn build_pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))
}

fn evaluate_solutions(
    pool: Option<&rayon::ThreadPool>,
    solutions: &[SubsetSolution],
    ctx: &CriterionContext,
) -> Result<Vec<f64>> {
    let raw: Vec<Result<f64>> = match pool {
        None => solutions.iter().map(|s| ctx.evaluate(s)).collect(),
        Some(p) => p.install(|| solutions.par_iter().map(|s| ctx.evaluate(s)).collect()),
    };
    raw.into_iter()
        .zip(solutions)
        .map(|(r, s)| {
            r.map_err(|e| Error::Evaluation {
                solution: s.to_string(),
                source: Box::new(e),
            })
        })
        .collect()
}

/// The `nelite` solutions with smallest fitness; ties broken by the
/// canonical order of the members, so selection is deterministic.
pub fn select_elites(pop: &Population, fitness: &[f64], nelite: usize) -> Vec<SubsetSolution> {
    let mut order: Vec<usize> = (0..pop.solutions.len()).collect();
    order.sort_by(|&a, &b| {
        fitness[a]
            .partial_cmp(&fitness[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| pop.solutions[a].cmp(&pop.solutions[b]))
    });
    order
        .into_iter()
        .take(nelite)
        .map(|i| pop.solutions[i].clone())
        .collect()
}

/// Ridge regression of centered fitness on the 0/1 membership coding of
/// the population; returns the subset of candidates with the smallest
/// estimated effects, ties broken by candidate order.
///
/// Whichever of the primal (candidates x candidates) or dual
/// (population x population) normal system is smaller gets factorized; the
/// two are algebraically identical.
pub fn lookahead_solution(
    pop: &Population,
    fitness: &[f64],
    plan: &PartitionPlan,
) -> SubsetSolution {
    let candidates = plan.candidates();
    let m = candidates.len();
    let n = pop.solutions.len();

    let mut membership = DMatrix::zeros(n, m);
    let col_of: std::collections::HashMap<&str, usize> = candidates
        .iter()
        .enumerate()
        .map(|(j, id)| (id.as_str(), j))
        .collect();
    for (i, sol) in pop.solutions.iter().enumerate() {
        for id in sol.members() {
            membership[(i, col_of[id.as_str()])] = 1.0;
        }
    }

    let mean = fitness.iter().sum::<f64>() / n as f64;
    let centered = DVector::from_fn(n, |i, _| fitness[i] - mean);
    let shift = n as f64 * LOOKAHEAD_SHRINKAGE;

    let effects: DVector<f64> = if m <= n {
        let gram = membership.tr_mul(&membership);
        let rhs = membership.tr_mul(&centered);
        let chol = ridge_cholesky(&gram, shift).expect("shifted Gram is positive definite");
        chol.solve(&rhs)
    } else {
        let gram = &membership * membership.transpose();
        let chol = ridge_cholesky(&gram, shift).expect("shifted Gram is positive definite");
        let dual = chol.solve(&centered);
        membership.tr_mul(&dual)
    };

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        effects[a]
            .partial_cmp(&effects[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let ids: Vec<String> = order
        .into_iter()
        .take(plan.ntoselect())
        .map(|i| candidates[i].clone())
        .collect();
    SubsetSolution::new(ids).expect("candidates are distinct")
}

/// Child drawn without replacement from the union of the parents, with
/// weights from the summed membership counts: ids in both parents carry
/// weight 2, exclusive ids weight 1.
pub fn crossover(
    parent_a: &SubsetSolution,
    parent_b: &SubsetSolution,
    rng: &mut RngStream,
) -> SubsetSolution {
    let a = parent_a.members();
    let b = parent_b.members();
    let mut ids: Vec<&str> = Vec::with_capacity(a.len() + b.len());
    let mut weights: Vec<f64> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if i < a.len() && (j >= b.len() || a[i] < b[j]) {
            ids.push(&a[i]);
            weights.push(1.0);
            i += 1;
        } else if j < b.len() && (i >= a.len() || b[j] < a[i]) {
            ids.push(&b[j]);
            weights.push(1.0);
            j += 1;
        } else {
            ids.push(&a[i]);
            weights.push(2.0);
            i += 1;
            j += 1;
        }
    }

    let k = parent_a.len();
    let mut total: f64 = weights.iter().sum();
    let mut picked = Vec::with_capacity(k);
    for _ in 0..k {
        let draw = rng.rng_mut().gen_range(0.0..total);
        let mut acc = 0.0;
        let mut chosen = ids.len() - 1;
        for (idx, w) in weights.iter().enumerate() {
            acc += w;
            if draw < acc {
                chosen = idx;
                break;
            }
        }
        picked.push(ids.remove(chosen).to_string());
        total -= weights.remove(chosen);
    }
    SubsetSolution::new(picked).expect("sampled without replacement")
}

/// With probability `mutprob`, swaps a Poisson-drawn number of members
/// (clamped to [1, ntoselect]) for uniformly chosen non-members. The
/// non-member pool is maintained across swaps, so no duplicates can arise.
pub fn mutate(
    child: SubsetSolution,
    plan: &PartitionPlan,
    config: &RunConfig,
    rng: &mut RngStream,
) -> SubsetSolution {
    if rng.rng_mut().gen::<f64>() >= config.mutprob {
        return child;
    }
    let k = draw_swap_count(config.mutintensity, plan.ntoselect(), rng);
    apply_swaps(child, plan, k, rng)
}

fn draw_swap_count(intensity: f64, ntoselect: usize, rng: &mut RngStream) -> usize {
    let raw = if intensity > 0.0 {
        let pois = rand_distr::Poisson::new(intensity).expect("positive mean");
        pois.sample(rng.rng_mut()) as usize
    } else {
        0
    };
    raw.clamp(1, ntoselect)
}

fn apply_swaps(
    child: SubsetSolution,
    plan: &PartitionPlan,
    swaps: usize,
    rng: &mut RngStream,
) -> SubsetSolution {
    let mut members: Vec<String> = child.members().to_vec();
    // candidates \ child, preserved sorted by the two-pointer walk
    let mut outside: Vec<String> = {
        let cands = plan.candidates();
        let mut out = Vec::with_capacity(cands.len() - members.len());
        let mut mi = 0;
        for id in cands {
            if mi < members.len() && members[mi] == *id {
                mi += 1;
            } else {
                out.push(id.clone());
            }
        }
        out
    };
    if outside.is_empty() {
        return child;
    }
    for _ in 0..swaps {
        let i = rng.rng_mut().gen_range(0..members.len());
        let j = rng.rng_mut().gen_range(0..outside.len());
        std::mem::swap(&mut members[i], &mut outside[j]);
    }
    SubsetSolution::new(members).expect("swap preserves distinctness")
}

/// Runs the optimizer over a validated context.
pub fn run_with_context(ctx: &CriterionContext, config: &RunConfig) -> Result<RunResult> {
    run_observed_with_context(ctx, config, |_| {})
}

/// Same as [`run_with_context`] with an observer invoked after each
/// generation is evaluated.
pub fn run_observed_with_context(
    ctx: &CriterionContext,
    config: &RunConfig,
    mut observer: impl FnMut(GenerationView<'_>),
) -> Result<RunResult> {
    config.validate()?;
    let plan = ctx.plan();
    let mut rng = RngStream::new(config.seed);
    let pool = build_pool(config.workers)?;

    let mut pop = init_population(plan, config, &mut rng)?;
    let mut provenance = vec![Provenance::Initial; pop.solutions.len()];

    let mut trace: Vec<f64> = Vec::new();
    let mut evaluations: u64 = 0;
    let mut best: Option<(f64, SubsetSolution)> = None;
    let mut stall = 0usize;
    let mut tabu = TabuMemory::new(if config.tabu { config.tabumemsize } else { 0 });
    let mut final_rank: Vec<RankedSolution> = Vec::new();

    for iteration in 1..=config.niterations {
        let fitness = evaluate_solutions(pool.as_ref(), &pop.solutions, ctx)?;
        evaluations += fitness.len() as u64;

        let mut gen_best = 0usize;
        for i in 1..fitness.len() {
            if fitness[i] < fitness[gen_best]
                || (fitness[i] == fitness[gen_best]
                    && pop.solutions[i] < pop.solutions[gen_best])
            {
                gen_best = i;
            }
        }
        let gen_best_value = fitness[gen_best];
        trace.push(gen_best_value);

        match &mut best {
            None => {
                best = Some((gen_best_value, pop.solutions[gen_best].clone()));
                stall = 0;
            }
            Some((value, solution)) => {
                if *value - gen_best_value > config.tolconv {
                    *value = gen_best_value;
                    *solution = pop.solutions[gen_best].clone();
                    stall = 0;
                } else {
                    if gen_best_value < *value {
                        *value = gen_best_value;
                        *solution = pop.solutions[gen_best].clone();
                    }
                    stall += 1;
                }
            }
        }

        observer(GenerationView {
            iteration,
            population: &pop,
            provenance: &provenance,
            fitness: &fitness,
            best_value: best.as_ref().map(|(v, _)| *v).unwrap_or(gen_best_value),
        });

        let stop = stall >= config.minitbefstop || iteration == config.niterations;
        if stop {
            let mut order: Vec<usize> = (0..pop.solutions.len()).collect();
            order.sort_by(|&a, &b| {
                fitness[a]
                    .partial_cmp(&fitness[b])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| pop.solutions[a].cmp(&pop.solutions[b]))
            });
            final_rank = order
                .into_iter()
                .take(config.nelite)
                .map(|i| RankedSolution {
                    solution: pop.solutions[i].clone(),
                    value: fitness[i],
                })
                .collect();
            break;
        }

        let elites = select_elites(&pop, &fitness, config.nelite);

        let mut next: Vec<SubsetSolution> = Vec::with_capacity(config.npop);
        let mut next_prov: Vec<Provenance> = Vec::with_capacity(config.npop);
        if iteration <= config.niterreg {
            next.push(lookahead_solution(&pop, &fitness, plan));
            next_prov.push(Provenance::LookAhead);
        }
        if config.keepbest {
            let (_, solution) = best.as_ref().expect("best set after first evaluation");
            next.push(solution.clone());
            next_prov.push(Provenance::Elite);
        }

        tabu.remember_generation(&pop.solutions);

        let mut rejections = 0usize;
        while next.len() < config.npop {
            let a = &elites[rng.rng_mut().gen_range(0..elites.len())];
            let b = &elites[rng.rng_mut().gen_range(0..elites.len())];
            let child = mutate(crossover(a, b, &mut rng), plan, config, &mut rng);
            if tabu_filter(&child, &tabu) {
                next.push(child);
                next_prov.push(Provenance::Offspring);
                rejections = 0;
            } else {
                rejections += 1;
                if rejections >= TABU_REGEN_CAP {
                    let forced = apply_swaps(child, plan, 1, &mut rng);
                    next.push(forced);
                    next_prov.push(Provenance::Forced);
                    rejections = 0;
                }
            }
        }

        pop = Population {
            solutions: next,
            generation: iteration,
        };
        provenance = next_prov;
    }

    Ok(RunResult {
        ranked: final_rank,
        trace,
        seed_used: config.seed,
        evaluations,
    })
}

/// Runs the full optimizer: validates the criterion, then executes the
/// population loop until the iteration budget or the convergence window is
/// exhausted.
pub fn run_lagat(
    p: &LabeledMatrix,
    plan: &PartitionPlan,
    spec: &CriterionSpec,
    config: &RunConfig,
    registry: &Registry,
) -> Result<RunResult> {
    let ctx = CriterionContext::new(p, plan, spec, registry)?;
    run_with_context(&ctx, config)
}

/// Stable derivation of per-island seeds from the master seed.
pub fn derive_seed(master: u64, round: usize, island: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut s = master ^ 0xA076_1D64_78BD_642F;
    s = mix(s.wrapping_add((round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    s = mix(s.wrapping_add((island as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)));
    s
}

/// Island model: each round runs independent optimizers from derived
/// seeds and pools their elites as the next round's initial solutions;
/// the last round is a single consolidating run whose result is returned.
pub fn run_islands(
    p: &LabeledMatrix,
    plan: &PartitionPlan,
    spec: &CriterionSpec,
    base_config: &RunConfig,
    islands: usize,
    rounds: usize,
    registry: &Registry,
) -> Result<RunResult> {
    if islands == 0 || rounds == 0 {
        return Err(Error::Config("islands and rounds must be at least 1".into()));
    }
    let ctx = CriterionContext::new(p, plan, spec, registry)?;

    let mut pool: Option<Vec<SubsetSolution>> = base_config.init_pop.clone();
    for round in 0..rounds - 1 {
        let mut elites = Vec::with_capacity(islands * base_config.nelite);
        for island in 0..islands {
            let mut config = base_config.clone();
            config.seed = derive_seed(base_config.seed, round, island);
            config.init_pop = pool.clone();
            let result = run_with_context(&ctx, &config)?;
            elites.extend(result.ranked.into_iter().map(|r| r.solution));
        }
        pool = Some(elites);
    }

    let mut config = base_config.clone();
    config.seed = derive_seed(base_config.seed, rounds - 1, 0);
    config.init_pop = pool;
    run_with_context(&ctx, &config)
}
