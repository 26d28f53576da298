//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines as they complete.

mod common;

use common::*;
use lagat_core::{
    engine, enumerate_best, lookahead_solution, run_lagat, validate_partition, CriterionContext,
    CriterionSpec, EnumerateOptions, LabeledMatrix, Matrix, Population, Registry, RunConfig,
    SubsetSolution,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

fn report(id: usize, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {id} {name}: {status} ({detail})");
    assert!(pass, "criterion {id} {name} failed: {detail}");
}

fn grid_spec() -> CriterionSpec {
    CriterionSpec::new("DOPT").with_lambda(1e-9)
}

fn box1_config(seed: u64) -> RunConfig {
    RunConfig {
        npop: 200,
        nelite: 5,
        mutprob: 0.5,
        mutintensity: 1.0,
        niterations: 200,
        minitbefstop: 50,
        tabu: false,
        seed,
        ..RunConfig::default()
    }
}

/// 1. Complete enumeration of the 13-point D-optimal design over the grid
///    reproduces the known minimum with the known solution among the ties.
#[test]
fn acceptance_1_grid_enumeration() {
    let p = grid_design();
    let plan = validate_partition(&p, None, None, 13).unwrap();
    let opts = EnumerateOptions {
        workers: 4,
        ..EnumerateOptions::default()
    };
    let result = enumerate_best(&p, &plan, &grid_spec(), &Registry::new(), &opts).unwrap();

    let count_ok = result.subsets_evaluated == 5_200_300;
    let value_ok = (result.min_value - GRID_BEST_VALUE).abs() < 1e-9;
    let best = SubsetSolution::new(grid_best_solution()).unwrap();
    let tie_ok = result.argmin_solutions.contains(&best);
    report(
        1,
        "grid D-optimal enumeration",
        count_ok && value_ok && tie_ok,
        &format!(
            "min {} over {} subsets, {} tied argmins, known solution present: {}",
            result.min_value,
            result.subsets_evaluated,
            result.argmin_solutions.len(),
            tie_ok
        ),
    );
}

/// 2. The optimizer attains the enumerated minimum in at least 8 of 10
///    seeds, overlapping a known optimum in >= 12 of 13 members whenever
///    it succeeds.
#[test]
fn acceptance_2_engine_reaches_grid_optimum() {
    let p = grid_design();
    let plan = validate_partition(&p, None, None, 13).unwrap();
    let registry = Registry::new();
    let opts = EnumerateOptions {
        workers: 4,
        ..EnumerateOptions::default()
    };
    let truth = enumerate_best(&p, &plan, &grid_spec(), &registry, &opts).unwrap();

    let mut hits = 0;
    let mut overlap_ok = true;
    for seed in 0..10u64 {
        let mut config = box1_config(seed);
        config.workers = 4;
        let run = run_lagat(&p, &plan, &grid_spec(), &config, &registry).unwrap();
        if (run.best().value - truth.min_value).abs() <= 1e-12 {
            hits += 1;
            let best_overlap = truth
                .argmin_solutions
                .iter()
                .map(|opt| {
                    run.best()
                        .solution
                        .members()
                        .iter()
                        .filter(|m| opt.contains(m))
                        .count()
                })
                .max()
                .unwrap();
            if best_overlap < 12 {
                overlap_ok = false;
            }
        }
    }
    report(
        2,
        "engine attains enumerated optimum",
        hits >= 8 && overlap_ok,
        &format!("{hits}/10 seeds exact, overlap >= 12 held: {overlap_ok}"),
    );
}

/// 3. On random 12-candidate instances the optimizer matches exhaustive
///    enumeration for five criteria in at least 90% of pairs, and every
///    miss stays within a 2% relative gap.
#[test]
fn acceptance_3_oracle_equivalence_sweep() {
    let kinds = ["PEVMEAN", "AOPT", "EOPT", "DOPT", "MAXIMIN"];
    let registry = Registry::new();
    let mut matched = 0usize;
    let mut total = 0usize;
    let mut worst_gap = 0.0f64;
    let mut gap_ok = true;

    for instance in 0..25u64 {
        let mut rng = StdRng::seed_from_u64(9_000 + instance);
        let raw = random_m(&mut rng, 12, 3);
        let p = to_labeled(&raw, "r");
        let plan = validate_partition(&p, None, None, 4).unwrap();
        for kind in kinds {
            let spec = CriterionSpec::new(kind).with_lambda(1e-5);
            let truth =
                enumerate_best(&p, &plan, &spec, &registry, &EnumerateOptions::default()).unwrap();
            let config = RunConfig {
                npop: 50,
                niterations: 100,
                minitbefstop: 30,
                seed: 31 * instance + 7,
                ..RunConfig::default()
            };
            let run = run_lagat(&p, &plan, &spec, &config, &registry).unwrap();
            total += 1;
            let diff = run.best().value - truth.min_value;
            if diff.abs() <= 1e-12 {
                matched += 1;
            } else {
                let gap = diff / truth.min_value.abs().max(1e-9);
                worst_gap = worst_gap.max(gap);
                if gap > 0.02 {
                    gap_ok = false;
                }
            }
        }
    }
    let rate = matched as f64 / total as f64;
    report(
        3,
        "oracle equivalence sweep",
        rate >= 0.9 && gap_ok,
        &format!(
            "{matched}/{total} exact ({:.1}%), worst miss gap {:.4}%",
            rate * 100.0,
            worst_gap * 100.0
        ),
    );
}

/// 4. Algebraic identities behind the criterion formulas hold to 1e-8
///    max-abs over 50 random (X, lambda, C) triples.
#[test]
fn acceptance_4_algebraic_identities() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(4..9);
        let p = rng.gen_range(3..7);
        let c_rows = rng.gen_range(2..5);
        let x = random_m(&mut rng, n, p);
        let c = random_m(&mut rng, c_rows, p);
        let lambda = 10f64.powf(rng.gen_range(-3.0..1.0));

        let xt = transpose(&x);
        let xtx = matmul(&xt, &x);
        let xxt = matmul(&x, &xt);
        let rp = gj_inverse(&add_scaled_identity(&xtx, lambda));
        let rd = gj_inverse(&add_scaled_identity(&xxt, lambda));

        // ridge duality: (X'X + lI)^{-1} X' = X'(XX' + lI)^{-1}
        let lhs = matmul(&rp, &xt);
        let rhs = matmul(&xt, &rd);
        for i in 0..p {
            for j in 0..n {
                worst = worst.max((lhs[i][j] - rhs[i][j]).abs());
            }
        }

        // the kernel-partition identity:
        // C (X'X + lI)^{-1} C' = (1/l)[CC' - CX'(XX' + lI)^{-1} XC']
        let ct = transpose(&c);
        let left = matmul(&c, &matmul(&rp, &ct));
        let cxt = matmul(&c, &xt);
        let shrunk = matmul(&cxt, &matmul(&rd, &transpose(&cxt)));
        let cct = matmul(&c, &ct);
        for i in 0..c_rows {
            for j in 0..c_rows {
                let right = (cct[i][j] - shrunk[i][j]) / lambda;
                worst = worst.max((left[i][j] - right).abs());
            }
        }

        // logdet = sum of log eigenvalues, through the library routine
        let sym = lagat_core::SymmetricMatrix::from_matrix(
            &Matrix::from_rows(&xtx).unwrap(),
        )
        .unwrap();
        let ld = lagat_core::log_det_psd(&sym, lambda).unwrap();
        let eigsum: f64 = jacobi_eigenvalues(&xtx)
            .iter()
            .map(|e| (e + lambda).ln())
            .sum();
        worst = worst.max((ld - eigsum).abs());

        // mean eigenvalue = trace / order
        let (_, mean) = lagat_core::eigen_extremes(&sym).unwrap();
        worst = worst.max((mean - trace(&xtx) / p as f64).abs());
    }
    report(
        4,
        "algebraic identity suite",
        worst < 1e-8,
        &format!("worst max-abs deviation {worst:.3e}"),
    );
}

/// 5. Engine invariants: exact monotone trace under elitism, tabu
///    non-revisit, validity over 10^4 fuzzed generations, bitwise
///    determinism across worker counts.
#[test]
fn acceptance_5_engine_invariants() {
    let registry = Registry::new();

    // monotone trace under keepbest
    let mut monotone = true;
    for seed in 0..5u64 {
        let mut rng = StdRng::seed_from_u64(500 + seed);
        let raw = random_m(&mut rng, 30, 4);
        let p = to_labeled(&raw, "r");
        let plan = validate_partition(&p, None, None, 8).unwrap();
        let spec = CriterionSpec::new("DOPT").with_lambda(1e-6);
        let config = RunConfig {
            npop: 24,
            niterations: 50,
            minitbefstop: 50,
            seed,
            ..RunConfig::default()
        };
        let run = run_lagat(&p, &plan, &spec, &config, &registry).unwrap();
        monotone &= run.trace.windows(2).all(|w| w[1] <= w[0]);
    }

    // tabu non-revisit over fuzzed runs (offspring only; elitism and
    // look-ahead insertions bypass the filter)
    let mut tabu_ok = true;
    for seed in 0..5u64 {
        let mut rng = StdRng::seed_from_u64(600 + seed);
        let raw = random_m(&mut rng, 18, 3);
        let p = to_labeled(&raw, "r");
        let plan = validate_partition(&p, None, None, 5).unwrap();
        let spec = CriterionSpec::new("AOPT").with_lambda(1e-4);
        let memsize = 1 + (seed as usize % 3);
        let config = RunConfig {
            npop: 14,
            nelite: 3,
            tabu: true,
            tabumemsize: memsize,
            niterations: 40,
            minitbefstop: 40,
            seed,
            ..RunConfig::default()
        };
        let ctx = CriterionContext::new(&p, &plan, &spec, &registry).unwrap();
        let mut history: Vec<Vec<SubsetSolution>> = Vec::new();
        engine::run_observed_with_context(&ctx, &config, |view| {
            if view.iteration > 1 {
                let start = history.len().saturating_sub(memsize);
                let recent: std::collections::HashSet<&SubsetSolution> =
                    history[start..].iter().flatten().collect();
                for (sol, prov) in view.population.solutions.iter().zip(view.provenance) {
                    if *prov == engine::Provenance::Offspring && recent.contains(sol) {
                        tabu_ok = false;
                    }
                }
            }
            history.push(view.population.solutions.clone());
        })
        .unwrap();
    }

    // validity preservation over 10^4 fuzzed generations
    let mut valid = true;
    let mut generations = 0usize;
    let mut fuzz = StdRng::seed_from_u64(700);
    while generations < 10_000 {
        let n = fuzz.gen_range(8..24);
        let k = fuzz.gen_range(2..6).min(n - 1);
        let raw = random_m(&mut fuzz, n, 2);
        let p = to_labeled(&raw, "r");
        let plan = validate_partition(&p, None, None, k).unwrap();
        let spec = CriterionSpec::new("AOPT").with_lambda(1e-4);
        let config = RunConfig {
            npop: fuzz.gen_range(6..14),
            nelite: fuzz.gen_range(1..4),
            tabu: fuzz.gen_bool(0.5),
            tabumemsize: fuzz.gen_range(0..3),
            mutprob: fuzz.gen_range(0.0..=1.0),
            mutintensity: fuzz.gen_range(0.0..3.0),
            niterations: 20,
            minitbefstop: 20,
            niterreg: fuzz.gen_range(0..6),
            seed: fuzz.gen(),
            ..RunConfig::default()
        };
        let ctx = CriterionContext::new(&p, &plan, &spec, &registry).unwrap();
        let cands: std::collections::HashSet<String> =
            plan.candidates().iter().cloned().collect();
        engine::run_observed_with_context(&ctx, &config, |view| {
            generations += 1;
            for s in &view.population.solutions {
                let unique: std::collections::HashSet<_> = s.members().iter().collect();
                if s.len() != k || unique.len() != k {
                    valid = false;
                }
                if s.members().iter().any(|m| !cands.contains(m)) {
                    valid = false;
                }
            }
        })
        .unwrap();
    }

    // bitwise determinism across worker counts
    let mut deterministic = true;
    {
        let mut rng = StdRng::seed_from_u64(800);
        let raw = random_m(&mut rng, 40, 5);
        let p = to_labeled(&raw, "r");
        let plan = validate_partition(&p, None, None, 10).unwrap();
        let spec = CriterionSpec::new("PEVMEAN").with_lambda(1e-4);
        let mut reference: Option<(Vec<u64>, Vec<(SubsetSolution, u64)>)> = None;
        for workers in [1usize, 2, 8] {
            let config = RunConfig {
                npop: 30,
                niterations: 30,
                minitbefstop: 30,
                workers,
                seed: 4321,
                ..RunConfig::default()
            };
            let run = run_lagat(&p, &plan, &spec, &config, &registry).unwrap();
            let bits: Vec<u64> = run.trace.iter().map(|v| v.to_bits()).collect();
            let ranked: Vec<(SubsetSolution, u64)> = run
                .ranked
                .iter()
                .map(|r| (r.solution.clone(), r.value.to_bits()))
                .collect();
            match &reference {
                None => reference = Some((bits, ranked)),
                Some((b, r)) => deterministic &= *b == bits && *r == ranked,
            }
        }
    }

    report(
        5,
        "engine invariant suite",
        monotone && tabu_ok && valid && deterministic,
        &format!(
            "monotone {monotone}, tabu {tabu_ok}, validity over {generations} generations {valid}, determinism {deterministic}"
        ),
    );
}

/// 6. With look-ahead and tabu enabled the optimizer reaches the plain
///    configuration's final best value in strictly fewer iterations, in
///    median over 20 paired seeds.
#[test]
fn acceptance_6_convergence_speed() {
    let mut rng = StdRng::seed_from_u64(6_000);
    let raw = random_m(&mut rng, 200, 50);
    let p = to_labeled(&raw, "g");
    let plan = validate_partition(&p, None, None, 50).unwrap();
    let spec = CriterionSpec::new("PEVMEAN").with_lambda(1e-5);
    let registry = Registry::new();

    let iterations_to = |trace: &[f64], threshold: f64| -> usize {
        trace
            .iter()
            .position(|&v| v <= threshold)
            .map(|i| i + 1)
            .unwrap_or(trace.len() + 1)
    };

    let mut plain_iters = Vec::new();
    let mut lagat_iters = Vec::new();
    for seed in 0..20u64 {
        // single-elite hill climb makes the two arms differ only in how
        // offspring slots are spent: plain re-evaluates unmutated clones,
        // tabu forces every slot to be a novel mutant
        let base = RunConfig {
            npop: 100,
            nelite: 1,
            mutprob: 0.5,
            niterations: 100,
            minitbefstop: 100,
            workers: 4,
            seed: 100 + seed,
            ..RunConfig::default()
        };
        let plain = RunConfig {
            tabu: false,
            niterreg: 0,
            ..base.clone()
        };
        let lagat = RunConfig {
            tabu: true,
            tabumemsize: 1,
            niterreg: 5,
            ..base
        };
        let plain_run = run_lagat(&p, &plan, &spec, &plain, &registry).unwrap();
        let lagat_run = run_lagat(&p, &plan, &spec, &lagat, &registry).unwrap();
        let threshold = *plain_run.trace.last().unwrap();
        plain_iters.push(iterations_to(&plain_run.trace, threshold));
        lagat_iters.push(iterations_to(&lagat_run.trace, threshold));
    }
    let median = |v: &mut Vec<usize>| -> f64 {
        v.sort_unstable();
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2] as f64
        } else {
            (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
        }
    };
    let med_plain = median(&mut plain_iters);
    let med_lagat = median(&mut lagat_iters);
    report(
        6,
        "look-ahead + tabu convergence speed",
        med_lagat < med_plain,
        &format!("median iterations to plain final value: with {med_lagat}, without {med_plain}"),
    );
}

/// 7. The look-ahead regression recovers the exact optimum of an additive
///    criterion from a random population in at least 95 of 100 trials.
#[test]
fn acceptance_7_lookahead_recovery() {
    let mut rng = StdRng::seed_from_u64(7_000);
    let m = 25;
    let ntoselect = 8;
    let mut successes = 0;
    for _ in 0..100 {
        let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
        let raw: M = (0..m).map(|i| vec![costs[i]]).collect();
        let p = to_labeled(&raw, "c");
        // two-digit ids keep candidate order aligned with index order
        let ids: Vec<String> = (0..m).map(|i| format!("c{:02}", i + 1)).collect();
        let p = LabeledMatrix::new(ids.clone(), None, p.values().clone()).unwrap();
        let plan = validate_partition(&p, None, None, ntoselect).unwrap();

        let solutions: Vec<SubsetSolution> = (0..200)
            .map(|_| {
                let picks = rand::seq::index::sample(&mut rng, m, ntoselect);
                SubsetSolution::new(picks.iter().map(|i| ids[i].clone()).collect()).unwrap()
            })
            .collect();
        let fitness: Vec<f64> = solutions
            .iter()
            .map(|s| {
                s.members()
                    .iter()
                    .map(|id| costs[id[1..].parse::<usize>().unwrap() - 1])
                    .sum()
            })
            .collect();
        let pop = Population {
            solutions,
            generation: 0,
        };
        let predicted = lookahead_solution(&pop, &fitness, &plan);

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| costs[a].partial_cmp(&costs[b]).unwrap());
        let expect =
            SubsetSolution::new(order[..ntoselect].iter().map(|&i| ids[i].clone()).collect())
                .unwrap();
        if predicted == expect {
            successes += 1;
        }
    }
    report(
        7,
        "look-ahead recovery of additive effects",
        successes >= 95,
        &format!("{successes}/100 exact recoveries"),
    );
}

/// 8. Influence-based selection on planted-outlier data: the excluded rows
///    intersect the planted set and the criterion-vs-size curve jumps at
///    the planted boundary.
#[test]
fn acceptance_8_planted_outlier_recovery() {
    let registry = Registry::new();
    let n = 150;
    let planted: Vec<usize> = vec![4, 29, 54, 79, 104, 129];
    let mut exclusion_hits = 0;
    let mut boundary_hits = 0;

    for seed in 0..10u64 {
        // regression with a sizeable intercept: scaling a whole row by
        // 1.5x preserves the slope part but shifts the intercept, so the
        // planted rows become genuine outliers
        let mut rng = StdRng::seed_from_u64(8_000 + seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let noise = Normal::new(0.0, 0.4).unwrap();
        let beta = [2.0, -1.5, 1.0, 0.5];
        let mut raw: M = Vec::with_capacity(n);
        for _ in 0..n {
            let x: Vec<f64> = (0..4).map(|_| normal.sample(&mut rng)).collect();
            let y = 8.0
                + x.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()
                + noise.sample(&mut rng);
            let mut row = vec![y];
            row.extend(x);
            raw.push(row);
        }
        for &i in &planted {
            for v in raw[i].iter_mut() {
                *v *= 1.5;
            }
        }
        let ids: Vec<String> = (1..=n).map(|i| format!("r{i:03}")).collect();
        let p = LabeledMatrix::new(ids.clone(), None, Matrix::from_rows(&raw).unwrap()).unwrap();
        let spec = CriterionSpec::new("DFBETAS").with_lambda(1e-6);

        // exclusion check at the planted boundary size
        let plan = validate_partition(&p, None, None, 144).unwrap();
        let config = RunConfig {
            npop: 200,
            niterations: 150,
            minitbefstop: 50,
            niterreg: 10,
            seed: 77 + seed,
            ..RunConfig::default()
        };
        let run = run_lagat(&p, &plan, &spec, &config, &registry).unwrap();
        let selected: std::collections::HashSet<&String> =
            run.best().solution.members().iter().collect();
        let excluded: Vec<usize> = (0..n).filter(|i| !selected.contains(&ids[*i])).collect();
        let recovered = excluded.iter().filter(|i| planted.contains(i)).count();
        if recovered >= 2 {
            exclusion_hits += 1;
        }

        // curve up to the boundary: the 144 -> 145 step, which forces the
        // first planted row in, must be the largest. Two runs per size
        // damp optimizer noise.
        let sizes: Vec<usize> = (140..=145).collect();
        let values: Vec<f64> = sizes
            .iter()
            .map(|&s| {
                let plan = validate_partition(&p, None, None, s).unwrap();
                (0..2)
                    .map(|rep| {
                        let config = RunConfig {
                            npop: 200,
                            niterations: 200,
                            minitbefstop: 80,
                            niterreg: 10,
                            seed: seed * 1000 + s as u64 + rep * 7919,
                            ..RunConfig::default()
                        };
                        run_lagat(&p, &plan, &spec, &config, &registry)
                            .unwrap()
                            .best()
                            .value
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let max_at = steps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        // steps[i] spans sizes[i] -> sizes[i+1]; the boundary step is 144 -> 145
        if sizes[max_at] == 144 {
            boundary_hits += 1;
        }
    }
    report(
        8,
        "planted outlier recovery",
        exclusion_hits >= 7 && boundary_hits >= 7,
        &format!(
            "exclusion >= 2 planted in {exclusion_hits}/10 seeds, boundary jump in {boundary_hits}/10 seeds"
        ),
    );
}

/// 9. Dataset-gated checks against the published body-measurement results;
///    skipped (reported as PASS with a skip note) when the external CSV is
///    not present.
#[test]
fn acceptance_9_bodyfat_dataset_gated() {
    let path = std::env::var("LAGAT_BODYFAT_CSV")
        .unwrap_or_else(|_| "../../data/bodyfat.csv".to_string());
    let loaded = lagat_core::load_labeled_matrix(&path, true);
    let data = match loaded {
        Ok(d) => d,
        Err(_) => {
            println!("ACCEPTANCE 9 body-fat dataset checks: PASS (skipped: dataset not present)");
            return;
        }
    };

    // expected layout: rows are observations, first value column is the
    // response, remaining 13 columns the predictors
    let cols = data.col_ids().expect("header required").to_vec();
    let response_col = 0usize;
    let y: Vec<f64> = (0..data.nrows())
        .map(|i| data.values().get(i, response_col))
        .collect();
    let predictors: Vec<String> = cols[1..].to_vec();
    let nobs = data.nrows();

    // transpose predictors into selectable rows
    let mut rows: M = Vec::with_capacity(predictors.len());
    for j in 1..cols.len() {
        rows.push((0..nobs).map(|i| data.values().get(i, j)).collect());
    }
    let p = LabeledMatrix::new(predictors.clone(), None, Matrix::from_rows(&rows).unwrap())
        .unwrap();
    let registry = Registry::new();

    // AIC optimum over all 7-variable models
    let plan = validate_partition(&p, None, None, 7).unwrap();
    let spec = CriterionSpec::new("AICOLS").with_response(y.clone());
    let aic =
        enumerate_best(&p, &plan, &spec, &registry, &EnumerateOptions::default()).unwrap();
    let aic_ok = (aic.min_value - 1460.21).abs() <= 0.02;
    let mut expect: Vec<String> = ["abdomen", "forearm", "hip", "age", "wrist", "thigh", "neck"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    expect.sort();
    let set_ok = aic.argmin_solutions[0].members() == expect.as_slice();

    // fit + logdet criterion on standardized data: columns scaled to unit
    // root mean square without centering, response scaled by its standard
    // deviation
    let mut std_rows = rows.clone();
    for row in std_rows.iter_mut() {
        let rms = (row.iter().map(|v| v * v).sum::<f64>() / (nobs as f64 - 1.0)).sqrt();
        for v in row.iter_mut() {
            *v /= rms;
        }
    }
    let mean_y = y.iter().sum::<f64>() / nobs as f64;
    let sd_y =
        (y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum::<f64>() / (nobs as f64 - 1.0)).sqrt();
    let y_std: Vec<f64> = y.iter().map(|v| v / sd_y).collect();
    let p_std =
        LabeledMatrix::new(predictors, None, Matrix::from_rows(&std_rows).unwrap()).unwrap();
    let plan5 = validate_partition(&p_std, None, None, 5).unwrap();
    let spec5 = CriterionSpec::new("FITLOGDET")
        .with_response(y_std)
        .with_weight(0.1);
    let fit =
        enumerate_best(&p_std, &plan5, &spec5, &registry, &EnumerateOptions::default()).unwrap();
    let mut expect5: Vec<String> = ["forearm", "ankle", "height", "chest", "wrist"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    expect5.sort();
    let fit_ok = fit.argmin_solutions[0].members() == expect5.as_slice();

    report(
        9,
        "body-fat dataset checks",
        aic_ok && set_ok && fit_ok,
        &format!(
            "AIC {} (target 1460.21), AIC set ok {set_ok}, fit-logdet set ok {fit_ok}",
            aic.min_value
        ),
    );
}
