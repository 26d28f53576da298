//! Command implementations.

use std::io::Write;
use std::time::Instant;

use lagat_core::{
    alignment_target_kernel, catalog, enumerate_best, load_labeled_matrix, run_lagat,
    validate_partition, CriterionSpec, EnumerateOptions, Error, InputKind, LabeledMatrix, Matrix,
    Registry, RunConfig, RunResult, SymmetricMatrix,
};

use crate::args::{
    BenchArgs, CatalogFormat, ConfigArgs, CriteriaArgs, CriterionArgs, DataArgs, EnumerateArgs,
    OutputFormat, SelectArgs,
};

/// Print that tolerates a closed downstream pipe (`lagat criteria | head`).
fn print_line(line: &str) {
    let mut out = std::io::stdout().lock();
    if out
        .write_all(line.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .is_err()
    {
        std::process::exit(0);
    }
}

/// Loaded problem: the (possibly transposed) data matrix, an optional
/// split-off response, and the partition plan.
struct Problem {
    p: LabeledMatrix,
    response: Option<Vec<f64>>,
    plan: lagat_core::PartitionPlan,
}

fn read_id_file(path: &str) -> Result<Vec<String>, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

fn load_problem(data: &DataArgs, criterion: &CriterionArgs) -> Result<Problem, Error> {
    let loaded = load_labeled_matrix(&data.data, data.col_header)?;

    let (p, response) = match &criterion.response_column {
        None => (loaded, None),
        Some(name) => {
            let cols = loaded.col_ids().ok_or_else(|| {
                Error::Config("--response-column requires --col-header".to_string())
            })?;
            let idx = cols
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::UnknownId(name.clone()))?;
            let nrows = loaded.nrows();
            let y: Vec<f64> = (0..nrows).map(|i| loaded.values().get(i, idx)).collect();
            // drop the response column, transpose so variables become rows
            let keep: Vec<usize> = (0..loaded.ncols()).filter(|&j| j != idx).collect();
            let mut data_rows = Vec::with_capacity(keep.len());
            let mut ids = Vec::with_capacity(keep.len());
            for &j in &keep {
                ids.push(cols[j].clone());
                data_rows.push((0..nrows).map(|i| loaded.values().get(i, j)).collect());
            }
            let values = Matrix::from_rows(&data_rows)?;
            let col_ids = Some(loaded.row_ids().to_vec());
            (LabeledMatrix::new(ids, col_ids, values)?, Some(y))
        }
    };

    let candidates = match &data.candidates {
        Some(path) => Some(read_id_file(path)?),
        None => None,
    };
    let test = match &data.test {
        Some(path) => Some(read_id_file(path)?),
        None => None,
    };
    let plan = validate_partition(&p, candidates.as_deref(), test.as_deref(), data.ntoselect)?;
    Ok(Problem { p, response, plan })
}

fn load_aux_matrix(path: &str) -> Result<Matrix, Error> {
    Ok(load_labeled_matrix(path, false)?.values().clone())
}

fn build_spec(
    args: &CriterionArgs,
    problem: &Problem,
    run_lambda: f64,
) -> Result<CriterionSpec, Error> {
    let mut spec = CriterionSpec::new(&args.criterion).with_lambda(args.lambda.unwrap_or(run_lambda));
    if let Some(w) = args.weight {
        spec = spec.with_weight(w);
    }
    if let Some(path) = &args.contrast_path {
        spec = spec.with_contrast(load_aux_matrix(path)?);
    }
    if let Some(path) = &args.kinv_path {
        spec = spec.with_kernel_inverse(load_labeled_matrix(path, false)?);
    }
    if let Some(path) = &args.fixed_design_path {
        spec = spec.with_fixed_design(load_aux_matrix(path)?);
    }
    if let Some(y) = &problem.response {
        spec = spec.with_response(y.clone());
    }
    if args.criterion == "KERNELALIGN" {
        spec = match &args.target_kernel_path {
            Some(path) => {
                let m = load_aux_matrix(path)?;
                spec.with_target_kernel(SymmetricMatrix::from_matrix(&m)?)
            }
            None => spec.with_target_kernel(alignment_target_kernel(&problem.p)?),
        };
    } else if let Some(path) = &args.target_kernel_path {
        let m = load_aux_matrix(path)?;
        spec = spec.with_target_kernel(SymmetricMatrix::from_matrix(&m)?);
    }
    if let Some(path) = &args.vg_path {
        spec.multi_trait_vg = Some(load_aux_matrix(path)?);
    }
    if let Some(path) = &args.ve_path {
        spec.multi_trait_ve = Some(load_aux_matrix(path)?);
    }
    Ok(spec)
}

fn build_config(args: &ConfigArgs, lambda_flag: Option<f64>) -> Result<RunConfig, Error> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($f:ident) => {
            if let Some(v) = args.$f {
                config.$f = v;
            }
        };
    }
    set!(npop);
    set!(nelite);
    set!(keepbest);
    set!(tabu);
    set!(tabumemsize);
    set!(mutprob);
    set!(mutintensity);
    set!(niterations);
    set!(minitbefstop);
    set!(niterreg);
    set!(tolconv);
    set!(workers);
    set!(seed);
    if let Some(l) = lambda_flag {
        config.lambda = l;
    }
    config.validate()?;
    Ok(config)
}

fn write_output(path: Option<&str>, content: &str) -> Result<(), Error> {
    match path {
        Some(path) => std::fs::write(path, content).map_err(|source| Error::Io {
            path: path.to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|source| Error::Io {
                    path: "<stdout>".to_string(),
                    source,
                })
        }
    }
}

fn result_json(result: &RunResult, elapsed_ms: u128) -> serde_json::Value {
    serde_json::json!({
        "solutions": result.ranked.iter().enumerate().map(|(i, r)| {
            serde_json::json!({
                "rank": i + 1,
                "members": r.solution.members(),
                "value": r.value,
            })
        }).collect::<Vec<_>>(),
        "trace": result.trace,
        "seed": result.seed_used,
        "evaluations": result.evaluations,
        "elapsed_ms": elapsed_ms,
    })
}

fn result_csv(result: &RunResult) -> String {
    let mut out = String::from("rank,value,members\n");
    for (i, r) in result.ranked.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            i + 1,
            r.value,
            r.solution.members().join(";")
        ));
    }
    out
}

pub fn cmd_select(args: &SelectArgs) -> Result<(), Error> {
    let problem = load_problem(&args.data, &args.criterion)?;
    let config = build_config(&args.config, args.criterion.lambda)?;
    let spec = build_spec(&args.criterion, &problem, config.lambda)?;
    let registry = Registry::new();

    let start = Instant::now();
    let result = if args.log_iters {
        let ctx = lagat_core::CriterionContext::new(&problem.p, &problem.plan, &spec, &registry)?;
        lagat_core::engine::run_observed_with_context(&ctx, &config, |view| {
            print_line(&format!("iteration {} best {}", view.iteration, view.best_value));
        })?
    } else {
        run_lagat(&problem.p, &problem.plan, &spec, &config, &registry)?
    };
    let elapsed_ms = start.elapsed().as_millis();

    let content = match args.output_format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&result_json(&result, elapsed_ms))
                .expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Csv => result_csv(&result),
    };
    write_output(args.out.as_deref(), &content)?;

    if let Some(path) = &args.trace_csv {
        let mut csv = String::from("iteration,value\n");
        for (i, v) in result.trace.iter().enumerate() {
            csv.push_str(&format!("{},{v}\n", i + 1));
        }
        std::fs::write(path, csv).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

pub fn cmd_enumerate(args: &EnumerateArgs) -> Result<(), Error> {
    let problem = load_problem(&args.data, &args.criterion)?;
    let spec = build_spec(&args.criterion, &problem, 1e-6)?;
    let opts = EnumerateOptions {
        tie_tolerance: args.tie_tolerance,
        cap: args.cap,
        workers: args.workers,
    };
    let start = Instant::now();
    let result = enumerate_best(&problem.p, &problem.plan, &spec, &Registry::new(), &opts)?;
    let elapsed_ms = start.elapsed().as_millis();

    let json = serde_json::json!({
        "min_value": result.min_value,
        "argmin_solutions": result.argmin_solutions.iter().map(|s| s.members()).collect::<Vec<_>>(),
        "subsets_evaluated": result.subsets_evaluated,
        "elapsed_ms": elapsed_ms,
    });
    let mut content = serde_json::to_string_pretty(&json).expect("serializable");
    content.push('\n');
    write_output(args.out.as_deref(), &content)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), Error> {
    let problem = load_problem(&args.data, &args.criterion)?;
    let base = build_config(&args.config, args.criterion.lambda)?;
    let spec = build_spec(&args.criterion, &problem, base.lambda)?;
    let registry = Registry::new();

    // 0-based position of the first trace entry at or below the
    // threshold; an infinite threshold is reached before any iteration
    let reach = |trace: &[f64], threshold: f64| -> i64 {
        if threshold == f64::INFINITY {
            return 0;
        }
        trace
            .iter()
            .position(|&v| v <= threshold)
            .map(|i| i as i64)
            .unwrap_or(-1)
    };

    let mut csv = String::from("variant,seed,iteration,value\n");
    let mut summary = Vec::new();
    for s in 0..args.seeds {
        let seed = base.seed.wrapping_add(s);
        let plain = RunConfig {
            tabu: false,
            niterreg: 0,
            seed,
            ..base.clone()
        };
        let lagat = RunConfig {
            tabu: true,
            tabumemsize: base.tabumemsize.max(1),
            seed,
            ..base.clone()
        };
        let plain_run = run_lagat(&problem.p, &problem.plan, &spec, &plain, &registry)?;
        let lagat_run = run_lagat(&problem.p, &problem.plan, &spec, &lagat, &registry)?;
        for (variant, run) in [("ga", &plain_run), ("lagat", &lagat_run)] {
            for (i, v) in run.trace.iter().enumerate() {
                csv.push_str(&format!("{variant},{seed},{},{v}\n", i + 1));
            }
        }
        let threshold = args
            .threshold
            .unwrap_or_else(|| *plain_run.trace.last().expect("nonempty trace"));
        summary.push(serde_json::json!({
            "seed": seed,
            "threshold": threshold,
            "ga_iterations_to_threshold": reach(&plain_run.trace, threshold),
            "lagat_iterations_to_threshold": reach(&lagat_run.trace, threshold),
        }));
    }
    std::fs::write(&args.out, csv).map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;

    let median = |key: &str| -> f64 {
        let mut vals: Vec<i64> = summary
            .iter()
            .map(|s| s[key].as_i64().expect("integer"))
            .collect();
        vals.sort_unstable();
        let n = vals.len();
        if n % 2 == 1 {
            vals[n / 2] as f64
        } else {
            (vals[n / 2 - 1] + vals[n / 2]) as f64 / 2.0
        }
    };
    let out = serde_json::json!({
        "seeds": summary,
        "median_ga_iterations": median("ga_iterations_to_threshold"),
        "median_lagat_iterations": median("lagat_iterations_to_threshold"),
    });
    print_line(&serde_json::to_string_pretty(&out).expect("serializable"));
    Ok(())
}

pub fn cmd_criteria(args: &CriteriaArgs) -> Result<(), Error> {
    let entries = catalog();
    match args.format {
        CatalogFormat::Json => {
            let json: Vec<_> = entries
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "name": c.name,
                        "input": match c.input {
                            InputKind::DesignMatrix => "design-matrix",
                            InputKind::Kernel => "kernel",
                        },
                        "required": c.required,
                        "optional": c.optional,
                        "formula": c.formula,
                    })
                })
                .collect();
            print_line(&serde_json::to_string_pretty(&json).expect("serializable"));
        }
        CatalogFormat::Text => {
            print_line(&format!(
                "{:<12} {:<14} {:<26} formula",
                "name", "input", "required parameters"
            ));
            for c in entries {
                let input = match c.input {
                    InputKind::DesignMatrix => "design-matrix",
                    InputKind::Kernel => "kernel",
                };
                print_line(&format!(
                    "{:<12} {:<14} {:<26} {}",
                    c.name,
                    input,
                    c.required.join(", "),
                    c.formula
                ));
            }
        }
    }
    Ok(())
}
