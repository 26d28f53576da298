//! Command-line surface. Flag names match the run-configuration and
//! criterion-parameter field names exactly.

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "lagat",
    about = "Subset selection by a look-ahead genetic algorithm with tabu memory",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run the optimizer on labeled data and write the ranked solutions.
    Select(SelectArgs),
    /// Exhaustively enumerate all subsets (small instances only).
    Enumerate(EnumerateArgs),
    /// Paired-seed comparison of the plain configuration against
    /// look-ahead + tabu, with per-iteration traces.
    Bench(BenchArgs),
    /// List the built-in criterion catalog.
    Criteria(CriteriaArgs),
}

#[derive(Args, Clone)]
pub struct DataArgs {
    /// CSV file: first column row identifiers, numeric cells.
    #[arg(long)]
    pub data: String,
    /// Treat the first row as column identifiers.
    #[arg(long, default_value_t = false)]
    pub col_header: bool,
    /// File with one candidate identifier per line (default: all rows not
    /// in the test set).
    #[arg(long)]
    pub candidates: Option<String>,
    /// File with one test identifier per line.
    #[arg(long)]
    pub test: Option<String>,
    /// Number of rows to select.
    #[arg(long)]
    pub ntoselect: usize,
}

#[derive(Args, Clone)]
pub struct CriterionArgs {
    /// Criterion name from the catalog (see `lagat criteria`).
    #[arg(long)]
    pub criterion: String,
    /// Shrinkage parameter passed to the criterion (also the run lambda).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Weight parameter for the criteria that take one.
    #[arg(long)]
    pub weight: Option<f64>,
    /// CSV with the contrast matrix (row ids in the first column).
    #[arg(long)]
    pub contrast_path: Option<String>,
    /// CSV with the inverse kernel for the mixed-model criteria.
    #[arg(long)]
    pub kinv_path: Option<String>,
    /// Name of the response column; it is split off and the remaining
    /// columns become the selectable rows (column-selection criteria).
    #[arg(long)]
    pub response_column: Option<String>,
    /// CSV with the fixed-effect design (one row per row of the data).
    #[arg(long)]
    pub fixed_design_path: Option<String>,
    /// CSV with the alignment target kernel; computed from all features
    /// when omitted.
    #[arg(long)]
    pub target_kernel_path: Option<String>,
    /// Trait covariance for the multi-trait mixed-model variant
    /// (accepted, rejected at validation).
    #[arg(long)]
    pub vg_path: Option<String>,
    /// Residual trait covariance for the multi-trait variant.
    #[arg(long)]
    pub ve_path: Option<String>,
}

#[derive(Args, Clone)]
pub struct ConfigArgs {
    /// TOML file with run parameters; flags override file values.
    #[arg(long)]
    pub config: Option<String>,
    #[arg(long)]
    pub npop: Option<usize>,
    #[arg(long)]
    pub nelite: Option<usize>,
    #[arg(long)]
    pub keepbest: Option<bool>,
    #[arg(long)]
    pub tabu: Option<bool>,
    #[arg(long)]
    pub tabumemsize: Option<usize>,
    #[arg(long)]
    pub mutprob: Option<f64>,
    #[arg(long)]
    pub mutintensity: Option<f64>,
    #[arg(long)]
    pub niterations: Option<usize>,
    #[arg(long)]
    pub minitbefstop: Option<usize>,
    #[arg(long)]
    pub niterreg: Option<usize>,
    #[arg(long)]
    pub tolconv: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Result file (stdout when omitted).
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output_format: OutputFormat,
    /// Also write the convergence trace as iteration,value rows.
    #[arg(long)]
    pub trace_csv: Option<String>,
    /// Print one line per iteration with the best value so far.
    #[arg(long, default_value_t = false)]
    pub log_iters: bool,
}

#[derive(Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    /// Report argmins within this absolute distance of the minimum.
    #[arg(long, default_value_t = 1e-9)]
    pub tie_tolerance: f64,
    /// Refuse to enumerate more subsets than this.
    #[arg(long, default_value_t = 10_000_000)]
    pub cap: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Number of paired seeds.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// Iterations-to-threshold target value; each seed defaults to the
    /// plain variant's final best. `inf` yields 0 for both variants.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Trace CSV file with variant,seed,iteration,value rows.
    #[arg(long)]
    pub out: String,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum CatalogFormat {
    Text,
    Json,
}

#[derive(Args)]
pub struct CriteriaArgs {
    #[arg(long, value_enum, default_value_t = CatalogFormat::Text)]
    pub format: CatalogFormat,
}
