//! Batch front end: run selections, enumerate oracles, benchmark the
//! plain configuration against look-ahead + tabu, and list criteria.
//!
//! Exit codes: 0 success, 1 runtime/criterion failure, 2 validation
//! failure. Errors are single-line diagnostics on stderr; success writes
//! nothing to stderr.

mod args;
mod run;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Select(args) => run::cmd_select(args),
        Command::Enumerate(args) => run::cmd_enumerate(args),
        Command::Bench(args) => run::cmd_bench(args),
        Command::Criteria(args) => run::cmd_criteria(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(if err.is_validation() { 2 } else { 1 });
    }
}
