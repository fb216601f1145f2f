//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 the input sits where the
//! mathematics is undefined, 4 numerical failure.

mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::Parser;

pub use config::{resolve, Command, ExperimentConfig, Resolved, Sweep};
pub use output::{Format, Report};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Parser)]
#[command(name = "ratbound", version, about = "Experiments on degenerate rational maps")]
pub struct Args {
    /// Verb to run; may instead come from the input file.
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// JSON file: a full experiment config, a bare map {d, P, Q} or a family spec.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Named family (example1, example2, example2_companion, epstein_FT, cubic_eps, polylimit, inversion, custom).
    #[arg(long)]
    pub family: Option<String>,

    /// Family parameter `k=v`; repeatable. Lists are comma separated.
    #[arg(long, value_name = "K=V")]
    pub param: Vec<String>,

    /// Gcd / decomposition tolerance.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Point equality radius.
    #[arg(long)]
    pub eps_pt: Option<f64>,

    /// Indeterminacy threshold on |H(c)|.
    #[arg(long = "tol-i")]
    pub tol_indeterminate: Option<f64>,

    /// Truncation tolerance for measure and point-mass series.
    #[arg(long)]
    pub tail: Option<f64>,

    /// Sampler seed; falls back to $RATBOUND_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Backward-orbit length per sample.
    #[arg(long)]
    pub depth: Option<usize>,

    /// Number of samples.
    #[arg(long)]
    pub count: Option<usize>,

    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    pub workers: Option<usize>,

    /// Iterate number for `iterate` and `properness`; iteration cap for
    /// `escape` (default 60).
    #[arg(long)]
    pub n: Option<usize>,

    /// Point: `inf`, or a complex number such as `0.3-0.2i`.
    #[arg(long)]
    pub point: Option<String>,

    /// Disk centre for `converge`; repeatable.
    #[arg(long)]
    pub center: Vec<String>,

    /// Chordal disk radius for `converge`.
    #[arg(long)]
    pub radius: Option<f64>,

    /// Sweep values, comma separated.
    #[arg(long)]
    pub sweep: Option<String>,

    /// Family parameter the sweep varies (defaults to the family's own).
    #[arg(long)]
    pub sweep_param: Option<String>,

    /// Real range `lo,hi` of the escape grid.
    #[arg(long, allow_hyphen_values = true)]
    pub re: Option<String>,

    /// Imaginary range `lo,hi` of the escape grid.
    #[arg(long, allow_hyphen_values = true)]
    pub im: Option<String>,

    #[arg(long)]
    pub nx: Option<usize>,

    #[arg(long)]
    pub ny: Option<usize>,

    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// A rendered report and where it was written, if anywhere.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub text: String,
    pub written: Option<PathBuf>,
}

/// Runs one command and writes its report to the configured output file.
pub fn run(args: &Args) -> Result<Rendered> {
    let cfg = resolve(args)?;
    let report = commands::execute(&cfg)?;
    let text = report.render(cfg.format);
    if let Some(path) = &cfg.out {
        std::fs::write(path, &text)
            .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Rendered {
        text,
        written: cfg.out,
    })
}

/// Entry point for the binary: parse, run, map errors to exit codes.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&args) {
        Ok(r) => {
            if r.written.is_none() {
                print!("{}", r.text);
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
