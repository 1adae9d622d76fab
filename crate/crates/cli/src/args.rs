use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "segregation",
    version,
    about = "Projected finite-difference solver for two-density spatial segregation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem and write u1/u2/v, free boundary and report files.
    Solve(SolveArgs),
    /// Solve on several resolutions and tabulate errors against a reference.
    Study(StudyArgs),
    /// List the built-in problems.
    Presets {
        /// Print a JSON array instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Built-in problem (see `presets`).
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Problem description in JSON.
    #[arg(long, value_name = "FILE")]
    pub problem: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Stop when no node changes by more than this in one sweep.
    #[arg(long, value_name = "FLOAT")]
    pub tol: Option<f64>,
    /// Sweep budget; defaults to 50 n^2.
    #[arg(long, value_name = "INT")]
    pub max_iters: Option<usize>,
    /// Split each sweep across threads (the result does not change).
    #[arg(long)]
    pub parallel: bool,
    /// Read the top edge of the square presets' phi1 as one linear span.
    #[arg(long)]
    pub phi1_top_full_span: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Cells per side; required with --preset, overrides the file otherwise.
    #[arg(long, value_name = "INT")]
    pub n: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Write energy.csv with the discrete energy after every sweep.
    #[arg(long)]
    pub record_energy: bool,
    /// Write jp.csv with the coordinate-interleaved energies (1D only).
    #[arg(long)]
    pub record_jp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceArg {
    Analytic,
    Oracle,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Resolutions, strictly increasing.
    #[arg(long, value_name = "a,b,c", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ReferenceArg::Analytic)]
    pub reference: ReferenceArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}
