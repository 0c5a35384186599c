//! `ilpk`: kernelize, solve, compose, transform and verify integer programs
//! from the command line.
//!
//! Exit codes: 0 done (or all pairs agree), 10 YES, 20 NO, 1 disagreement or
//! internal failure, 2 usage / input error, 3 search or table cap exceeded.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "ilpk",
    version,
    about = "Kernelization and reductions for integer linear programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a covering or packing instance.
    Kernelize(KernelizeArgs),
    /// Decide an instance with the exact oracle or the branching solver.
    Solve(SolveArgs),
    /// OR-compose the Independent Set instances in a directory.
    Compose(ComposeArgs),
    /// Apply one instance transformation.
    Transform(TransformArgs),
    /// Check that reductions preserve the verdict.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Cover,
    Packing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pipeline {
    /// The basic normalization rules only.
    Basic,
    /// Basic reduction plus sunflower marking.
    Sunflower,
    /// The k+q+r reduction for covering programs.
    Kqr,
    /// Sunflower kernel followed by the k+q+r reduction (cover); basic (packing).
    Full,
}

#[derive(Args, Debug)]
pub struct KernelizeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub problem: Problem,
    #[arg(long, value_enum, default_value = "full")]
    pub pipeline: Pipeline,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the compressed table form (tbl-v1).
    #[arg(long)]
    pub tables: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Oracle,
    Branch,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Instance JSON or a tbl-v1 table file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "oracle")]
    pub method: Method,
    /// Search box, required for general instances.
    #[arg(long = "box")]
    pub search_box: Option<PathBuf>,
    /// Overrides ILPK_NODE_CAP.
    #[arg(long)]
    pub node_cap: Option<u64>,
    /// Verdict file; the summary always goes to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ComposeArgs {
    /// Directory of graph JSON files, taken in file-name order.
    #[arg(long)]
    pub graphs: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub box_out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// One set of selector digits shared by all gadgets.
    #[arg(long)]
    pub share_bits: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Sparsify3,
    ToCover,
    Dedup,
    MergePatterns,
    Is2pack,
    Ss2pack,
    Ss2cover,
    Hs2cover,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub op: Op,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// sparsify3: box to extend; to-cover: upper ends serve as the bounds.
    #[arg(long = "box")]
    pub search_box: Option<PathBuf>,
    /// sparsify3: where to write the extended box.
    #[arg(long)]
    pub box_out: Option<PathBuf>,
    /// merge-patterns: where to write the merge map.
    #[arg(long)]
    pub map_out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, requires = "after", conflicts_with = "corpus")]
    pub before: Option<PathBuf>,
    #[arg(long, requires = "before")]
    pub after: Option<PathBuf>,
    /// Box for a general `--before` instance.
    #[arg(long = "box")]
    pub search_box: Option<PathBuf>,
    /// Box for a general `--after` instance (defaults to `--box`).
    #[arg(long)]
    pub after_box: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cover")]
    pub problem: Problem,
    #[arg(long, value_enum, default_value = "basic")]
    pub pipeline: Pipeline,
    #[arg(long)]
    pub node_cap: Option<u64>,
    /// Generate a seeded corpus into this directory and check the pipeline on it.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub count: u64,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    /// Column-sparseness cap; unlimited when omitted.
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub k: u64,
    #[arg(long, default_value_t = 2)]
    pub max_coeff: u64,
    #[arg(long, default_value_t = 3)]
    pub max_rhs: u64,
    #[arg(long, default_value_t = 2)]
    pub max_cost: u64,
    /// Diff report; defaults to report.json inside the corpus directory.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kernelize(a) => commands::kernelize(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Compose(a) => commands::compose(&a),
        Command::Transform(a) => commands::transform(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CliError { code, message }) => {
            eprintln!("ilpk: {message}");
            ExitCode::from(code)
        }
    }
}
