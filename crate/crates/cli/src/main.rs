//! `colrep`: build hash families and ingredients, compose measurement
//! matrices, sample signals, recover them, and benchmark support
//! identification.

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::code;

#[derive(Parser, Debug)]
#[command(
    name = "colrep",
    version,
    about = "Hierarchical compressive-sensing matrices by column replacement"
)]
struct Cli {
    /// Zero tolerance; overrides COLREP_TOLERANCE.
    #[arg(long, global = true, value_name = "EPS", allow_negative_numbers = true)]
    tolerance: Option<f64>,
    /// Run library loops on the current thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate or check hash families.
    #[command(subcommand)]
    Hf(HfCommand),
    /// Build or certify ingredient matrices.
    #[command(subcommand)]
    Ingredient(IngredientCommand),
    /// Write a composition file for a pattern and its ingredients.
    Compose(ComposeArgs),
    /// Sample a signal with a composed matrix.
    Sample(SampleArgs),
    /// Recover a signal from its measurements.
    Recover(RecoverArgs),
    /// Time naive against sublinear support identification.
    Bench(BenchArgs),
}

#[derive(Subcommand, Debug)]
enum HfCommand {
    /// Linear hash family over GF(q): columns are polynomials of degree below alpha.
    GenLinear {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        alpha: usize,
        /// Rows: the infinity row, then m - 1 field elements.
        #[arg(long)]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a separation property; exits 5 with a witness when it fails.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    family: PathBuf,
    #[command(subcommand)]
    property: Property,
    #[arg(long, default_value_t = colrep::hash_family::DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = colrep::hash_family::DEFAULT_SAMPLE_TRIALS)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
enum Property {
    /// Every t columns get distinct symbols in some row.
    Perfect {
        #[arg(long)]
        t: usize,
    },
    /// Shapes such as `1,3` or `1,2o` (marked parts accept the missing symbol).
    Separating {
        #[arg(long = "shape", required = true)]
        shapes: Vec<String>,
    },
    /// Every t columns split into every s-part shape.
    Distributing {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        s: usize,
    },
    /// Separation with per-row symbol bounds on a tau-column set.
    Strengthening {
        /// Per-row bounds, e.g. `4x6,3x13`.
        #[arg(long)]
        d: String,
        #[arg(long)]
        tau: usize,
        #[arg(long = "shape", required = true)]
        shapes: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    L0,
    L1,
}

#[derive(Subcommand, Debug)]
enum IngredientCommand {
    /// Vandermonde ingredient certified for sparsity t.
    Make {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// Rows; defaults to 2t.
        #[arg(long)]
        rows: Option<usize>,
        /// `default`, `spread`, or a comma-separated list of k distinct values.
        #[arg(long, default_value = "spread")]
        nodes: String,
        #[arg(long, value_enum, default_value_t = SchemeArg::L0)]
        scheme: SchemeArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a null-space condition; exits 5 when it fails.
    Certify {
        ingredient: PathBuf,
        #[arg(long, value_enum)]
        kind: SchemeArg,
        #[arg(long)]
        t: usize,
        /// Write the ingredient with its certification record here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ComposeArgs {
    #[arg(long)]
    pattern: PathBuf,
    /// One file shared by every row, or one per row.
    #[arg(long = "ingredient", required = true)]
    ingredients: Vec<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the dense matrix as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    composed: PathBuf,
    /// Signal file (JSON array).
    #[arg(long, conflicts_with = "random")]
    x: Option<PathBuf>,
    /// Draw a random signal with this many nonzero entries.
    #[arg(long, value_name = "T")]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    nonnegative: bool,
    /// Add a dense tail of total magnitude below this value.
    #[arg(long, value_name = "S", allow_negative_numbers = true)]
    tail: Option<f64>,
    /// Where to write the generated signal.
    #[arg(long)]
    record: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Positive,
    General,
    Strengthened,
    Sublinear,
    Noisy,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[arg(value_enum)]
    mode: Mode,
    composed: PathBuf,
    y: PathBuf,
    #[arg(long)]
    t: usize,
    /// Per-row sparsity bounds for strengthened mode, e.g. `4x6,3x13`.
    #[arg(long)]
    d: Option<String>,
    /// Tail mass bound for noisy mode.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    s: f64,
    /// Per-row scheme accuracy for noisy mode.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eps: f64,
    /// Least-squares refit on the noisy estimate's support.
    #[arg(long)]
    refit: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// `q:alpha` pairs.
    #[arg(long, default_value = "7:2,11:2,13:2,49:2,7:3,7:4")]
    points: String,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write a matplotlib script for the CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                code::USAGE as u8
            } else {
                code::OK as u8
            });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("colrep: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
